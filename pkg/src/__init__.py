"""wscforge - cone-convex counterexample construction and verification"""

__version__ = "1.0.0"
