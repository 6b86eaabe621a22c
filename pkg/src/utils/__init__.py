"""Utility functions and helpers"""