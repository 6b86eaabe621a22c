"""Command-line front end: argument parsing, RunConfig assembly and exit codes"""

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

import yaml

from src.core.config import Config
from src.core.errors import ConfigError, ForgeError
from src.core.logger import log_error, setup_logger
from src.core.orchestrator import ForgeOrchestrator
from src.models.run_config import (
    ALL_CHECKS,
    BuildMode,
    Command,
    Precision,
    RunConfig,
    build_mode_choices,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def build_parser(config: Config) -> argparse.ArgumentParser:
    """Parser with one subcommand per Command; defaults come from the environment"""
    parser = argparse.ArgumentParser(
        prog="wscforge",
        description="wscforge - exact constructions of K-convex maps without directional derivatives"
    )

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--precision",
        choices=[p.value for p in Precision],
        default=config.precision,
        help=f"Scalar arithmetic (default: {config.precision})"
    )
    shared.add_argument(
        "--depth",
        type=int,
        default=config.depth,
        help=f"Number of knots to select (default: {config.depth})"
    )
    shared.add_argument(
        "--seed",
        type=int,
        default=config.seed,
        help="64-bit seed for sampled checks (default: 0)"
    )
    shared.add_argument(
        "--out-dir",
        default=str(config.output_dir),
        help="Output directory (default: data; WSC_FORGE_OUT wins when set)"
    )
    shared.add_argument(
        "--input",
        default=None,
        help="JSON/YAML input file"
    )
    shared.add_argument(
        "--trials",
        type=int,
        default=config.trials,
        help=f"K-convexity sample count (default: {config.trials})"
    )

    construction = argparse.ArgumentParser(add_help=False)
    construction.add_argument(
        "--family",
        default="c0-partial-sums",
        help="Family kind: c0-partial-sums or linf-neg-prefix (default: c0-partial-sums)"
    )
    construction.add_argument(
        "--probe",
        default="canonical",
        help="canonical, decreasing, or an inline JSON functional"
    )
    construction.add_argument(
        "--target-z",
        default=None,
        help=f"Rescaling target for the probe limit (default: {config.target_z})"
    )
    construction.add_argument(
        "--case",
        default="auto",
        help="auto, 1-4 or a case name such as IncrLow (default: auto)"
    )
    construction.add_argument("--q", default=None, help="q for the NonincHigh / IncrLow cases")
    construction.add_argument(
        "--gap-floor",
        default=None,
        help="Norm gap the difference quotients must keep (default: |node factor|)"
    )
    construction.add_argument(
        "--max-family-depth",
        type=int,
        default=config.max_family_depth,
        help=f"Largest family truncation tried (default: {config.max_family_depth})"
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    build = subparsers.add_parser(
        Command.BUILD_CONVEX.value, parents=[shared],
        help="Build a convex sup-of-lines interpolant from a sequence"
    )
    build.add_argument("--sequence", required=True, help="Values as '[1, 1/2, 1/3]'")
    build.add_argument("--knots", default=None, help="Knots for sup-of-lines mode")
    build.add_argument(
        "--mode",
        choices=build_mode_choices(),
        default=BuildMode.PLAN.value,
        help="integer-knots (alias prop41), sup-of-lines (alias lemma42) or plan (default: plan)"
    )
    build.add_argument("--target-z", default=None, help="Limit of the sequence in plan mode")
    build.add_argument("--case", default="auto", help="Expected case in plan mode")
    build.add_argument("--q", default=None, help="q for the NonincHigh / IncrLow cases")

    counterexample = subparsers.add_parser(
        Command.COUNTEREXAMPLE.value, parents=[shared, construction],
        help="Build the cone and ray mapping, then run every check"
    )
    counterexample.add_argument(
        "--checks",
        default=",".join(ALL_CHECKS),
        help="Comma-separated checks to run (default: all)"
    )

    verify = subparsers.add_parser(
        Command.VERIFY.value, parents=[shared],
        help="Rebuild a saved plan and re-run the checks"
    )
    verify.add_argument("--plan", required=True, help="plan.json written by counterexample")
    verify.add_argument(
        "--checks",
        default=",".join(ALL_CHECKS),
        help="Comma-separated checks to run (default: all)"
    )

    extend = subparsers.add_parser(
        Command.EXTEND.value, parents=[shared, construction],
        help="Extend the ray mapping to a half-space and check it"
    )
    extend.add_argument("--dimension", type=int, default=5, help="Host dimension (default: 5)")
    extend.add_argument("--direction", default=None, help="Unit vector h (default: first axis)")

    demo = subparsers.add_parser(
        Command.DEMO_LINF.value, parents=[shared],
        help="Nonincreasing l-infinity family that stays away from its infimum"
    )
    demo.add_argument("--n-max", type=int, default=50, help="Family length (default: 50)")

    return parser


def build_run_config(args: argparse.Namespace, config: Config) -> RunConfig:
    """Turn parsed arguments into a validated RunConfig"""
    command = Command(args.command)
    out_dir = Path(os.getenv("WSC_FORGE_OUT") or args.out_dir)

    checks = ALL_CHECKS
    if getattr(args, "checks", None):
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]

    return RunConfig(
        command=command,
        out_dir=out_dir,
        input_path=Path(args.input) if args.input else None,
        precision=Precision(args.precision),
        depth=args.depth,
        seed=args.seed,
        trials=args.trials,
        family=getattr(args, "family", "c0-partial-sums"),
        probe=getattr(args, "probe", "canonical"),
        target_z=getattr(args, "target_z", None),
        case=str(getattr(args, "case", "auto")),
        q=getattr(args, "q", None),
        max_family_depth=getattr(args, "max_family_depth", config.max_family_depth),
        gap_floor=getattr(args, "gap_floor", None),
        mode=BuildMode.parse(getattr(args, "mode", BuildMode.PLAN.value)),
        sequence=getattr(args, "sequence", None),
        knots=getattr(args, "knots", None),
        plan_path=Path(args.plan) if getattr(args, "plan", None) else None,
        checks=list(checks),
        dimension=getattr(args, "dimension", 5),
        direction=getattr(args, "direction", None),
        n_max=getattr(args, "n_max", 50),
    )


def run(run_config: RunConfig, config: Optional[Config] = None) -> int:
    """Execute one run

    Returns:
        0 when all checks pass, 1 when a check failed, 2 on input or config errors
    """
    logger = setup_logger("CLI")
    try:
        orchestrator = ForgeOrchestrator(run_config, config)
        return orchestrator.run()
    except (ForgeError, ValueError, yaml.YAMLError) as e:
        logger.error(f"{e.__class__.__name__}: {e}")
        log_error(f"Input error: {e}")
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"File error: {e}")
        log_error(f"File error: {e}")
        return EXIT_INPUT_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    """Parse argv and run; the return value is the process exit code"""
    logger = setup_logger("Main")
    try:
        config = Config()
        args = build_parser(config).parse_args(argv)
        run_config = build_run_config(args, config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except SystemExit as e:
        # argparse exits with 2 on bad flags and 0 on --help
        return int(e.code or 0)

    try:
        return run(run_config, config)
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        return EXIT_INPUT_ERROR
