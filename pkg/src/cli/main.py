"""
Command-line entry point: ``gcme <command> [options]``.

Exit codes: 0 success, 1 unexpected error, 2 configuration error,
3 tolerance failure (or a report that differs from --compare),
4 ambiguous calibration, 130 interrupted.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger

from src.cli.commands import (
    COMMANDS,
    EXIT_CONFIG,
    EXIT_ERROR,
    EXIT_TOLERANCE,
    execute,
)
from src.cli.config import EXPECTATIONS, TOLERANCE_PROFILES, load_config
from src.errors import ConfigError, PathError, ScenarioError, ToleranceFailure

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>GCME</cyan> | <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | GCME | {message}"

HELP = {
    "check": "Zero-curvature residuals of a connection",
    "lax": "Operator pencils, lambda sweep and dressing check",
    "embed-ymhb": "Yang-Mills-Higgs-Bogomolny embedding check",
    "embed-sdym": "Self-dual Yang-Mills reduction identities",
    "transport": "Plaquette holonomy and path independence",
    "reconstruct": "Curve family from transported frames",
    "calibrate": "Resolve the sign convention against oracle scenarios",
    "gen": "Export a sampled connection (and its frame) as CSV",
}


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Setup loguru sinks: stderr, plus a rotating file when ``log_file`` is set."""
    logger.remove()
    logger.add(sys.stderr, format=LOG_FORMAT, level=level.upper())
    if log_file:
        logger.add(
            log_file,
            format=FILE_FORMAT,
            level="DEBUG",
            rotation="10 MB",
            retention="7 days",
        )


def lambda_list(raw: str) -> Tuple[float, ...]:
    """``"0,1,-1"`` -> (0.0, 1.0, -1.0); a single number is a one-element list."""
    try:
        values = tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {raw!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty lambda list")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [grid], [scenario] and [run] sections")
    common.add_argument("--out", dest="output_dir", help="Directory for reports and artifacts")
    common.add_argument("--prefix", dest="output_prefix", help="File name stem for outputs")
    common.add_argument("--scenario", dest="spec", help="Scenario spec, e.g. 'pure_gauge'")
    common.add_argument("--seed", type=int, help="Seed for random scenarios")
    common.add_argument("--convention", dest="convention_path", help="Sign convention JSON")
    common.add_argument("--tolerance-profile", choices=sorted(TOLERANCE_PROFILES))
    common.add_argument("--expect", choices=EXPECTATIONS)
    common.add_argument(
        "--lambda",
        dest="lambdas",
        type=lambda_list,
        action="append",
        help="Spectral parameters, comma separated or repeated (3+ distinct)",
    )
    common.add_argument("--higgs", help="Higgs field spec for embed-ymhb")
    common.add_argument("--radius", type=float, help="Expected circle radius for reconstruct")
    common.add_argument("--workers", type=int, help="Threads for calibrate")
    common.add_argument(
        "--no-reproject",
        dest="reproject",
        action="store_const",
        const=False,
        help="Skip the polar re-projection after each transport step",
    )
    common.add_argument("--compare", help="Previous report; exit 3 when the new one differs")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--log-file", help="Also log to this file (rotated at 10 MB)")

    parser = argparse.ArgumentParser(
        prog="gcme",
        description="Verification toolkit for the geometric zero-curvature equations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Residuals of a pure-gauge connection
  gcme check --config data/configs/check_pure_gauge.ini

  # Resolve the sign convention
  gcme calibrate --out reports

  # SDYM reduction on a random field, strict tolerances
  gcme embed-sdym --scenario "random_smooth(seed=42)" --tolerance-profile strict
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], help=HELP[name])
    return parser


def flags_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    names = (
        "output_dir",
        "output_prefix",
        "spec",
        "seed",
        "convention_path",
        "tolerance_profile",
        "expect",
        "lambdas",
        "higgs",
        "radius",
        "workers",
        "reproject",
        "compare",
        "log_level",
        "log_file",
    )
    flags = {name: getattr(args, name, None) for name in names}
    if flags["lambdas"] is not None:
        flags["lambdas"] = tuple(v for group in flags["lambdas"] for v in group)
    return flags


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_ERROR

    try:
        config = load_config(args.config, flags_from_args(args))
    except ConfigError as e:
        setup_logging(args.log_level or "INFO")
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    setup_logging(config.log_level, config.log_file)

    try:
        return execute(args.command, config)
    except (ConfigError, ScenarioError, PathError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except ToleranceFailure as e:
        logger.error(str(e))
        return EXIT_TOLERANCE
    except KeyboardInterrupt:
        logger.warning("Process interrupted by user")
        return 130
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    exit(main())
