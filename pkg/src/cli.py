"""Command-line front end: run, sweep and check scenarios."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .config import FLEXBLOCK_JOBS, FLEXBLOCK_LOG
from .errors import ConfigError, ParseError, SolverExhausted, ValidationError
from .pipeline import RunPipeline
from .services.scenario_service import check_scenario, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _parse_ratios(text: str) -> List[float]:
    ratios = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            value = float(part)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {part!r}") from None
        if value < 0:
            raise argparse.ArgumentTypeError(f"ratio must be >= 0, got {value}")
        ratios.append(value)
    if not ratios:
        raise argparse.ArgumentTypeError("at least one ratio is required")
    return ratios


def _sources(text: str) -> tuple[str, ...]:
    return ("wind", "pv") if text == "both" else (text,)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexblock",
        description="Energy block dispatch and flexibility evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Dispatch one scenario and evaluate its flexibility")
    run.add_argument("scenario", type=Path, help="Scenario JSON document")
    run.add_argument("--out", type=Path, required=True, help="Output directory")
    run.add_argument("--seed", type=int, default=None, help="Override the profile synthesis seed")
    run.add_argument("--no-plots", action="store_true", help="Skip the SVG charts")
    run.add_argument("--forecast", choices=["perfect", "persistence"], default=None)

    sweep = sub.add_parser("sweep", help="Run a scenario over renewable penetration ratios")
    sweep.add_argument("scenario", type=Path, help="Scenario JSON document")
    sweep.add_argument("--ratios", type=_parse_ratios, required=True, help="Comma-separated ratios, e.g. 0,0.1,0.2")
    sweep.add_argument("--out", type=Path, required=True, help="Output directory")
    sweep.add_argument("--jobs", type=int, default=FLEXBLOCK_JOBS, help="Concurrent runs")
    sweep.add_argument("--sources", choices=["wind", "pv", "both"], default="both")
    sweep.add_argument("--seed", type=int, default=None, help="Override the profile synthesis seed")
    sweep.add_argument("--no-plots", action="store_true", help="Skip abandonment.svg")

    check = sub.add_parser("check", help="Validate a scenario without running it")
    check.add_argument("scenario", type=Path, help="Scenario JSON document")

    return parser


def _exit_code(error: BaseException) -> int:
    if isinstance(error, SolverExhausted):
        return EXIT_SOLVER
    if isinstance(error, (ConfigError, ParseError, ValidationError, FileNotFoundError)):
        return EXIT_USAGE
    return EXIT_VALIDATION


def cmd_run(args: argparse.Namespace) -> int:
    spec = load_scenario(args.scenario)
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    result = RunPipeline().process_scenario(spec, args.out, plots=not args.no_plots, forecast=args.forecast)
    print(result.report.format_table())
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = load_scenario(args.scenario)
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    result = RunPipeline().sweep(
        spec,
        args.ratios,
        args.out,
        jobs=args.jobs,
        sources=_sources(args.sources),
        plots=not args.no_plots,
    )
    print(result.table.to_string(index=False))
    if result.failed:
        return max(_exit_code(run.error) for run in result.failed if run.error is not None)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    spec = load_scenario(args.scenario)
    results = check_scenario(spec)
    for item in results:
        print(item.format())
    return EXIT_OK if all(item.passed for item in results) else EXIT_VALIDATION


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "check": cmd_check}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes."""
    logging.basicConfig(
        level=getattr(logging, FLEXBLOCK_LOG, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        return COMMANDS[args.command](args)
    except Exception as e:
        code = _exit_code(e)
        print(f"error: {e}", file=sys.stderr)
        logger.debug("Command failed", exc_info=True)
        return code
