# panic_forecast_tool/main.py
# All comments and identifiers in English

import argparse
import json
import logging
import sys
from typing import List, Optional

from . import commands
from .errors import PanicForecastError, RecordNotFound
from .project_io.json_handler import load_run_config

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("ingest", "profile", "simulate", "evaluate", "annotate", "trace", "calibrate")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Run configuration JSON file")
    common.add_argument("--seed", type=int, help="Override the configured seed")
    common.add_argument("--mock-script", help="Answer provider calls from a scripted mock file")
    common.add_argument("--out-dir", help="Override the configured output directory")
    common.add_argument("--resume", action="store_true", help="Skip users whose trace already exists")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--quiet", action="store_true", help="Hide the progress bar")

    parser = argparse.ArgumentParser(prog="panic-forecast",
                                     description="Predict post-disaster panic from pre-disaster posts.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, parents=[common])
        if name == "trace":
            sub.add_argument("user_id")
            sub.add_argument("--json", action="store_true", help="Print the trace and profile as JSON")
    return parser


def apply_overrides(config, args: argparse.Namespace) -> None:
    if args.seed is not None:
        config.seed = args.seed
    if args.mock_script:
        config.simulate.mock_script_path = args.mock_script
    if args.out_dir:
        config.out_dir = args.out_dir
    if args.resume:
        config.simulate.resume = True


def run_command(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    apply_overrides(config, args)

    if args.command == "ingest":
        stats = commands.ingest(config)
        print(json.dumps(stats.to_dict(), indent=2))
    elif args.command == "profile":
        commands.profile(config)
    elif args.command == "simulate":
        traces = commands.simulate(config, quiet=args.quiet)
        for outcome, count in commands.outcome_ledger(traces).items():
            print(f"{outcome}: {count}")
    elif args.command == "evaluate":
        report = commands.evaluate(config)
        print(f"accuracy {report.accuracy:.4f}  macro F1 {report.macro_f1:.4f}  "
              f"AUC {report.auc if report.auc is None else format(report.auc, '.4f')}  "
              f"evaluated {report.evaluated_count}")
    elif args.command == "annotate":
        counts = commands.annotate(config)
        print(json.dumps(counts, indent=2, sort_keys=True))
    elif args.command == "trace":
        stage_trace, profile, text = commands.trace(config, args.user_id)
        if args.json:
            print(json.dumps(commands.trace_document(stage_trace, profile), indent=2, ensure_ascii=False))
        else:
            print(text, end="")
    elif args.command == "calibrate":
        threshold, f1 = commands.calibrate(config)
        print(f"threshold {threshold:.4f}  F1 {f1:.4f}")
    return 0


def run_application(argv: Optional[List[str]] = None) -> int:
    """
    Parses the command line, configures logging and runs one subcommand.
    Returns the process exit code.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return run_command(args)
    except RecordNotFound as e:
        logger.error("%s", e)
        return 2
    except (PanicForecastError, FileNotFoundError, ValueError) as e:
        logger.error("%s failed: %s", args.command, e)
        return 1


def main():
    """Main entry point for the application"""
    sys.exit(run_application())


if __name__ == '__main__':
    main()
