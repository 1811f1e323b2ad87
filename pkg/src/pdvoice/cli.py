"""Command-line entry point.

Subcommands::

    pdvoice run --data parkinsons.data --out results/ [--config exp.ini]
                [--seed 42] [--models mlp,gbm,attentive,saint]
                [--test-fraction 0.2]
    pdvoice eda --data parkinsons.data --out results/
    pdvoice evaluate --checkpoint results/checkpoint_saint.json \
                     --data parkinsons.data --out rescored/

Exit codes: 0 success, 2 data or schema problem, 3 configuration problem,
4 training divergence.
"""

from __future__ import annotations

import argparse
import sys

from .config import build_config, read_config_file
from .exceptions import ConfigError, DataError, TrainingDivergedError
from .harness import StageFailure, run_eda, run_evaluate, run_experiment

EXIT_OK = 0
EXIT_DATA = 2
EXIT_CONFIG = 3
EXIT_DIVERGED = 4


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit code 2 for usage errors; we treat those as
    configuration problems instead so the documented codes stay stable."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pdvoice",
                     description="Train and compare voice-based Parkinson's classifiers.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="full pipeline: split, train, evaluate, emit")
    run_p.add_argument("--data", required=True, help="input CSV path")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--config", help="INI file with experiment overrides")
    run_p.add_argument("--seed", type=int, help="root seed (default 42)")
    run_p.add_argument("--models", help="comma-separated subset of mlp,gbm,attentive,saint")
    run_p.add_argument("--test-fraction", type=float, dest="test_fraction",
                       help="holdout fraction (default 0.2)")

    eda_p = sub.add_parser("eda", help="emit correlation.csv and summary.csv")
    eda_p.add_argument("--data", required=True)
    eda_p.add_argument("--out", required=True)

    ev_p = sub.add_parser("evaluate", help="re-score a saved checkpoint on a data file")
    ev_p.add_argument("--checkpoint", required=True)
    ev_p.add_argument("--data", required=True)
    ev_p.add_argument("--out", required=True)
    return parser


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, StageFailure):
        return _exit_code_for(exc.cause)
    if isinstance(exc, DataError):
        return EXIT_DATA
    if isinstance(exc, TrainingDivergedError):
        return EXIT_DIVERGED
    if isinstance(exc, (ConfigError, ValueError)):
        return EXIT_CONFIG
    raise exc


def _cmd_run(args) -> int:
    overrides = read_config_file(args.config) if args.config else {}
    models = None
    if args.models:
        models = tuple(part.strip() for part in args.models.split(",") if part.strip())
    config = build_config(args.data, args.out, overrides, seed=args.seed,
                          models=models, test_fraction=args.test_fraction)
    artifacts = run_experiment(config)
    print(f"wrote {len(artifacts.files)} files to {artifacts.output_dir}")
    for kind in sorted(artifacts.reports):
        r = artifacts.reports[kind]
        print(f"  {kind}: accuracy {r.accuracy:.4f}  mcc {r.mcc:.4f}  auc {r.roc.auc:.4f}")
    return EXIT_OK


def _cmd_eda(args) -> int:
    correlation, summary = run_eda(args.data, args.out)
    print(f"wrote {correlation} and {summary}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    report = run_evaluate(args.checkpoint, args.data, args.out)
    print(f"{report.kind}: accuracy {report.accuracy:.4f}  mcc {report.mcc:.4f}  "
          f"auc {report.roc.auc:.4f}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"run": _cmd_run, "eda": _cmd_eda, "evaluate": _cmd_evaluate}[args.command]
        return handler(args)
    except (StageFailure, DataError, ConfigError, TrainingDivergedError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
