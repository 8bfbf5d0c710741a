"""Command-line surface: one subcommand per experiment kind.

Exit codes: 0 success, 1 config error, 2 reliability violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from .harness import (
    EXPERIMENT_KINDS,
    ConfigError,
    ExperimentConfig,
    ReliabilityViolation,
    emit,
    load_config,
    run_experiment,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqlearn",
        description="Query-complexity experiments for active learning with label and comparison queries",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", type=str, default=None, help="YAML config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--format", type=str, choices=("csv", "jsonl"), default=None)
        p.add_argument("--dimension", type=int, default=None)
        p.add_argument("--grid", type=str, default=None, help="comma-separated grid values")
        p.add_argument("--timing", action="store_true", help="record wall-clock ms (breaks byte-identical output)")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
        if config.experiment != args.experiment:
            raise ConfigError(
                f"config file is for {config.experiment!r}, subcommand was {args.experiment!r}"
            )
    else:
        config = ExperimentConfig(experiment=args.experiment)
    overrides = {}
    for name in ("seed", "trials", "out", "workers", "format", "dimension"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.grid:
        overrides["grid"] = [float(g) if "." in g or "e" in g else int(g) for g in args.grid.split(",")]
    if args.timing:
        overrides["timing"] = True
    if overrides:
        raw = {f.name: getattr(config, f.name) for f in fields(ExperimentConfig)}
        raw.update(overrides)
        config = ExperimentConfig(**raw)
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ConfigError, FileNotFoundError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    try:
        rows = run_experiment(config)
    except ReliabilityViolation as e:
        print(f"reliability violation: {e}", file=sys.stderr)
        return 2
    out = config.out or f"{config.experiment}.{config.format}"
    emit(rows, config.format, out)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
