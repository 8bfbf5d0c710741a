"""Experiment orchestration and result emission.

Experiments run a (grid x trials) matrix with per-trial RNG substreams keyed
by (seed, grid index, trial), so results are deterministic for a fixed config
regardless of worker count. Rows are order-stabilized before emission.

The ms column is 0 by default so that identical configs produce byte-identical
CSV; pass timing=True (CLI --timing) to record wall-clock milliseconds.
"""

from __future__ import annotations

import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import analysis, pac, pointloc, rpu
from .core import Hyperplane, Sign, evaluate_many
from .distributions import (
    DistributionSpec,
    gaussian,
    make_rng,
    sample,
    sample_tangent_hyperplane,
    uniform_ball,
)
from .oracle import Oracle, QueryKind

SCHEMA_VERSION = 1
EXPERIMENT_KINDS = (
    "rpu_vs_n",
    "rpu_vs_d",
    "pac_error_curve",
    "pointloc_depth",
    "g_estimate",
    "coverage_curve",
    "mqs2d",
)
CSV_HEADER = "experiment,seed,grid,trial,labels,comparisons,total,errors,metric,ms"


class ConfigError(ValueError):
    pass


class ReliabilityViolation(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    dimension: int = 3
    distribution: str = "ball"  # ball | gaussian
    grid: list = field(default_factory=lambda: [1 << i for i in range(11)])
    trials: int = 50
    seed: int = 0
    kinds: list = field(default_factory=lambda: ["label", "comparison"])
    epsilon: float = 0.05
    delta: float = 0.1
    sample_size: int = 256  # rpu_vs_d fixed n
    coverage_test_points: int = 2000
    classifier: str = "tangent"
    timing: bool = False
    workers: int = 1
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not self.grid:
            raise ConfigError("grid must be nonempty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.distribution not in ("ball", "gaussian"):
            raise ConfigError(f"unknown distribution {self.distribution!r}")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError(f"unknown format {self.format!r}")
        for k in self.kinds:
            if k not in ("label", "comparison"):
                raise ConfigError(f"unknown query kind {k!r}")


@dataclass
class ResultRow:
    experiment: str
    seed: int
    grid: float
    trial: int
    labels: int
    comparisons: int
    total: int
    errors: int
    metric: float
    ms: int


def load_config(path: str) -> ExperimentConfig:
    with open(path) as f:
        raw = yaml.safe_load(f) or {}
    version = raw.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}")
    try:
        return ExperimentConfig(**raw)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def _spec(config: ExperimentConfig, d: int) -> DistributionSpec:
    return uniform_ball(d) if config.distribution == "ball" else gaussian(d)


def _mismatches(labels: list, hidden: Hyperplane, points: np.ndarray) -> int:
    values = evaluate_many(hidden, points)
    truth = np.where(values >= 0, 1, -1)
    got = np.array([s.value for s in labels])
    return int(np.sum(got != truth))


# -- per-task workers (top level so process pools can pickle them) -----------


def _task_rpu(config_dict: dict, d: int, n: int, kind_name: str, grid_value, gi: int, t: int) -> ResultRow:
    config = ExperimentConfig(**config_dict)
    kind = QueryKind(kind_name)
    rng = make_rng(config.seed, gi, t, 0 if kind is QueryKind.LABEL else 1)
    spec = _spec(config, d)
    pts = sample(spec, rng, n)
    hidden = sample_tangent_hyperplane(d, rng)
    oracle = Oracle(hidden)
    start = time.perf_counter()
    outcome = rpu.perfect_learning(pts, kind, rpu.RpuParams(), oracle, rng)
    ms = int((time.perf_counter() - start) * 1000) if config.timing else 0
    errors = _mismatches(outcome.labels, hidden, pts)
    coverage = outcome.inferred_count / n
    return ResultRow(
        config.experiment, config.seed, grid_value, t,
        oracle.ledger.label_count, oracle.ledger.comparison_count, oracle.ledger.total,
        errors, coverage, ms,
    )


def _task_pointloc(config_dict: dict, n: int, gi: int, t: int) -> ResultRow:
    config = ExperimentConfig(**config_dict)
    d = config.dimension
    rng = make_rng(config.seed, gi, t)
    spec = _spec(config, d)
    arr = pointloc.sample_arrangement(spec, n, rng)
    x = sample(uniform_ball(d), rng, 1)[0]
    start = time.perf_counter()
    sig = pointloc.locate(x, arr, rpu.RpuParams(), rng)
    ms = int((time.perf_counter() - start) * 1000) if config.timing else 0
    values = np.array([h.normal @ x + h.offset for h in arr.hyperplanes])
    truth = np.where(values >= 0, 1, -1)
    got = np.array([s.value for s in sig.signs])
    errors = int(np.sum(got != truth))
    return ResultRow(
        config.experiment, config.seed, n, t, 0, 0, sig.depth, errors, float(sig.depth), ms
    )


def _task_pac(config_dict: dict, eps: float, gi: int, t: int) -> ResultRow:
    config = ExperimentConfig(**config_dict)
    d = config.dimension
    rng = make_rng(config.seed, gi, t)
    spec = _spec(config, d)
    hidden = Hyperplane(rng.standard_normal(d), float(rng.normal(0.0, 0.5)))
    oracle = Oracle(hidden)
    params = pac.PacParams(epsilon=eps, delta=config.delta)
    start = time.perf_counter()
    outcome = pac.comparison_pool_pac(spec, params, oracle, rng)
    ms = int((time.perf_counter() - start) * 1000) if config.timing else 0
    err = measured_error(outcome.hypothesis, hidden, spec, rng)
    return ResultRow(
        config.experiment, config.seed, eps, t,
        oracle.ledger.label_count, oracle.ledger.comparison_count, oracle.ledger.total,
        0, err, ms,
    )


def _task_mqs2d(config_dict: dict, eps: float, gi: int, t: int) -> ResultRow:
    config = ExperimentConfig(**config_dict)
    rng = make_rng(config.seed, gi, t)
    spec = uniform_ball(2)
    # hidden separator through the disk: random direction, offset inside (-1,1)
    hidden = Hyperplane(rng.standard_normal(2), float(rng.uniform(-0.9, 0.9)))
    oracle = Oracle(hidden)
    start = time.perf_counter()
    outcome = pac.label_mqs_pac_2d(eps, oracle)
    ms = int((time.perf_counter() - start) * 1000) if config.timing else 0
    err = measured_error(outcome.hypothesis, hidden, spec, rng)
    return ResultRow(
        config.experiment, config.seed, eps, t,
        oracle.ledger.label_count, oracle.ledger.comparison_count, oracle.ledger.total,
        0, err, ms,
    )


def _task_coverage(config_dict: dict, n: int, gi: int, t: int) -> ResultRow:
    config = ExperimentConfig(**config_dict)
    d = config.dimension
    kind = QueryKind(config.kinds[0])
    mean, _ = analysis.estimate_coverage(
        _spec(config, d), n, 1, kind, seed=int(make_rng(config.seed, gi, t).integers(1 << 62)),
        n_test=config.coverage_test_points, classifier=config.classifier,
    )
    return ResultRow(config.experiment, config.seed, n, t, 0, 0, 0, 0, mean, 0)


def measured_error(
    hypothesis: Hyperplane, hidden: Hyperplane, spec: DistributionSpec, rng, n_test: int = 100_000
) -> float:
    fresh = sample(spec, rng, n_test)
    a = evaluate_many(hypothesis, fresh) >= 0
    b = evaluate_many(hidden, fresh) >= 0
    return float(np.mean(a != b))


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    tasks = []  # (sort_key, fn, args)
    cd = asdict(config)
    exp = config.experiment
    if exp == "rpu_vs_n":
        for ki, kind in enumerate(config.kinds):
            for gi, n in enumerate(config.grid):
                for t in range(config.trials):
                    # encode kind in grid ordering: label rows then comparison rows
                    tasks.append(((ki, gi, t), _task_rpu, (cd, config.dimension, int(n), kind, int(n), gi, t)))
    elif exp == "rpu_vs_d":
        kind = config.kinds[-1] if config.kinds else "comparison"
        for gi, d in enumerate(config.grid):
            for t in range(config.trials):
                tasks.append(((0, gi, t), _task_rpu, (cd, int(d), config.sample_size, kind, int(d), gi, t)))
    elif exp == "pointloc_depth":
        for gi, n in enumerate(config.grid):
            for t in range(config.trials):
                tasks.append(((0, gi, t), _task_pointloc, (cd, int(n), gi, t)))
    elif exp == "pac_error_curve":
        for gi, eps in enumerate(config.grid):
            for t in range(config.trials):
                tasks.append(((0, gi, t), _task_pac, (cd, float(eps), gi, t)))
    elif exp == "mqs2d":
        for gi, eps in enumerate(config.grid):
            for t in range(config.trials):
                tasks.append(((0, gi, t), _task_mqs2d, (cd, float(eps), gi, t)))
    elif exp == "coverage_curve":
        for gi, n in enumerate(config.grid):
            for t in range(config.trials):
                tasks.append(((0, gi, t), _task_coverage, (cd, int(n), gi, t)))
    elif exp == "g_estimate":
        rows = []
        kind = QueryKind(config.kinds[-1] if config.kinds else "comparison")
        for gi, n in enumerate(config.grid):
            est = analysis.estimate_avg_inference_dimension(
                _spec(config, config.dimension), int(n), config.trials, kind,
                seed=config.seed, classifier=config.classifier,
            )
            rows.append(ResultRow(exp, config.seed, int(n), 0, 0, 0, 0, 0, est.g_hat, 0))
        return rows

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [(key, pool.submit(fn, *args)) for key, fn, args in tasks]
            keyed = [(key, fut.result()) for key, fut in futures]
    else:
        keyed = [(key, fn(*args)) for key, fn, args in tasks]
    keyed.sort(key=lambda kv: kv[0])
    rows = [row for _, row in keyed]
    _check_reliability(config, rows)
    return rows


def _check_reliability(config: ExperimentConfig, rows: list[ResultRow]) -> None:
    if config.experiment in ("rpu_vs_n", "rpu_vs_d", "pointloc_depth"):
        bad = [r for r in rows if r.errors != 0]
        if bad:
            raise ReliabilityViolation(
                f"{len(bad)} rows with nonzero errors in {config.experiment}"
            )


def _format_float(x: float) -> str:
    if float(x) == int(x):
        return str(int(x))
    return f"{x:.6g}"


def emit(rows: list[ResultRow], format: str, path: str | Path) -> None:
    path = Path(path)
    try:
        if format == "csv":
            lines = [CSV_HEADER]
            for r in rows:
                lines.append(
                    f"{r.experiment},{r.seed},{_format_float(r.grid)},{r.trial},"
                    f"{r.labels},{r.comparisons},{r.total},{r.errors},"
                    f"{_format_float(r.metric)},{r.ms}"
                )
            path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        elif format == "jsonl":
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                for r in rows:
                    f.write(json.dumps(asdict(r)) + "\n")
        else:
            raise ConfigError(f"unknown format {format!r}")
    except OSError as e:
        raise OSError(f"failed writing results to {path}: {e}") from e


def parse_csv(path: str | Path) -> list[ResultRow]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(
            ResultRow(
                parts[0], int(parts[1]), float(parts[2]), int(parts[3]), int(parts[4]),
                int(parts[5]), int(parts[6]), int(parts[7]), float(parts[8]), int(parts[9]),
            )
        )
    return rows
