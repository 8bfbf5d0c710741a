"""Brute-force oracles and statistics.

has_inferable_point asks whether some point of a sample is forced by the
answers on the remaining points; Monte Carlo over samples and classifiers
estimates how often no point is forced (the g_hat curve), with Wilson
intervals. estimate_coverage measures the abstention rate of the passive
reliable predictor, and fit_growth compares growth models for query curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Hyperplane, Sign, evaluate_many, lift_points, sign_of
from .distributions import DistributionSpec, make_rng, sample, sample_tangent_hyperplane
from .inference import ConstraintSet, Verdict
from .oracle import QueryKind


@dataclass
class GEstimate:
    n: int
    trials: int
    failures: int
    g_hat: float
    wilson_interval: tuple[float, float]


@dataclass
class FitReport:
    models: dict[str, float]  # model name -> residual sum of squares
    preferred: str


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = phat + z * z / (2 * trials)
    rad = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return ((center - rad) / denom, (center + rad) / denom)


def _zero_pos(values: np.ndarray) -> np.ndarray:
    """Signs with the Zero -> Positive convention, as +-1."""
    return np.where(values >= 0, 1.0, -1.0)


def _answer_rows(points: np.ndarray, h: Hyperplane, kind: QueryKind):
    """Constraint rows for the full answer set Q(points) under h.

    Comparisons are represented by the adjacent pairs of the value-sorted
    order; summing adjacent rows recovers every pairwise row, so the LP cone
    is identical to using all pairs.
    """
    values = evaluate_many(h, points)
    lifted = lift_points(points)
    label_rows = _zero_pos(values)[:, None] * lifted
    if kind is QueryKind.LABEL:
        return values, label_rows, None
    order = np.argsort(values, kind="stable")
    return values, label_rows, order


def has_inferable_point(points: np.ndarray, h: Hyperplane, kind: QueryKind, margin: float = 1e-7) -> bool:
    """Does some x have its label forced by the answers on points minus x?

    Uses the oracle mechanics directly (no ledger). Candidates are tried from
    the middle of the value order outward, where inference succeeds first.
    """
    points = np.asarray(points, dtype=float)
    n, d = points.shape
    if n < 2:
        raise ValueError("need at least 2 points")
    values, label_rows, order = _answer_rows(points, h, kind)
    lifted = lift_points(points)
    rank = np.argsort(np.argsort(values, kind="stable"))
    candidates = sorted(range(n), key=lambda i: abs(rank[i] - (n - 1) / 2))
    for i in candidates:
        rows = [np.delete(label_rows, i, axis=0)]
        if kind is QueryKind.COMPARISON:
            rest = [j for j in order if j != i]
            if len(rest) >= 2:
                hi = lifted[rest[1:]].copy()
                lo = lifted[rest[:-1]].copy()
                rows.append(hi - lo)  # h(next) >= h(prev) along sorted order
        c = ConstraintSet(d, np.vstack(rows), margin=margin)
        if c.infer(points[i]) is not Verdict.UNKNOWN:
            return True
    return False


def estimate_avg_inference_dimension(
    spec: DistributionSpec,
    n: int,
    trials: int,
    kind: QueryKind,
    seed: int,
    classifier: str = "tangent",
) -> GEstimate:
    """Monte Carlo estimate of the probability that no point of an n-sample is
    inferable from the rest, under the configured classifier family."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = spec.dimension
    failures = 0
    for t in range(trials):
        rng = make_rng(seed, n, t)
        pts = sample(spec, rng, n)
        if classifier == "tangent":
            h = sample_tangent_hyperplane(d, rng)
        elif classifier == "uniform":
            v = rng.standard_normal(d)
            h = Hyperplane(v, float(rng.uniform(-1.0, 1.0)))
        else:
            raise ValueError(f"unknown classifier family {classifier!r}")
        if not has_inferable_point(pts, h, kind):
            failures += 1
    return GEstimate(
        n=n,
        trials=trials,
        failures=failures,
        g_hat=failures / trials,
        wilson_interval=wilson_interval(failures, trials),
    )


def coverage_records_rows(points: np.ndarray, h: Hyperplane, kind: QueryKind) -> np.ndarray:
    """Constraint rows for a fully queried training sample."""
    values, label_rows, order = _answer_rows(points, h, kind)
    rows = [label_rows]
    if order is not None and len(order) >= 2:
        lifted = lift_points(points)
        rows.append(lifted[order[1:]] - lifted[order[:-1]])
    return np.vstack(rows)


def estimate_coverage(
    spec: DistributionSpec,
    n: int,
    trials: int,
    kind: QueryKind,
    seed: int,
    n_test: int = 10_000,
    classifier: str = "tangent",
) -> tuple[float, tuple[float, float]]:
    """Mean fraction of fresh points whose label the record set forces."""
    d = spec.dimension
    covered = 0
    total = 0
    for t in range(trials):
        rng = make_rng(seed, t)
        pts = sample(spec, rng, n)
        if classifier == "tangent":
            h = sample_tangent_hyperplane(d, rng)
        else:
            h = Hyperplane(rng.standard_normal(d), float(rng.uniform(-1.0, 1.0)))
        c = ConstraintSet(d, coverage_records_rows(pts, h, kind))
        fresh = sample(spec, rng, n_test)
        for z in fresh:
            if c.infer(z) is not Verdict.UNKNOWN:
                covered += 1
        total += n_test
    mean = covered / total if total else 0.0
    return mean, wilson_interval(covered, total)


_MODELS = ("log", "log2", "linear", "power")


def fit_growth(xs, ys) -> FitReport:
    """Least-squares fits of y against {a + b log x, a + b log^2 x, a + b x,
    a x^c}; the preferred model minimizes residual sum of squares."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 4:
        raise ValueError("need at least 4 points to fit")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    if np.any(xs <= 0):
        raise ValueError("xs must be positive")
    residuals: dict[str, float] = {}
    for name, feat in (("log", np.log(xs)), ("log2", np.log(xs) ** 2), ("linear", xs)):
        a = np.vstack([np.ones_like(xs), feat]).T
        coef, *_ = np.linalg.lstsq(a, ys, rcond=None)
        residuals[name] = float(np.sum((a @ coef - ys) ** 2))
    # power law via log-log regression, residuals measured in original scale
    if np.all(ys > 0):
        a = np.vstack([np.ones_like(xs), np.log(xs)]).T
        coef, *_ = np.linalg.lstsq(a, np.log(ys), rcond=None)
        pred = np.exp(a @ coef)
        residuals["power"] = float(np.sum((pred - ys) ** 2))
    else:
        residuals["power"] = float("inf")
    preferred = min(residuals, key=residuals.get)
    return FitReport(models=residuals, preferred=preferred)


def fit_power_exponent(xs, ys) -> float:
    """Exponent c of the least-squares power-law fit y = a x^c."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    a = np.vstack([np.ones_like(xs), np.log(xs)]).T
    coef, *_ = np.linalg.lstsq(a, np.log(ys), rcond=None)
    return float(coef[1])
