"""PAC learners.

comparison_pool_pac learns a non-homogeneous separator by first learning the
normal direction from comparison answers on point differences (the difference
of two evaluations cancels the offset, so comparisons are labels on a
homogeneous problem), then locating the offset by projecting a pool onto the
learned normal and binary-searching labels along the sorted projections. The
shift is the median over independent repeats.

balcan_long is the margin-based localization subroutine for the homogeneous
direction: each round restricts sampling to a shrinking band around the
current hypothesis and refits a max-margin consistent separator.

label_mqs_pac_2d is the label-only membership-query learner for the uniform
unit disk: regular boundary probes plus binary search on the two crossing
arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .core import AffineMap, Hyperplane, Sign, apply_affine, apply_affine_many
from .distributions import (
    DistributionSpec,
    isotropize,
    isotropizing_map,
    sample,
    sample_difference_pairs,
)
from .oracle import Oracle, QueryKind, QueryLedger


@dataclass
class PacParams:
    epsilon: float = 0.05
    delta: float = 0.1
    pool_factor: float = 40.0  # N = ceil(pool_factor / epsilon) per shift round
    median_factor: float = 3.0  # repeats = ceil(median_factor * log(1/delta))
    bl_samples_per_round: int = 120
    bl_band_scale: float = 1.0  # band width C_b * 2^{-k}
    bl_reject_budget: int = 200_000
    whitening_budget: int = 2_000  # unlabeled points for empirical whitening
    threshold_pad: float = 1e-6

    def __post_init__(self):
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise ValueError("epsilon and delta must lie in (0,1)")


@dataclass
class PacOutcome:
    hypothesis: Hyperplane
    ledger: QueryLedger
    measured_error: float | None = None
    flags: list[str] = field(default_factory=list)


def _max_margin_direction(zs: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Unit vector maximizing the min of sign_i * <u, z_i> over the inf-ball.

    LP in (u, t): maximize t subject to sign_i <u, z_i> >= t, |u_j| <= 1.
    Realizable data keeps t > 0; the normalized u is a consistent separator.
    """
    n, d = zs.shape
    a_ub = np.hstack([-(signs[:, None] * zs), np.ones((n, 1))])
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=np.zeros(n),
        bounds=[(-1.0, 1.0)] * d + [(None, None)],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"direction LP failed: status {res.status}")
    u = res.x[:d]
    norm = np.linalg.norm(u)
    if norm == 0:
        raise RuntimeError("direction LP returned the zero vector")
    return u / norm


def balcan_long(
    difference_sampler,
    comparison_oracle,
    eps_prime: float,
    delta: float,
    rng: np.random.Generator,
    params: PacParams | None = None,
) -> tuple[np.ndarray, list[str]]:
    """Learn the homogeneous direction from comparison answers on differences.

    difference_sampler(rng, size) -> (xs, ys) point pairs;
    comparison_oracle(x, y) -> Sign of h(x) - h(y).

    Rounds k = 0..s with band width band_scale * 2^{-k}: sample difference
    points whose projection onto the current hypothesis falls in the band,
    query their comparison labels, refit the max-margin direction on all
    labeled data so far. s is chosen so the final band is about eps_prime.
    """
    params = params or PacParams()
    flags: list[str] = []
    s = max(1, math.ceil(math.log2(params.bl_band_scale / max(eps_prime, 1e-12))))
    m = params.bl_samples_per_round
    zs_all: list[np.ndarray] = []
    signs_all: list[float] = []
    u = None
    for k in range(s + 1):
        band = None if k == 0 else params.bl_band_scale * 2.0 ** -(k - 1)
        collected = 0
        attempts = 0
        while collected < m and attempts < params.bl_reject_budget:
            batch = max(m - collected, 16)
            xs, ys = difference_sampler(rng, batch)
            zs = xs - ys
            attempts += batch
            if band is not None:
                keep = np.abs(zs @ u) <= band
                xs, ys, zs = xs[keep], ys[keep], zs[keep]
            for x, y, z in zip(xs, ys, zs):
                if collected >= m:
                    break
                rec = comparison_oracle(x, y)
                zs_all.append(z)
                signs_all.append(float(rec.answer.value) or 1.0)
                collected += 1
        if collected == 0:
            flags.append(f"band starvation at round {k}")
            break
        u = _max_margin_direction(np.array(zs_all), np.array(signs_all))
    return u, flags


def project(points: np.ndarray, u: np.ndarray) -> np.ndarray:
    """<u, x> per point, order preserving."""
    points = np.asarray(points, dtype=float)
    if points.shape[1] != u.shape[0]:
        raise ValueError("dimension mismatch in project")
    return points @ u


def threshold(
    points: np.ndarray,
    u: np.ndarray,
    label_oracle,
    pad: float = 1e-6,
) -> tuple[float, list[str]]:
    """Binary-search a consistent threshold along projections sorted on u.

    label_oracle(x) -> Sign. Returns the shift b' for hypothesis <u,.> + b'.
    Queries the lowest projection once, then bisects for the first rank whose
    label differs: <= ceil(log2 N) + 1 label queries. A one-sided sample falls
    out when the search exhausts the list.
    """
    flags: list[str] = []
    proj = project(points, u)
    order = np.argsort(proj, kind="stable")
    sorted_proj = proj[order]
    n = len(order)
    answers: dict[int, Sign] = {}

    def label_at(rank: int) -> Sign:
        if rank not in answers:
            answers[rank] = label_oracle(points[order[rank]]).answer
        return answers[rank]

    s_lo = label_at(0)
    lo, hi = 0, n  # first rank with a label other than s_lo lies in (lo, hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if label_at(mid) is s_lo:
            lo = mid
        else:
            hi = mid
    if hi == n:
        # one-sided sample: place the threshold beyond the extreme projection
        if s_lo is Sign.POSITIVE:
            return -(sorted_proj[0] - pad), flags
        return -(sorted_proj[-1] + pad), flags
    if s_lo is Sign.POSITIVE:
        # positives below the crossing: u is (nearly) inverted; the median of
        # repeats absorbs the occasional bad round
        flags.append("inverted threshold orientation")
    crossing = 0.5 * (sorted_proj[lo] + sorted_proj[hi])
    return -crossing, flags


def comparison_pool_pac(
    spec: DistributionSpec,
    params: PacParams,
    oracle: Oracle,
    rng: np.random.Generator,
) -> PacOutcome:
    """Fig-style pipeline: whiten, learn the direction on differences, then
    repeat draw/project/threshold and take the median shift."""
    flags: list[str] = []
    white = isotropizing_map(spec)
    if white is None:
        white = isotropize(sample(spec, rng, params.whitening_budget))
        flags.append("empirical whitening")

    def diff_sampler(r, size):
        xs, ys = sample_difference_pairs(spec, r, size)
        return apply_affine_many(white, xs), apply_affine_many(white, ys)

    def comp_oracle(x, y):
        inv = white.inverse()
        return oracle.comparison_query(apply_affine(inv, x), apply_affine(inv, y))

    eps = params.epsilon
    eps_prime = eps / max(math.log(1.0 / eps), 1.0)
    u, bl_flags = balcan_long(diff_sampler, comp_oracle, eps_prime, params.delta, rng, params)
    flags.extend(bl_flags)

    n_pool = math.ceil(params.pool_factor / eps)
    repeats = max(1, math.ceil(params.median_factor * math.log(1.0 / params.delta)))
    shifts = []
    for _ in range(repeats):
        pool = sample(spec, rng, n_pool)
        pool_white = apply_affine_many(white, pool)
        # label_oracle works on whitened coordinates; map back for the query
        inv = white.inverse()
        shift, t_flags = threshold(
            pool_white, u, lambda x: oracle.label_query(apply_affine(inv, x)), params.threshold_pad
        )
        flags.extend(t_flags)
        shifts.append(shift)
    b_white = float(np.median(shifts))
    # hypothesis <u, Wx + s> + b' pulled back to original coordinates
    v = white.matrix.T @ u
    b = float(u @ white.shift + b_white)
    return PacOutcome(Hyperplane(v, b), oracle.ledger, flags=flags)


def label_mqs_pac_2d(
    eps: float,
    oracle: Oracle,
    boundary_factor: float = 3.0,
) -> PacOutcome:
    """Label-only MQS learner for the uniform unit disk (d=2).

    Probes k = ceil(boundary_factor * eps^{-1/3}) regular boundary points; on a
    sign change, binary-searches each of the two crossing arcs down to eps/2
    arc length and outputs the line through the two located crossings.
    """
    if oracle.dim != 2:
        raise ValueError("label_mqs_pac_2d requires a 2-D oracle")
    k = max(3, math.ceil(boundary_factor * eps ** (-1.0 / 3.0)))
    angles = 2.0 * math.pi * np.arange(k) / k
    bpts = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    labels = [oracle.label_query(p).answer for p in bpts]
    flips = [i for i in range(k) if labels[i] is not labels[(i + 1) % k]]
    if not flips:
        # whole boundary one sign: a separator cutting the disk would flip some
        # edge unless its cap is smaller than one polygon cap (< eps mass)
        s = 1.0 if labels[0] is Sign.POSITIVE else -1.0
        return PacOutcome(Hyperplane(np.array([0.0, s]), 2.0 * s), oracle.ledger)

    def bisect_arc(i: int) -> float:
        a, b = angles[i], angles[i] + 2.0 * math.pi / k
        sa = labels[i]
        while b - a > eps / 2.0:
            mid = 0.5 * (a + b)
            s_mid = oracle.label_query(np.array([math.cos(mid), math.sin(mid)])).answer
            if s_mid is sa:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    t1, t2 = bisect_arc(flips[0]), bisect_arc(flips[1])
    p1 = np.array([math.cos(t1), math.sin(t1)])
    p2 = np.array([math.cos(t2), math.sin(t2)])
    direction = p2 - p1
    if np.linalg.norm(direction) < 1e-12:
        direction = np.array([1.0, 0.0])
    normal = np.array([-direction[1], direction[0]])
    offset = -float(normal @ p1)
    h = Hyperplane(normal, offset)
    # orient so a probed point away from the boundary line agrees with its label
    values = bpts @ h.normal + h.offset
    ref = int(np.argmax(np.abs(values)))
    if (values[ref] > 0) != (labels[ref] is Sign.POSITIVE):
        h = Hyperplane(-h.normal, -h.offset)
    return PacOutcome(h, oracle.ledger)
