"""Seeded samplers for instance distributions and hidden classifiers.

Every sampler takes a numpy Generator; trials derive independent substreams
from a (seed, stream) pair so parallel runs stay reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import AffineMap, Hyperplane, apply_affine_many

KINDS = ("ball", "gaussian", "polytope", "affine")


class DegenerateSample(ValueError):
    pass


@dataclass(frozen=True)
class DistributionSpec:
    """Instance distribution: uniform unit ball, standard Gaussian, uniform
    over a convex polytope {x : A x <= b} (sampled by rejection from a bounding
    box), or an affine image of an inner spec."""

    kind: str
    dimension: int
    inner: Optional["DistributionSpec"] = None
    map: Optional[AffineMap] = None
    # polytope only: constraints A x <= b and a bounding box [lo, hi]^d
    poly_a: Optional[np.ndarray] = None
    poly_b: Optional[np.ndarray] = None
    box_lo: float = -1.0
    box_hi: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind == "affine":
            if self.inner is None or self.map is None:
                raise ValueError("affine spec needs an inner spec and a map")
            if self.map.dim != self.dimension or self.inner.dimension != self.dimension:
                raise ValueError("affine spec dimensions must agree")
        if self.kind == "polytope" and (self.poly_a is None or self.poly_b is None):
            raise ValueError("polytope spec needs poly_a and poly_b")


def uniform_ball(d: int) -> DistributionSpec:
    return DistributionSpec("ball", d)


def gaussian(d: int) -> DistributionSpec:
    return DistributionSpec("gaussian", d)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic substream keyed by (seed, stream indices)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def sample(spec: DistributionSpec, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Draw `size` points; returns an array of shape (size, d)."""
    d = spec.dimension
    if spec.kind == "gaussian":
        return rng.standard_normal((size, d))
    if spec.kind == "ball":
        # normalized Gaussian direction times radius U^{1/d}
        g = rng.standard_normal((size, d))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        radii = rng.random((size, 1)) ** (1.0 / d)
        return g / norms * radii
    if spec.kind == "affine":
        return apply_affine_many(spec.map, sample(spec.inner, rng, size))
    # polytope: rejection from the bounding box
    out = np.empty((size, d))
    got = 0
    while got < size:
        batch = rng.uniform(spec.box_lo, spec.box_hi, size=(max(64, 4 * (size - got)), d))
        ok = np.all(batch @ spec.poly_a.T <= spec.poly_b, axis=1)
        accepted = batch[ok]
        take = min(size - got, accepted.shape[0])
        out[got : got + take] = accepted[:take]
        got += take
    return out


def sample_difference(spec: DistributionSpec, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """x - y for independent x, y ~ spec."""
    return sample(spec, rng, size) - sample(spec, rng, size)


def sample_difference_pairs(
    spec: DistributionSpec, rng: np.random.Generator, size: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """The underlying (x, y) pairs, for callers that must query an oracle on them."""
    return sample(spec, rng, size), sample(spec, rng, size)


def sample_tangent_hyperplane(d: int, rng: np.random.Generator) -> Hyperplane:
    """Uniform over hyperplanes tangent to the unit ball; the ball interior is
    on the Positive side."""
    u = rng.standard_normal(d)
    norm = np.linalg.norm(u)
    while norm == 0:
        u = rng.standard_normal(d)
        norm = np.linalg.norm(u)
    u = u / norm
    # <u, x> = 1 is the tangent plane; h(x) = 1 - <u, x> is positive inside.
    return Hyperplane(-u, 1.0)


def isotropize(points: np.ndarray) -> AffineMap:
    """Empirical whitening: the affine map sending the sample mean to 0 and the
    sample covariance to the identity."""
    points = np.asarray(points, dtype=float)
    n, d = points.shape
    if n < d + 1:
        raise DegenerateSample(f"need at least d+1={d + 1} points, got {n}")
    mu = points.mean(axis=0)
    cov = np.cov(points, rowvar=False).reshape(d, d)
    evals, evecs = np.linalg.eigh(cov)
    if np.min(evals) <= 1e-12 * max(np.max(evals), 1.0):
        raise DegenerateSample("empirical covariance is singular")
    w = evecs @ np.diag(evals**-0.5) @ evecs.T
    return AffineMap(w, -w @ mu)


def isotropizing_map(spec: DistributionSpec) -> Optional[AffineMap]:
    """The exact whitening map when the spec carries one; None when the learner
    would have to fall back on empirical whitening."""
    if spec.kind in ("ball", "gaussian"):
        return AffineMap.identity(spec.dimension)
    if spec.kind == "affine":
        inner = isotropizing_map(spec.inner)
        if inner is None:
            return None
        outer = spec.map.inverse()
        return AffineMap(inner.matrix @ outer.matrix, inner.matrix @ outer.shift + inner.shift)
    return None
