"""Point location in hyperplane arrangements via the duality swap.

Each hyperplane h_i = <v_i,.> + b_i becomes a dual item (v_i, b_i) in d+1
coordinates and the query point x becomes the hidden classifier with weight
(x, 1): a dual label query returns sign(h_i(x)) and a dual comparison returns
sign(h_i(x) - h_j(x)). Running the reliable doubling learner over the dual
items yields every sign either queried or inferred, hence exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Hyperplane, Sign
from .distributions import DistributionSpec, make_rng, sample, uniform_ball
from .oracle import Oracle, QueryKind
from .rpu import RpuParams, perfect_learning


@dataclass(frozen=True)
class Arrangement:
    hyperplanes: tuple[Hyperplane, ...]
    dimension: int

    def __post_init__(self):
        if not self.hyperplanes:
            raise ValueError("arrangement must be nonempty")
        if any(h.dim != self.dimension for h in self.hyperplanes):
            raise ValueError("arrangement hyperplanes must share one dimension")

    @property
    def size(self) -> int:
        return len(self.hyperplanes)

    def dual_items(self) -> np.ndarray:
        """(v_i, b_i) rows: the hyperplanes as points of the dual problem."""
        return np.array([h.weights() for h in self.hyperplanes])


@dataclass
class CellSignature:
    signs: list[Sign]
    depth: int  # total label + comparison queries used


def locate(
    x: np.ndarray,
    arr: Arrangement,
    params: RpuParams,
    rng: np.random.Generator,
) -> CellSignature:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != arr.dimension:
        raise ValueError("point dimension does not match the arrangement")
    dual_hidden = Hyperplane(np.append(x, 1.0), 0.0)
    dual_oracle = Oracle(dual_hidden)
    outcome = perfect_learning(arr.dual_items(), QueryKind.COMPARISON, params, dual_oracle, rng)
    return CellSignature(signs=list(outcome.labels), depth=dual_oracle.ledger.total)


def sample_arrangement(
    spec: DistributionSpec, n: int, rng: np.random.Generator
) -> Arrangement:
    """n hyperplanes with normals drawn from spec and standard normal offsets,
    so the dual items are drawn from a nice (d+1)-dimensional distribution."""
    normals = sample(spec, rng, n)
    offsets = rng.standard_normal(n)
    planes = tuple(Hyperplane(v, b) for v, b in zip(normals, offsets))
    return Arrangement(planes, spec.dimension)


def depth_experiment(
    spec: DistributionSpec,
    n_grid: list[int],
    trials: int,
    seed: int,
    params: RpuParams | None = None,
) -> list[tuple[int, float, float]]:
    """Seeded Monte Carlo of locate depth: (n, mean depth, std) per grid point.

    The query point is drawn from the unit ball; sign vectors are verified
    against direct evaluation every trial."""
    params = params or RpuParams()
    results = []
    ball = uniform_ball(spec.dimension)
    for gi, n in enumerate(n_grid):
        depths = []
        for t in range(trials):
            rng = make_rng(seed, gi, t)
            arr = sample_arrangement(spec, n, rng)
            x = sample(ball, rng, 1)[0]
            sig = locate(x, arr, params, rng)
            values = np.array([h.normal @ x + h.offset for h in arr.hyperplanes])
            expect = [Sign.POSITIVE if v >= 0 else Sign.NEGATIVE for v in values]
            if sig.signs != expect:
                raise AssertionError("point location returned an incorrect sign vector")
            depths.append(sig.depth)
        depths = np.array(depths, dtype=float)
        results.append((n, float(depths.mean()), float(depths.std())))
    return results
