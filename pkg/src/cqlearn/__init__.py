"""Active learning of linear separators with label and comparison queries."""

from .core import (
    AffineMap,
    Hyperplane,
    Sign,
    apply_affine,
    evaluate,
    lift_difference,
    lift_point,
    transform_hyperplane,
)
from .distributions import DistributionSpec, gaussian, isotropize, make_rng, sample, uniform_ball
from .inference import ConstraintSet, Verdict
from .oracle import Oracle, QueryKind, QueryLedger, QueryRecord

__all__ = [
    "AffineMap",
    "ConstraintSet",
    "DistributionSpec",
    "Hyperplane",
    "Oracle",
    "QueryKind",
    "QueryLedger",
    "QueryRecord",
    "Sign",
    "Verdict",
    "apply_affine",
    "evaluate",
    "gaussian",
    "isotropize",
    "lift_difference",
    "lift_point",
    "make_rng",
    "sample",
    "transform_hyperplane",
    "uniform_ball",
]

__version__ = "0.1.0"
