"""Geometry primitives: hyperplanes, signs, homogeneous lifting, affine maps.

Points are plain 1-D numpy arrays of length d. A hyperplane h(x) = <normal, x>
+ offset is stored in canonical form with a unit normal, so that equality of
hypotheses and LP scaling are well behaved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# |h(x)| below this is reported as Sign.ZERO; a probability-zero event for
# continuous data, but floating arithmetic needs a rule.
ZERO_TOL = 1e-12


class Sign(Enum):
    POSITIVE = 1
    NEGATIVE = -1
    ZERO = 0

    def flipped(self) -> "Sign":
        return Sign(-self.value)


def sign_of(value: float) -> Sign:
    if abs(value) < ZERO_TOL:
        return Sign.ZERO
    return Sign.POSITIVE if value > 0 else Sign.NEGATIVE


class DimensionMismatch(ValueError):
    pass


class InvalidMap(ValueError):
    pass


def _check_dim(got: int, want: int) -> None:
    if got != want:
        raise DimensionMismatch(f"dimension mismatch: got {got}, expected {want}")


@dataclass(frozen=True)
class Hyperplane:
    """h(x) = <normal, x> + offset, with ||normal|| = 1."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float)
        if not np.all(np.isfinite(normal)) or not np.isfinite(self.offset):
            raise ValueError("hyperplane entries must be finite")
        norm = float(np.linalg.norm(normal))
        if norm == 0.0:
            raise ValueError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", normal / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)
        self.normal.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def weights(self) -> np.ndarray:
        """The lifted weight vector (normal, offset) in d+1 coordinates."""
        return np.append(self.normal, self.offset)


def evaluate(h: Hyperplane, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    _check_dim(x.shape[0], h.dim)
    return float(h.normal @ x + h.offset)


def evaluate_many(h: Hyperplane, xs: np.ndarray) -> np.ndarray:
    """Vectorized evaluate over rows of xs."""
    xs = np.asarray(xs, dtype=float)
    _check_dim(xs.shape[1], h.dim)
    return xs @ h.normal + h.offset


def lift_point(x: np.ndarray) -> np.ndarray:
    """(x, 1): label queries become sign constraints on the lifted weight."""
    return np.append(np.asarray(x, dtype=float), 1.0)


def lift_difference(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(x - y, 0): a comparison on (x, y) is a label on the difference."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_dim(y.shape[0], x.shape[0])
    return np.append(x - y, 0.0)


def lift_points(xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    return np.hstack([xs, np.ones((xs.shape[0], 1))])


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + shift, with invertible matrix."""

    matrix: np.ndarray
    shift: np.ndarray
    condition_cap: float = field(default=1e12, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        s = np.asarray(self.shift, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or s.shape != (m.shape[0],):
            raise InvalidMap("matrix must be square and shift of matching length")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(s))):
            raise InvalidMap("affine map entries must be finite")
        cond = np.linalg.cond(m)
        if not np.isfinite(cond) or cond > self.condition_cap:
            raise InvalidMap(f"matrix is singular or ill-conditioned (cond={cond:.3g})")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shift", s)
        m.setflags(write=False)
        s.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, d: int) -> "AffineMap":
        return cls(np.eye(d), np.zeros(d))

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.matrix)
        return AffineMap(inv, -inv @ self.shift)


def apply_affine(m: AffineMap, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _check_dim(x.shape[0], m.dim)
    return m.matrix @ x + m.shift


def apply_affine_many(m: AffineMap, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    _check_dim(xs.shape[1], m.dim)
    return xs @ m.matrix.T + m.shift


def transform_hyperplane(m: AffineMap, h: Hyperplane) -> Hyperplane:
    """The hyperplane h' with sign(h'(m(x))) = sign(h(x)) for all x."""
    _check_dim(h.dim, m.dim)
    v = np.linalg.solve(m.matrix.T, h.normal)
    b = h.offset - v @ m.shift
    return Hyperplane(v, b)
