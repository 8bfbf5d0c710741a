"""Version-space engine: query records as linear constraints on the lifted
weight vector, with LP feasibility deciding whether a point's label is forced.

The version space is the cone {w : <w, row> >= 0 for all rows} intersected
with the box ||w||_inf <= 1 (sign constraints are scale invariant, so the box
is semantically neutral). A point z is inferred positive when no consistent w
labels it negative with margin tau, i.e. min_w <w, lift(z)> > -tau.

Witnesses (consistent weight vectors discovered by earlier solves) are cached:
a pair of witnesses disagreeing on z settles the verdict Unknown without an LP.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import DimensionMismatch, Sign, lift_point
from .oracle import QueryRecord

# strict margin for the opposite-sign feasibility test; config-exposed
DEFAULT_MARGIN = 1e-7
# slack allowed when checking that a weight satisfies the recorded rows
SATISFACTION_SLACK = 1e-9
# solver tolerances kept well below the margin so tau-sized contradictions
# cannot hide inside the LP's feasibility slack
_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class SolverError(RuntimeError):
    pass


class Verdict(Enum):
    INFERRED_POSITIVE = 1
    INFERRED_NEGATIVE = -1
    UNKNOWN = 0

    def to_sign(self) -> Sign | None:
        if self is Verdict.UNKNOWN:
            return None
        return Sign(self.value)


def record_row(r: QueryRecord) -> np.ndarray:
    """The constraint row <w, row> >= 0 encoding one answered query."""
    if r.answer is Sign.NEGATIVE:
        return -r.subject
    return r.subject


class ConstraintSet:
    """Accumulated consistency cone; immutable from the caller's view.

    The witness cache is an internal accelerator only: every cached w is a
    genuinely feasible weight for the current rows, so screening with it never
    changes a verdict, only skips solves.
    """

    def __init__(self, dimension: int, rows: np.ndarray | None = None, margin: float = DEFAULT_MARGIN):
        self.dimension = dimension
        width = dimension + 1
        if rows is None:
            rows = np.empty((0, width))
        rows = np.asarray(rows, dtype=float).reshape(-1, width)
        self.rows = rows
        self.margin = margin
        self._witnesses: list[np.ndarray] = []

    @classmethod
    def from_records(
        cls, dimension: int, records: Iterable[QueryRecord], margin: float = DEFAULT_MARGIN
    ) -> "ConstraintSet":
        recs = list(records)
        rows = (
            np.array([record_row(r) for r in recs])
            if recs
            else np.empty((0, dimension + 1))
        )
        return cls(dimension, rows, margin)

    def add_record(self, r: QueryRecord) -> "ConstraintSet":
        return self.add_records([r])

    def add_records(self, records: Sequence[QueryRecord]) -> "ConstraintSet":
        for r in records:
            if r.subject.shape[0] != self.dimension + 1:
                raise DimensionMismatch(
                    f"record has lifted length {r.subject.shape[0]}, expected {self.dimension + 1}"
                )
        new_rows = np.array([record_row(r) for r in records]).reshape(-1, self.dimension + 1)
        out = ConstraintSet(self.dimension, np.vstack([self.rows, new_rows]), self.margin)
        # witnesses still satisfying the enlarged cone carry over
        for w in self._witnesses:
            if np.all(new_rows @ w >= 0.0):
                out._witnesses.append(w)
        return out

    def satisfied_by(self, w: np.ndarray, slack: float = SATISFACTION_SLACK) -> bool:
        return self.rows.shape[0] == 0 or bool(np.all(self.rows @ w >= -slack))

    # -- LP kernels ---------------------------------------------------------

    def feasible(self, extra: Sequence[np.ndarray] = ()) -> bool:
        """Is there w in the box with all rows >= 0 and all extra rows >= margin?"""
        width = self.dimension + 1
        extra_rows = np.asarray(list(extra), dtype=float).reshape(-1, width)
        a_ub = np.vstack([-self.rows, -extra_rows])
        b_ub = np.concatenate(
            [np.zeros(self.rows.shape[0]), np.full(extra_rows.shape[0], -self.margin)]
        )
        res = linprog(
            np.zeros(width),
            A_ub=a_ub,
            b_ub=b_ub,
            bounds=[(-1.0, 1.0)] * width,
            method="highs",
            options=_LP_OPTIONS,
        )
        if res.status == 0:
            self._remember(res.x)
            return True
        if res.status == 2:
            return False
        raise SolverError(f"LP solver failed with status {res.status}: {res.message}")

    def _extremize(self, direction: np.ndarray, minimize: bool) -> float:
        """min (or max) of <w, direction> over the version space; caches the
        optimizing w as a witness."""
        c = direction if minimize else -direction
        res = linprog(
            c,
            A_ub=-self.rows if self.rows.shape[0] else None,
            b_ub=np.zeros(self.rows.shape[0]) if self.rows.shape[0] else None,
            bounds=[(-1.0, 1.0)] * (self.dimension + 1),
            method="highs",
            options=_LP_OPTIONS,
        )
        if res.status != 0:
            raise SolverError(f"LP solver failed with status {res.status}: {res.message}")
        self._remember(res.x)
        value = float(direction @ res.x)
        return value

    def _remember(self, w: np.ndarray) -> None:
        if len(self._witnesses) < 256:
            self._witnesses.append(np.asarray(w, dtype=float))

    # -- inference ----------------------------------------------------------

    def infer(self, z: np.ndarray) -> Verdict:
        return self.infer_lifted(lift_point(z))

    def infer_lifted(self, lz: np.ndarray) -> Verdict:
        if lz.shape[0] != self.dimension + 1:
            raise DimensionMismatch(
                f"lifted point has length {lz.shape[0]}, expected {self.dimension + 1}"
            )
        tau = self.margin
        neg_possible = None
        pos_possible = None
        if self._witnesses:
            vals = np.array(self._witnesses) @ lz
            if np.any(vals <= -tau):
                neg_possible = True
            if np.any(vals >= tau):
                pos_possible = True
            if neg_possible and pos_possible:
                return Verdict.UNKNOWN
        try:
            if neg_possible is None:
                neg_possible = self._extremize(lz, minimize=True) <= -tau
            if not neg_possible:
                return Verdict.INFERRED_POSITIVE
            if pos_possible is None:
                pos_possible = self._extremize(lz, minimize=False) >= tau
            if not pos_possible:
                return Verdict.INFERRED_NEGATIVE
        except SolverError:
            return Verdict.UNKNOWN
        return Verdict.UNKNOWN

    def infer_batch(self, zs: np.ndarray) -> list[Verdict]:
        """Pointwise infer; the shared witness cache makes later points cheap."""
        return [self.infer(z) for z in np.asarray(zs, dtype=float)]


def infer(c: ConstraintSet, z: np.ndarray) -> Verdict:
    return c.infer(z)


def infer_batch(c: ConstraintSet, zs: np.ndarray) -> list[Verdict]:
    return c.infer_batch(zs)
