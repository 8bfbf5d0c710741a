"""Reliable learners.

perfect_learning is the experimental doubling algorithm: repeatedly draw a
subsample of the uninferred points, answer all queries of the configured kind
on the cumulative subsample, infer what those answers force, and double the
subsample size whenever a round resolves less than half of what remained. The
residual is label-queried directly, so every point ends with a definite sign
and no point is ever mislabeled.

pool_rpu_learn is the fixed-subsample T-round variant used by the theoretical
pool learner; passive_rpu_predict is plain inference from a frozen record set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Sign, lift_point
from .inference import ConstraintSet, Verdict
from .oracle import Oracle, QueryKind, QueryLedger, QueryRecord

# residual sizes below which the doubling loop stops and queries directly
RESIDUAL_THRESHOLD = {QueryKind.LABEL: 1, QueryKind.COMPARISON: 2}


@dataclass
class RpuParams:
    initial_subsample: int | None = None  # default d+1
    rounds_t: int | None = None  # pool learner only; default ceil(log2(n/eps))
    epsilon: float = 0.05
    delta: float = 0.1
    pool_constant: float = 10.0  # c in k = ceil(c d log(d+1) log n)
    margin: float = 1e-7

    def __post_init__(self):
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise ValueError("epsilon and delta must lie in (0,1)")
        if self.initial_subsample is not None and self.initial_subsample < 1:
            raise ValueError("initial_subsample must be >= 1")


@dataclass
class RpuOutcome:
    labels: list[Sign | None]
    ledger: QueryLedger
    rounds_used: int
    subsample_trace: list[tuple[int, int, int]]  # (round, subsample_size, inferred)
    inferred_count: int = 0  # points resolved without a direct label query on them
    queried_count: int = 0  # points resolved by their own label query


class _Run:
    """Shared state for one learning run over a fixed point set."""

    def __init__(self, points: np.ndarray, kind: QueryKind, params: RpuParams, oracle: Oracle):
        self.points = np.asarray(points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise ValueError("sample must be a nonempty (n, d) array")
        if self.points.shape[1] != oracle.dim:
            raise ValueError("sample dimension does not match the oracle")
        self.kind = kind
        self.params = params
        self.oracle = oracle
        self.n, self.d = self.points.shape
        self.labels: list[Sign | None] = [None] * self.n
        self.constraints = ConstraintSet(self.d, margin=params.margin)
        self.sorted_order: list[int] = []  # cumulative subsample, ascending in value
        self.subsample_list: list[int] = []
        self.trace: list[tuple[int, int, int]] = []
        self.queried_count = 0

    def query_round(self, new_idx: list[int]) -> None:
        """Answer all queries of the configured kind on the extended cumulative
        subsample.

        Label kind: one label query per new point. Comparison kind: sort the
        new points, merge them into the cumulative sorted order, then resolve
        every label along that order. Labels are monotone in the hidden value
        (Negative then Positive), so answering all of them costs only a
        binary search over the points not already pinned by a known neighbor;
        the rest are implied answers at zero oracle cost, matching the
        answer-all-queries accounting of a sorted sample.
        """
        if self.kind is QueryKind.LABEL:
            records: list[QueryRecord] = []
            for i in new_idx:
                rec = self.oracle.label_query(self.points[i])
                records.append(rec)
                self.labels[i] = rec.answer
                self.queried_count += 1
        else:
            records = []
            if new_idx:
                perm, recs = self.oracle.sort_by_value(self.points[new_idx])
                records.extend(recs)
                new_sorted = [new_idx[p] for p in perm]
                if self.sorted_order:
                    self.sorted_order, merge_recs = self.oracle.merge_sorted(
                        self.points, self.sorted_order, new_sorted
                    )
                    records.extend(merge_recs)
                else:
                    self.sorted_order = new_sorted
                records.extend(self._resolve_labels_sorted(new_idx))
        self.subsample_list.extend(new_idx)
        self.constraints = self.constraints.add_records(records)

    def _resolve_labels_sorted(self, new_idx: list[int]) -> list[QueryRecord]:
        """Labels for the new points along the cumulative sorted order.

        A point below a known Negative is Negative, one above a known Positive
        is Positive; the ambiguous middle stretch gets its sign boundary by a
        galloping search of label queries from the low end (the boundary tends
        to hug the known anchors)."""
        order = self.sorted_order
        last_neg = -1
        first_pos = len(order)
        for pos, i in enumerate(order):
            if self.labels[i] is Sign.NEGATIVE:
                last_neg = max(last_neg, pos)
            elif self.labels[i] is Sign.POSITIVE:
                first_pos = min(first_pos, pos)
        ambiguous = [
            pos for pos, i in enumerate(order)
            if self.labels[i] is None and last_neg < pos < first_pos
        ]
        for pos, i in enumerate(order):
            if self.labels[i] is None and pos not in ambiguous:
                self.labels[i] = Sign.NEGATIVE if pos < first_pos else Sign.POSITIVE
        def ask(k: int) -> bool:
            rec = self.oracle.label_query(self.points[order[ambiguous[k]]])
            self.labels[order[ambiguous[k]]] = rec.answer
            self.queried_count += 1
            return rec.answer is Sign.POSITIVE

        n_amb = len(ambiguous)
        lo, base, step = n_amb, 0, 1
        while base < n_amb:
            probe = min(base + step - 1, n_amb - 1)
            if ask(probe):
                lo = probe
                break
            base = probe + 1
            step *= 2
        if base < lo < n_amb:
            # first Positive lies in [base, lo]; narrow by bisection
            hi = lo
            lo = base
            while lo < hi:
                mid = (lo + hi) // 2
                if ask(mid):
                    hi = mid
                else:
                    lo = mid + 1
        for k, pos in enumerate(ambiguous):
            i = order[pos]
            if self.labels[i] is None:
                self.labels[i] = Sign.NEGATIVE if k < lo else Sign.POSITIVE
        return [
            QueryRecord(QueryKind.LABEL, lift_point(self.points[i]), self.labels[i])
            for i in new_idx
        ]

    def infer_over(self, candidates: list[int]) -> list[int]:
        inferred = []
        for i in candidates:
            verdict = self.constraints.infer(self.points[i])
            if verdict is not Verdict.UNKNOWN:
                self.labels[i] = verdict.to_sign()
                inferred.append(i)
        return inferred

    def label_residual(self, residual: list[int]) -> None:
        for i in residual:
            rec = self.oracle.label_query(self.points[i])
            self.labels[i] = rec.answer
            self.queried_count += 1


def perfect_learning(
    sample: np.ndarray,
    kind: QueryKind,
    params: RpuParams,
    oracle: Oracle,
    rng: np.random.Generator,
) -> RpuOutcome:
    run = _Run(sample, kind, params, oracle)
    threshold = RESIDUAL_THRESHOLD[kind]
    subsample_size = params.initial_subsample or run.d + 1
    uninferred = list(range(run.n))
    round_no = 0
    while len(uninferred) > threshold:
        round_no += 1
        take = min(subsample_size, len(uninferred))
        picked = rng.choice(len(uninferred), size=take, replace=False)
        new_idx = [uninferred[i] for i in sorted(picked)]
        run.query_round(new_idx)
        new_set = set(new_idx)
        # subsampled points are resolved by their own label answer; the rest
        # go through the LP
        inferred = list(new_set) + run.infer_over([i for i in uninferred if i not in new_set])
        run.trace.append((round_no, take, len(inferred)))
        if len(inferred) < len(uninferred) / 2:
            subsample_size *= 2
        resolved = set(inferred)
        uninferred = [i for i in uninferred if i not in resolved]
    run.label_residual(uninferred)
    return RpuOutcome(
        labels=run.labels,
        ledger=oracle.ledger,
        rounds_used=round_no,
        subsample_trace=run.trace,
        inferred_count=run.n - run.queried_count,
        queried_count=run.queried_count,
    )


def pool_subsample_size(d: int, n: int, constant: float) -> int:
    return max(d + 1, math.ceil(constant * d * math.log(d + 1) * math.log(max(n, 2))))


def pool_rpu_learn(
    pool: np.ndarray,
    params: RpuParams,
    oracle: Oracle,
    rng: np.random.Generator,
) -> RpuOutcome:
    """Fixed-subsample T-round pool learner (labels plus comparisons)."""
    run = _Run(pool, QueryKind.COMPARISON, params, oracle)
    n = run.n
    k = min(n, pool_subsample_size(run.d, n, params.pool_constant))
    rounds_t = params.rounds_t or math.ceil(math.log2(max(n / params.epsilon, 2.0)))
    uninferred = list(range(n))
    rounds_used = 0
    for round_no in range(1, rounds_t + 1):
        if not uninferred:
            break
        rounds_used = round_no
        take = min(k, len(uninferred))
        picked = rng.choice(len(uninferred), size=take, replace=False)
        new_idx = [uninferred[i] for i in sorted(picked)]
        run.query_round(new_idx)
        new_set = set(new_idx)
        inferred = list(new_set) + run.infer_over([i for i in uninferred if i not in new_set])
        run.trace.append((round_no, take, len(inferred)))
        resolved = set(inferred)
        uninferred = [i for i in uninferred if i not in resolved]
    run.label_residual(uninferred)
    return RpuOutcome(
        labels=run.labels,
        ledger=oracle.ledger,
        rounds_used=rounds_used,
        subsample_trace=run.trace,
        inferred_count=run.n - run.queried_count,
        queried_count=run.queried_count,
    )


def passive_rpu_predict(labeled_records, z: np.ndarray, dimension: int | None = None) -> Verdict:
    """Inference from a frozen record set; used to estimate coverage."""
    records = list(labeled_records)
    if dimension is None:
        if not records:
            raise ValueError("cannot deduce dimension from zero records")
        dimension = records[0].subject.shape[0] - 1
    c = ConstraintSet.from_records(dimension, records)
    return c.infer(z)
