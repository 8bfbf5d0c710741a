"""The query interface hiding the target hyperplane.

Answers label and comparison queries, counts every oracle call, and provides
comparison-driven merge sorting. Ties (exact zeros) answer Positive, a fixed
convention that keeps the inference LP non-strict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import Hyperplane, Sign, evaluate, lift_difference, lift_point, sign_of


class QueryKind(Enum):
    LABEL = "label"
    COMPARISON = "comparison"


@dataclass(frozen=True)
class QueryRecord:
    kind: QueryKind
    subject: np.ndarray  # lift_point for LABEL, lift_difference for COMPARISON
    answer: Sign


@dataclass
class QueryLedger:
    label_count: int = 0
    comparison_count: int = 0

    @property
    def total(self) -> int:
        return self.label_count + self.comparison_count

    def merge(self, other: "QueryLedger") -> None:
        self.label_count += other.label_count
        self.comparison_count += other.comparison_count


def _zero_to_positive(s: Sign) -> Sign:
    return Sign.POSITIVE if s is Sign.ZERO else s


class Oracle:
    """One oracle per trial; holds the hidden hyperplane and an exact ledger.

    No memoization: repeated queries re-count, matching the paper's accounting
    of oracle accesses. Learners may cache answers themselves.
    """

    def __init__(self, hidden: Hyperplane):
        self.hidden = hidden
        self.ledger = QueryLedger()

    @property
    def dim(self) -> int:
        return self.hidden.dim

    def label_query(self, x: np.ndarray) -> QueryRecord:
        value = evaluate(self.hidden, x)
        self.ledger.label_count += 1
        return QueryRecord(QueryKind.LABEL, lift_point(x), _zero_to_positive(sign_of(value)))

    def comparison_query(self, x: np.ndarray, y: np.ndarray) -> QueryRecord:
        value = evaluate(self.hidden, x) - evaluate(self.hidden, y)
        self.ledger.comparison_count += 1
        return QueryRecord(
            QueryKind.COMPARISON, lift_difference(x, y), _zero_to_positive(sign_of(value))
        )

    def sort_by_value(self, points: np.ndarray) -> tuple[list[int], list[QueryRecord]]:
        """Merge sort by hidden value, ascending. Returns the permutation of row
        indices and the comparison records performed (<= k*ceil(log2 k))."""
        if len(points) == 0:
            raise ValueError("sort_by_value needs a nonempty list")
        records: list[QueryRecord] = []
        order = self._merge_sort(points, list(range(len(points))), records)
        return order, records

    def merge_sorted(
        self, points: np.ndarray, into: list[int], run: list[int]
    ) -> tuple[list[int], list[QueryRecord]]:
        """Merge the sorted run into the sorted list `into` by exponential
        search from the previous insertion point. Clustered runs (extremes
        re-sampled late in a learning loop) cost O(1) comparisons per item;
        the worst case stays within (old+new)*ceil(log2(old+new))."""
        records: list[QueryRecord] = []
        out = list(into)
        pos = 0
        for item in run:
            pos = self._gallop(points, out, item, pos, records)
            out.insert(pos, item)
            pos += 1
        return out, records

    def _gallop(self, points, out: list[int], item: int, lo: int, records) -> int:
        """Smallest index >= lo where item precedes out[idx]."""

        def before(j: int) -> bool:
            rec = self.comparison_query(points[item], points[out[j]])
            records.append(rec)
            return rec.answer is Sign.NEGATIVE

        n = len(out)
        if lo >= n:
            return n
        step = 1
        prev = lo
        probe = lo
        while probe < n and not before(probe):
            prev = probe + 1
            probe = lo + step
            step *= 2
        hi = min(probe, n)  # item precedes out[hi] (or hi == n)
        lo2 = prev
        while lo2 < hi:
            mid = (lo2 + hi) // 2
            if before(mid):
                hi = mid
            else:
                lo2 = mid + 1
        return lo2

    def _merge_sort(self, points, idx: list[int], records: list[QueryRecord]) -> list[int]:
        if len(idx) <= 1:
            return idx
        mid = len(idx) // 2
        left = self._merge_sort(points, idx[:mid], records)
        right = self._merge_sort(points, idx[mid:], records)
        return self._merge(points, left, right, records)

    def _merge(self, points, left: list[int], right: list[int], records) -> list[int]:
        out: list[int] = []
        i = j = 0
        while i < len(left) and j < len(right):
            rec = self.comparison_query(points[left[i]], points[right[j]])
            records.append(rec)
            # Negative: h(left) < h(right); ties land right-first via Positive.
            if rec.answer is Sign.NEGATIVE:
                out.append(left[i])
                i += 1
            else:
                out.append(right[j])
                j += 1
        out.extend(left[i:])
        out.extend(right[j:])
        return out
