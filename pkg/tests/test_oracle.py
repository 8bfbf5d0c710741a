import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqlearn.core import Hyperplane, Sign, evaluate, sign_of
from cqlearn.distributions import make_rng, sample, sample_tangent_hyperplane, uniform_ball
from cqlearn.oracle import Oracle, QueryKind, QueryLedger


def make_oracle(seed=0, d=2):
    rng = make_rng(seed)
    return Oracle(Hyperplane(rng.standard_normal(d), float(rng.standard_normal()))), rng


def test_label_tangent_interior_positive():
    rng = make_rng(0)
    h = sample_tangent_hyperplane(2, rng)
    o = Oracle(h)
    assert o.label_query(np.zeros(2)).answer is Sign.POSITIVE


def test_label_direct_substitution():
    o = Oracle(Hyperplane(np.array([0.0, 1.0]), 0.0))
    assert o.label_query(np.array([5.0, -0.1])).answer is Sign.NEGATIVE


def test_label_matches_evaluate_randomized():
    o, rng = make_oracle(1, 3)
    for _ in range(10_000):
        x = rng.standard_normal(3)
        got = o.label_query(x).answer
        v = evaluate(o.hidden, x)
        want = Sign.POSITIVE if v >= 0 else Sign.NEGATIVE
        assert got is want


def test_comparison_identical_points_positive():
    o, _ = make_oracle(2)
    x = np.array([0.3, 0.4])
    assert o.comparison_query(x, x).answer is Sign.POSITIVE


def test_comparison_direct():
    o = Oracle(Hyperplane(np.array([1.0, 0.0]), 0.0))
    assert o.comparison_query(np.array([2.0, 0.0]), np.array([1.0, 0.0])).answer is Sign.POSITIVE


def test_comparison_antisymmetry():
    o, rng = make_oracle(3, 3)
    checked = 0
    while checked < 10_000:
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        if abs(evaluate(o.hidden, x) - evaluate(o.hidden, y)) <= 1e-9:
            continue
        assert o.comparison_query(x, y).answer is o.comparison_query(y, x).answer.flipped()
        checked += 1


def test_ledger_counts_by_kind():
    o, rng = make_oracle(4)
    o.label_query(rng.standard_normal(2))
    o.comparison_query(rng.standard_normal(2), rng.standard_normal(2))
    o.comparison_query(rng.standard_normal(2), rng.standard_normal(2))
    assert o.ledger.label_count == 1
    assert o.ledger.comparison_count == 2
    assert o.ledger.total == 3


def test_ledger_merge():
    a = QueryLedger(label_count=2, comparison_count=1)
    b = QueryLedger(label_count=1, comparison_count=4)
    a.merge(b)
    assert (a.label_count, a.comparison_count, a.total) == (3, 5, 8)


def test_sort_single_point():
    o, rng = make_oracle(5)
    order, records = o.sort_by_value(rng.standard_normal((1, 2)))
    assert order == [0]
    assert records == []
    assert o.ledger.comparison_count == 0


def test_sort_two_points_one_comparison():
    o, rng = make_oracle(6)
    order, _ = o.sort_by_value(rng.standard_normal((2, 2)))
    assert sorted(order) == [0, 1]
    assert o.ledger.comparison_count == 1


def test_sort_sixteen_matches_direct_and_bounded():
    o, rng = make_oracle(7, 3)
    pts = rng.standard_normal((16, 3))
    order, _ = o.sort_by_value(pts)
    values = [evaluate(o.hidden, p) for p in pts]
    assert order == sorted(range(16), key=lambda i: values[i])
    assert o.ledger.comparison_count <= 64  # 16 * ceil(log2 16)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 24))
def test_sort_property(seed, k):
    rng = np.random.default_rng(seed)
    o = Oracle(Hyperplane(rng.standard_normal(2), float(rng.standard_normal())))
    pts = rng.standard_normal((k, 2))
    order, _ = o.sort_by_value(pts)
    values = np.array([evaluate(o.hidden, p) for p in pts])
    assert np.all(np.diff(values[order]) >= -1e-12)
    if k > 1:
        assert o.ledger.comparison_count <= k * int(np.ceil(np.log2(k)))


def test_merge_sorted_preserves_order_and_counts():
    o, rng = make_oracle(8, 3)
    pts = rng.standard_normal((30, 3))
    values = np.array([evaluate(o.hidden, p) for p in pts])
    base_idx = list(range(20))
    base = sorted(base_idx, key=lambda i: values[i])
    new = list(range(20, 30))
    new_sorted = sorted(new, key=lambda i: values[i])
    merged, _ = o.merge_sorted(pts, base, new_sorted)
    assert sorted(merged) == list(range(30))
    assert np.all(np.diff(values[merged]) >= -1e-12)


def test_merge_sorted_extremes_are_cheap():
    # a run of new points all above the existing order costs O(1) comparisons
    # each after the first insertion
    o = Oracle(Hyperplane(np.array([1.0, 0.0]), 0.0))
    pts = np.array([[float(i), 0.0] for i in range(20)])
    base = list(range(10))
    new_sorted = list(range(10, 20))
    before = o.ledger.comparison_count
    merged, _ = o.merge_sorted(pts, base, new_sorted)
    assert merged == list(range(20))
    assert o.ledger.comparison_count - before <= 12


def test_records_carry_lifted_subjects():
    o, rng = make_oracle(9)
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    r1 = o.label_query(x)
    r2 = o.comparison_query(x, y)
    assert r1.kind is QueryKind.LABEL
    assert np.allclose(r1.subject, np.append(x, 1.0))
    assert r2.kind is QueryKind.COMPARISON
    assert np.allclose(r2.subject, np.append(x - y, 0.0))


def test_no_memoization_every_call_counts():
    o, rng = make_oracle(10)
    x = rng.standard_normal(2)
    o.label_query(x)
    o.label_query(x)
    assert o.ledger.label_count == 2
