import numpy as np
import pytest

from cqlearn.core import Hyperplane, Sign
from cqlearn.distributions import gaussian, make_rng, sample, uniform_ball
from cqlearn.pointloc import Arrangement, depth_experiment, locate, sample_arrangement
from cqlearn.rpu import RpuParams


def signs_expected(arr, x):
    values = [h.normal @ x + h.offset for h in arr.hyperplanes]
    return [Sign.POSITIVE if v >= 0 else Sign.NEGATIVE for v in values]


def test_single_hyperplane_depth_one():
    arr = Arrangement((Hyperplane(np.array([1.0, 0.0]), 0.0),), 2)
    sig = locate(np.array([0.5, 0.5]), arr, RpuParams(), make_rng(0))
    assert sig.signs == [Sign.POSITIVE]
    assert sig.depth == 1


def test_locate_exact_and_sublinear():
    rng = make_rng(1)
    arr = sample_arrangement(gaussian(3), 1024, rng)
    x = sample(uniform_ball(3), rng, 1)[0]
    sig = locate(x, arr, RpuParams(), rng)
    assert sig.signs == signs_expected(arr, x)
    assert sig.depth < 1024


def test_duplicate_hyperplane_still_exact():
    # a duplicated hyperplane collapses to an equality in the dual order and
    # must come out with the same (correct) sign as the original
    rng = make_rng(2)
    base = sample_arrangement(gaussian(3), 64, rng)
    x = sample(uniform_ball(3), rng, 1)[0]
    dup = Arrangement(base.hyperplanes + (base.hyperplanes[0],), 3)
    sig = locate(x, dup, RpuParams(), make_rng(3))
    assert sig.signs == signs_expected(dup, x)
    assert sig.signs[-1] == sig.signs[0]


def test_depth_experiment_monotone():
    results = depth_experiment(gaussian(3), [64, 128, 256], trials=5, seed=4)
    depths = [mean for _, mean, _ in results]
    ratios = [mean / n for n, mean, _ in results]
    assert depths == sorted(depths)
    assert ratios == sorted(ratios, reverse=True)


def test_depth_experiment_single_trial_rows():
    results = depth_experiment(gaussian(2), [16, 32], trials=1, seed=5)
    assert len(results) == 2
    assert all(std == 0.0 for _, _, std in results)


def test_arrangement_validation():
    with pytest.raises(ValueError):
        Arrangement((), 2)
    with pytest.raises(ValueError):
        Arrangement((Hyperplane(np.array([1.0, 0.0]), 0.0),), 3)


def test_locate_dimension_mismatch():
    arr = Arrangement((Hyperplane(np.array([1.0, 0.0]), 0.0),), 2)
    with pytest.raises(ValueError):
        locate(np.array([1.0, 2.0, 3.0]), arr, RpuParams(), make_rng(6))
