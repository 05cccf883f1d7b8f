import numpy as np
import pytest

from hetbounds import WeightedSample, ks_statistic, ks_test


def test_identical_samples():
    arm = WeightedSample([1.0, 2.0, 2.0, 5.0])
    res = ks_test(arm, arm, 99, seed=1)
    assert res.statistic == 0.0 and res.p_value == 1.0


def test_disjoint_supports():
    arm0, arm1 = WeightedSample(np.arange(10.0)), WeightedSample(100 + np.arange(10.0))
    res = ks_test(arm0, arm1, 199, seed=2)
    assert res.statistic == 1.0
    assert res.p_value == pytest.approx(1 / 200)


def test_weighted_statistic():
    arm0 = WeightedSample([0.0, 1.0], [3.0, 1.0])
    arm1 = WeightedSample([0.0, 1.0])
    assert ks_statistic(arm0, arm1) == pytest.approx(0.25)


def test_invariant_under_monotone_transform():
    rng = np.random.default_rng(4)
    x0, x1 = rng.normal(size=50), rng.normal(0.3, 1, 60)
    w0, w1 = rng.uniform(0.5, 2, 50), rng.uniform(0.5, 2, 60)
    base = ks_test(WeightedSample(x0, w0), WeightedSample(x1, w1), 99, seed=5)
    moved = ks_test(WeightedSample(np.exp(x0), w0), WeightedSample(np.exp(x1), w1), 99, seed=5)
    assert base.statistic == moved.statistic and base.p_value == moved.p_value


def test_seeded_and_reproducible():
    rng = np.random.default_rng(6)
    arm0, arm1 = WeightedSample(rng.normal(size=30)), WeightedSample(rng.normal(size=30))
    assert ks_test(arm0, arm1, 99, seed=7) == ks_test(arm0, arm1, 99, seed=7)
    assert ks_test(arm0, arm1, 99).seed >= 0


def test_cluster_mode():
    rng = np.random.default_rng(8)
    c0, c1 = np.repeat(np.arange(10), 5), np.repeat(np.arange(10), 5)
    arm0 = WeightedSample(rng.normal(size=50), clusters=c0)
    arm1 = WeightedSample(rng.normal(size=50) + 3, clusters=c1)
    res = ks_test(arm0, arm1, 499, seed=9, cluster=True)
    assert res.cluster and res.p_value < 0.01
    # with 20 clusters split 10/10 the permutation distribution has C(20,10) points
    assert res.p_value >= 1 / 500
    with pytest.raises(ValueError):
        ks_test(WeightedSample([1.0]), WeightedSample([2.0]), 9, cluster=True)


def test_rejects_zero_permutations():
    with pytest.raises(ValueError):
        ks_test(WeightedSample([1.0]), WeightedSample([2.0]), 0)


def test_power_against_unit_shift():
    rng = np.random.default_rng(10)
    rejections = 0
    for r in range(40):
        arm0, arm1 = WeightedSample(rng.normal(size=200)), WeightedSample(rng.normal(size=200) + 1)
        rejections += ks_test(arm0, arm1, 199, seed=r).p_value < 0.05
    assert rejections >= 38
