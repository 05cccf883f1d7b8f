import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetbounds import (
    EmpiricalDist,
    integrate_transformed,
    mean_difference,
    negative_part,
    positive_part,
    ste_bounds,
    ste_curve,
    ste_negative_part_bounds,
    ste_positive_part_bounds,
)
from hetbounds.oracle import subgroup_extremes
from instances import breakpoint_pairs, dists, random_instance

D0 = EmpiricalDist.from_values([0, 10])
D1 = EmpiricalDist.from_values([1, 5])
D123 = EmpiricalDist.from_values([1, 2, 3])


def test_full_population_is_the_ate():
    bd = ste_bounds(D123, EmpiricalDist.from_values([2, 3, 4]), 0, 1)
    assert bd.lower == pytest.approx(1.0, abs=1e-12) and bd.upper == pytest.approx(1.0, abs=1e-12)


def test_two_point_fixture():
    bd = ste_bounds(D0, D1, 0, 0.5).conditional
    assert (bd.lower, bd.upper) == pytest.approx((1.0, 5.0), abs=1e-12)
    assert bd.normalization == "conditional"
    assert ste_bounds(D0, D1, 0, 0.5).joint.lower == pytest.approx(0.5)


def test_self_comparison_bottom_third():
    bd = ste_bounds(D123, D123, 0, 1 / 3).conditional
    assert (bd.lower, bd.upper) == pytest.approx((0.0, 2.0), abs=1e-12)


def test_positive_part_examples():
    assert ste_positive_part_bounds(D123, D123, 0, 1).lower == pytest.approx(0.0, abs=1e-15)
    bd = ste_positive_part_bounds(D0, D1, 0, 1)
    assert bd.lower == pytest.approx(0.5) and bd.conditional.lower == pytest.approx(0.5)


def test_negative_part_examples():
    assert ste_negative_part_bounds(D123, D123, 0, 1).lower == pytest.approx(0.0, abs=1e-15)
    bd = ste_negative_part_bounds(D0, D1, 0, 1)
    assert (bd.lower, bd.upper) == pytest.approx((2.5, 4.5))


@pytest.mark.parametrize("a, b", [(0.5, 0.5), (0.3, 0.3 + 1e-13), (-0.1, 0.5), (0.2, 1.2)])
def test_rejects_degenerate_subgroups(a, b):
    with pytest.raises(ValueError):
        ste_bounds(D0, D1, a, b)


def test_constant_shift_curve():
    rng = np.random.default_rng(11)
    y0 = rng.normal(size=40)
    d0, d1 = dists(y0, y0 + 0.7)
    left = ste_curve(d0, d1, tail="left")
    # rank invariance is the minimizing coupling for bottom subgroups
    np.testing.assert_allclose(left.lower, 0.7, atol=1e-12)
    assert left.upper[-1] == pytest.approx(0.7, abs=1e-12)
    for curve in (left, ste_curve(d0, d1, tail="right")):
        assert np.all(curve.lower <= 0.7 + 1e-12) and np.all(curve.upper >= 0.7 - 1e-12)


def test_curve_grid_and_tails():
    curve = ste_curve(D0, D1, [0.25, 0.5, 1.0], "left")
    assert [bd.b for bd in curve.bounds] == [0.25, 0.5, 1.0]
    assert all(bd.a == 0 for bd in curve.bounds)
    right = ste_curve(D0, D1, [0.0, 0.5], "right")
    assert [(bd.a, bd.b) for bd in right.bounds] == [(0.0, 1.0), (0.5, 1.0)]
    rows = curve.rows()
    assert rows[1]["threshold"] == 0.5 and rows[1]["lower"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ste_curve(D0, D1, [], "left")
    with pytest.raises(ValueError):
        ste_curve(D0, D1, [0.5, 0.25], "left")
    with pytest.raises(ValueError):
        ste_curve(D0, D1, [1.0], "right")


def test_rank_invariance_exactness():
    rng = np.random.default_rng(5)
    y0 = np.sort(rng.normal(size=30))
    w = rng.uniform(0.5, 2.0, 30)
    g = lambda y: np.exp(y) + 2 * y
    d0, d1 = dists(y0, g(y0), w, w)
    for k in range(1, 31):
        b = d0.cum[k - 1]
        expected = np.sum((g(y0[:k]) - y0[:k]) * w[:k]) / np.sum(w[:k])
        assert ste_bounds(d0, d1, 0, b).conditional.lower == pytest.approx(expected, abs=1e-10)


def test_sign_decomposition_under_common_map():
    # x = x_+ - x_- holds pointwise, so the identity holds integrand by integrand for a shared u-map
    rng = np.random.default_rng(8)
    for _ in range(50):
        y0, y1 = random_instance(rng, int(rng.integers(2, 8)))
        d0, d1 = dists(y0, y1)
        a, b = sorted(rng.uniform(0, 1, 2))
        lo = ste_bounds(d0, d1, a, b)
        pos = integrate_transformed(d0, d1, a, b, -a, 1, positive_part)
        neg = integrate_transformed(d0, d1, a, b, -a, 1, negative_part)
        assert lo.lower == pytest.approx(pos - neg, abs=1e-12)
        full = ste_bounds(d0, d1, 0, 1)
        p, m = ste_positive_part_bounds(d0, d1, 0, 1), ste_negative_part_bounds(d0, d1, 0, 1)
        assert full.lower == pytest.approx(p.lower - m.lower, abs=1e-12)
        assert full.upper == pytest.approx(p.upper - m.upper, abs=1e-12)


def test_naive_cross_pairing_is_not_an_identity():
    # the part bounds come from different couplings; subtracting opposite ends is not the STE bound
    p, m = ste_positive_part_bounds(D0, D1, 0, 1), ste_negative_part_bounds(D0, D1, 0, 1)
    assert ste_bounds(D0, D1, 0, 1).lower == pytest.approx(-2.0)
    assert p.lower - m.upper == pytest.approx(-4.0)


def test_oracle_exactness_small():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        y0, y1 = random_instance(rng, n)
        d0, d1 = dists(y0, y1)
        extremes = {f: subgroup_extremes(y0, y1, f) for f in ("mean-effect", "positive-part", "negative-part")}
        for lo, hi in breakpoint_pairs(n):
            a, b = lo / n, hi / n
            for f, fn in (
                ("mean-effect", ste_bounds),
                ("positive-part", ste_positive_part_bounds),
                ("negative-part", ste_negative_part_bounds),
            ):
                bd = fn(d0, d1, a, b)
                assert bd.lower == pytest.approx(extremes[f][0][lo, hi], abs=1e-9)
                assert bd.upper == pytest.approx(extremes[f][1][lo, hi], abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(-10, 10), min_size=1, max_size=12),
    st.lists(st.integers(-10, 10), min_size=1, max_size=12),
    st.floats(0, 1),
    st.floats(0, 1),
)
def test_lower_never_exceeds_upper(v0, v1, x, y):
    d0, d1 = dists(np.array(v0, float), np.array(v1, float))
    a, b = min(x, y), max(x, y)
    if b - a < 1e-9:
        return
    bd = ste_bounds(d0, d1, a, b)
    assert bd.lower <= bd.upper + 1e-12
    full = ste_bounds(d0, d1, 0, 1)
    assert full.lower == pytest.approx(mean_difference(d0, d1), abs=1e-12)
    assert full.upper == pytest.approx(mean_difference(d0, d1), abs=1e-12)
