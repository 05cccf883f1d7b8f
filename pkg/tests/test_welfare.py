import numpy as np
import pytest

from hetbounds import (
    EmpiricalDist,
    WelfareFn,
    maximin_policy,
    nonutilitarian_welfare_curve,
    ste_bounds,
    utilitarian_welfare_curve,
    welfare_bounds,
)
from hetbounds.oracle import subgroup_extremes
from instances import breakpoint_pairs, dists, random_instance

D123 = EmpiricalDist.from_values([1, 2, 3])


def test_parse_and_evaluate():
    h = WelfareFn.parse("1.1|0|1")
    assert h(-1.0) == pytest.approx(-1.1) and h(2.0) == 2.0 and h(0.0) == 0.0
    assert WelfareFn.parse(h.to_text()).to_text() == h.to_text()
    assert WelfareFn.loss_averse().to_text() == h.to_text()


def test_anchor_with_knots_away_from_zero():
    h = WelfareFn.parse("2|1|1|3|0.5")
    assert h(0.0) == 0.0
    np.testing.assert_allclose(h(np.array([-1.0, 1.0, 3.0, 5.0])), [-2.0, 2.0, 4.0, 5.0])


@pytest.mark.parametrize("text", ["1|0|2", "-1", "1|0", "a|0|1", "1|1|0.5|0|0.2"])
def test_parse_rejects_invalid(text):
    with pytest.raises(ValueError):
        WelfareFn.parse(text)


def test_loss_averse_self_comparison():
    bd = welfare_bounds(D123, D123, WelfareFn.loss_averse(1.1), 0, 1)
    assert (bd.lower, bd.upper) == pytest.approx((-1 / 15, 0.0), abs=1e-12)


def test_identity_matches_ste():
    rng = np.random.default_rng(1)
    for _ in range(30):
        y0, y1 = random_instance(rng, int(rng.integers(2, 9)))
        d0, d1 = dists(y0, y1)
        a, b = sorted(rng.uniform(0, 1, 2))
        w, s = welfare_bounds(d0, d1, WelfareFn.identity(), a, b), ste_bounds(d0, d1, a, b)
        assert w.lower == pytest.approx(s.lower, abs=1e-12) and w.upper == pytest.approx(s.upper, abs=1e-12)


def test_linear_h_scales_bounds():
    rng = np.random.default_rng(6)
    y0, y1 = random_instance(rng, 6)
    d0, d1 = dists(y0, y1)
    w1 = welfare_bounds(d0, d1, WelfareFn.identity(), 0.2, 0.9)
    w3 = welfare_bounds(d0, d1, WelfareFn((), (3.0,)), 0.2, 0.9)
    assert w3.lower == pytest.approx(3 * w1.lower) and w3.upper == pytest.approx(3 * w1.upper)


def test_self_comparison_upper_is_h_of_zero():
    h = WelfareFn.parse("3|-1|1|2|0.25")
    assert welfare_bounds(D123, D123, h, 0, 1).upper == pytest.approx(0.0, abs=1e-12)


def test_oracle_exactness():
    rng = np.random.default_rng(14)
    h = WelfareFn.parse("1.5|-1|1.1|0|1|2|0.4")
    for _ in range(15):
        n = int(rng.integers(2, 7))
        y0, y1 = random_instance(rng, n)
        d0, d1 = dists(y0, y1)
        lo, hi = subgroup_extremes(y0, y1, "mean-h", h)
        for i, j in breakpoint_pairs(n):
            bd = welfare_bounds(d0, d1, h, i / n, j / n)
            assert bd.lower == pytest.approx(lo[i, j], abs=1e-9)
            assert bd.upper == pytest.approx(hi[i, j], abs=1e-9)


def test_utilitarian_shift_curve():
    y0 = np.arange(10.0)
    d0, d1 = dists(y0, y0 + 2.0)
    curve = utilitarian_welfare_curve(d0, d1, 0.5, np.arange(1, 11) / 10)
    np.testing.assert_allclose(curve.lower, 1.5 * curve.grid, atol=1e-12)
    assert maximin_policy(d0, d1, cost=0.5).b_star == 1.0
    costly = utilitarian_welfare_curve(d0, d1, 3.0, np.arange(1, 11) / 10)
    assert np.all(costly.lower < 0)
    res = maximin_policy(d0, d1, cost=3.0)
    assert res.b_star == 0.0 and res.y0_threshold is None


def test_loss_averse_policy_ties_go_to_smallest_b():
    res = maximin_policy(D123, D123, WelfareFn.loss_averse())
    assert np.all(res.curve.lower <= 1e-12)
    assert res.b_star == 0.0
    assert res.welfare_at_star.lower == 0.0


def test_policy_matches_grid_exhaustion():
    rng = np.random.default_rng(19)
    for _ in range(10):
        y0, y1 = random_instance(rng, 7)
        y1 = y1 + 1.0
        d0, d1 = dists(y0, y1)
        res = maximin_policy(d0, d1, cost=0.3)
        grid = d0.cum
        lowers = [0.0] + [ste_bounds(d0, d1, 0, b).lower - 0.3 * b for b in grid]
        best = int(np.argmax(np.array(lowers) >= max(lowers) - 1e-12))
        assert res.b_star == pytest.approx(([0.0] + list(grid))[best])
        if res.b_star > 0:
            assert res.y0_threshold == d0.quantile(res.b_star)
            assert not res.threshold_ambiguous


def test_policy_invariant_to_common_shift():
    rng = np.random.default_rng(23)
    y0, y1 = random_instance(rng, 7)
    d0, d1 = dists(y0, y1 + 0.5)
    e0, e1 = dists(y0 + 100.0, y1 + 100.5)
    h = WelfareFn.loss_averse(1.3)
    for kwargs in ({"cost": 0.2}, {"h": h}):
        assert maximin_policy(d0, d1, **kwargs).b_star == maximin_policy(e0, e1, **kwargs).b_star


def test_threshold_flagged_inside_flat_step():
    d0, d1 = dists(np.array([0.0, 0.0, 1.0, 1.0]), np.array([5.0, 5.0, 5.0, 5.0]))
    res = maximin_policy(d0, d1, grid=[0.25, 0.5, 1.0])
    assert res.b_star == 1.0 and not res.threshold_ambiguous
    res = maximin_policy(d0, d1, grid=[0.25, 0.75])
    assert res.b_star == 0.75 and res.threshold_ambiguous and res.y0_threshold == 1.0


def test_nonutilitarian_curve_cost_shift():
    rng = np.random.default_rng(31)
    y0, y1 = random_instance(rng, 6)
    d0, d1 = dists(y0, y1)
    h = WelfareFn.loss_averse()
    grid = np.array([0.25, 0.5, 1.0])
    base = nonutilitarian_welfare_curve(d0, d1, h, grid)
    costly = nonutilitarian_welfare_curve(d0, d1, h, grid, cost=0.4)
    np.testing.assert_allclose(costly.lower, base.lower - 0.4 * grid, atol=1e-12)
