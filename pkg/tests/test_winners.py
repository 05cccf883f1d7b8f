import numpy as np
import pytest

from hetbounds import EmpiricalDist, makarov_bounds, winner_bounds, winner_curve
from hetbounds.oracle import subgroup_extremes
from hetbounds.winners import bound_from_pieces, piece_points, piece_table
from instances import breakpoint_pairs, dists, random_instance

D0 = EmpiricalDist.from_values([0, 10])
D1 = EmpiricalDist.from_values([1, 5])
D123 = EmpiricalDist.from_values([1, 2, 3])

# frozen regression fixture; values checked against the permutation oracle
FIX_Y0 = np.array([3.1, 0.4, 7.7, 5.2, 1.9, 9.0, 6.3])
FIX_Y1 = np.array([4.4, 2.6, 8.8, 3.5, 6.9, 10.2, 7.1])
FIX_LOWER = [1.0, 1.0, 2 / 3, 1 / 2, 2 / 5, 1 / 3, 2 / 7]


def test_identical_marginals_identify_nobody():
    wb = winner_bounds(D123, D123)
    assert wb.winners.lower == 0 and wb.losers.lower == 0
    # strict-event upper is sharp at 2/3 (a cyclic permutation); the weak event can reach 1
    assert wb.winners.upper == pytest.approx(2 / 3)
    assert wb.winners_weak_upper == pytest.approx(1.0)


def test_separated_supports():
    wb = winner_bounds(EmpiricalDist.from_values([0, 0]), EmpiricalDist.from_values([1, 1])).conditional()
    assert wb.winners.lower == 1.0 and wb.winners.upper == 1.0
    assert wb.losers.upper == 0.0


def test_two_point_fixture():
    wb = winner_bounds(D0, D1)
    assert (wb.winners.lower, wb.winners.upper) == pytest.approx((0.5, 0.5))
    assert (wb.losers.lower, wb.losers.upper) == pytest.approx((0.5, 0.5))
    assert wb.argmax["winners_lower"] == pytest.approx(0.5)
    assert wb.thresholds["winners_lower"] == 0.0


def test_identical_curve_lower_is_zero():
    for tail in ("left", "right"):
        curve = winner_curve(D123, D123, [1 / 3, 2 / 3] if tail == "left" else [0, 1 / 3], tail)
        assert np.all(curve.lower == 0)
        np.testing.assert_allclose(curve.extra["weak_upper"], 1.0)


def test_shift_lower_equals_running_max():
    rng = np.random.default_rng(4)
    y0 = np.sort(rng.uniform(0, 1, 6))
    y1 = rng.uniform(0, 1, 6) + 0.3
    d0, d1 = dists(y0, y1)
    lo, _ = subgroup_extremes(y0, y1, "winner-count")
    for k in range(1, 7):
        formula = max(max(j / 6 - d1.cdf(y0[j - 1]) for j in range(1, k + 1)), 0.0)
        assert winner_bounds(d0, d1, 0, k / 6).winners.lower == pytest.approx(formula, abs=1e-12)
        assert formula == pytest.approx(lo[0, k], abs=1e-12)


def test_frozen_fixture_curve():
    d0, d1 = dists(FIX_Y0, FIX_Y1)
    curve = winner_curve(d0, d1, np.arange(1, 8) / 7, "left", "winners")
    np.testing.assert_allclose(curve.lower, FIX_LOWER, atol=1e-12)
    wb = winner_bounds(d0, d1, 0, 3 / 7)
    assert wb.thresholds["winners_lower"] == 1.9
    lo, _ = subgroup_extremes(FIX_Y0, FIX_Y1, "winner-count")
    np.testing.assert_allclose(lo[0, 1:] * 7 / np.arange(1, 8), FIX_LOWER, atol=1e-12)


def test_sandwich_against_oracle():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        distinct = bool(rng.integers(0, 2))
        y0, y1 = random_instance(rng, n, distinct)
        d0, d1 = dists(y0, y1)
        w_lo, w_hi = subgroup_extremes(y0, y1, "winner-count")
        l_lo, l_hi = subgroup_extremes(y0, y1, "loser-count")
        for lo, hi in breakpoint_pairs(n):
            wb = winner_bounds(d0, d1, lo / n, hi / n)
            assert wb.winners.lower <= w_lo[lo, hi] + 1e-9 and w_hi[lo, hi] <= wb.winners.upper + 1e-9
            assert wb.losers.lower <= l_lo[lo, hi] + 1e-9 and l_hi[lo, hi] <= wb.losers.upper + 1e-9
            assert wb.winners.lower + wb.losers.lower <= (hi - lo) / n + 1e-12
            if distinct:
                assert wb.winners.lower == pytest.approx(w_lo[lo, hi], abs=1e-9)


def test_conditional_clamps_to_unit_interval():
    rng = np.random.default_rng(2)
    y0, y1 = random_instance(rng, 7)
    d0, d1 = dists(y0, y1)
    for b in np.linspace(0.01, 1, 25):
        wb = winner_bounds(d0, d1, 0, b).conditional()
        for v in (wb.winners.lower, wb.winners.upper, wb.losers.lower, wb.losers.upper):
            assert 0.0 <= v <= 1.0


def test_piece_table_matches_exact_sups():
    rng = np.random.default_rng(9)
    for _ in range(30):
        y0, y1 = random_instance(rng, int(rng.integers(2, 9)))
        d0, d1 = dists(y0, y1, rng.uniform(0.5, 2, y0.size), None)
        a, b = sorted(rng.uniform(0, 1, 2))
        table = piece_table(d0, d1, piece_points(d0, [a, b]))
        wb = winner_bounds(d0, d1, a, b)
        assert bound_from_pieces(table, a, b, "winners_lower") == pytest.approx(wb.winners.lower, abs=1e-12)
        assert bound_from_pieces(table, a, b, "winners_upper") == pytest.approx(wb.winners.upper, abs=1e-12)
        assert bound_from_pieces(table, a, b, "losers_lower") == pytest.approx(wb.losers.lower, abs=1e-12)
        assert bound_from_pieces(table, a, b, "losers_upper") == pytest.approx(wb.losers.upper, abs=1e-12)


def test_losers_curve_and_kind_validation():
    curve = winner_curve(D0, D1, [0.5, 1.0], "left", "losers")
    assert curve.lower.tolist() == pytest.approx([0.0, 0.5])
    with pytest.raises(ValueError):
        winner_curve(D0, D1, [0.5], "left", "ties")


def test_makarov_examples():
    assert makarov_bounds(D0, D1, np.inf).lower == 1.0
    assert makarov_bounds(D0, D1, -np.inf).upper == 0.0
    bd = makarov_bounds(D123, D123, 0.0)
    assert bd.lower == 0.0 and bd.upper <= 1.0
    bd = makarov_bounds(D0, D1, 0.0)
    assert (bd.lower, bd.upper) == pytest.approx((0.5, 0.5))
    with pytest.raises(ValueError):
        makarov_bounds(D0, D1, np.nan)


def test_makarov_against_oracle():
    rng = np.random.default_rng(12)
    from hetbounds import CouplingInstance

    for _ in range(20):
        n = int(rng.integers(2, 7))
        y0, y1 = random_instance(rng, n)
        c = float(rng.integers(-3, 4)) + rng.choice([0.0, 0.5])
        d0, d1 = dists(y0, y1)
        # P(Y1 - Y0 < c) is the loser count of (Y0, Y1 - c)
        from hetbounds import oracle_extremes

        lo, hi = oracle_extremes(CouplingInstance(y0, y1 - c), "loser-count")
        bd = makarov_bounds(d0, d1, c)
        assert bd.lower <= lo + 1e-12 and hi <= bd.upper + 1e-12
