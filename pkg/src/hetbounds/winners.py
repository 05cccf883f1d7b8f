"""Sharp bounds on subgroup proportions of winners and losers.

All four bounds are suprema over x in (a, b) of expressions in
x and F1(Q0(x)) (or its left limit). Q0 is a step function, so on each of its
pieces the expression is monotone in x and the supremum is read off at a
piece endpoint. No search grid is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .bounds import BoundCurve, IntervalBound, check_grid, default_grid, subgroup
from .distribution import EmpiricalDist
from .ste import _check_subgroup

SUP_NAMES = ("winners_lower", "winners_upper", "losers_lower", "losers_upper")


@dataclass(frozen=True)
class WinnerBounds:
    """Bounds on P(Y0 < Y1, a<U<b) and P(Y0 > Y1, a<U<b).

    ``winners.upper`` and ``losers.upper`` bound the strict events. The weak
    events P(Y0 <= Y1, .) and P(Y0 >= Y1, .) are bounded above by
    ``winners_weak_upper`` and ``losers_weak_upper``.

    ``argmax`` maps each supremum to the x at which it is reached (``None``
    when the positive part clips it to zero) and ``thresholds`` to the
    control outcome Q0 on the achieving piece.
    """

    winners: IntervalBound
    losers: IntervalBound
    winners_weak_upper: float
    losers_weak_upper: float
    argmax: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    @property
    def a(self) -> float:
        return self.winners.a

    @property
    def b(self) -> float:
        return self.winners.b

    @property
    def normalization(self) -> str:
        return self.winners.normalization

    def conditional(self) -> "WinnerBounds":
        if self.normalization == "conditional":
            return self
        m = self.b - self.a

        def scale(v):
            return float(min(max(v / m, 0.0), 1.0))

        def scaled(bd):
            return replace(bd, lower=scale(bd.lower), upper=scale(bd.upper), normalization="conditional")

        return replace(
            self,
            winners=scaled(self.winners),
            losers=scaled(self.losers),
            winners_weak_upper=scale(self.winners_weak_upper),
            losers_weak_upper=scale(self.losers_weak_upper),
        )

    def to_dict(self) -> dict:
        return {
            "winners": self.winners.to_dict(),
            "losers": self.losers.to_dict(),
            "winners_weak_upper": float(self.winners_weak_upper),
            "losers_weak_upper": float(self.losers_weak_upper),
            "argmax": dict(self.argmax),
            "thresholds": dict(self.thresholds),
        }


def _piece_sups(d0: EmpiricalDist, d1: EmpiricalDist, a: float, b: float) -> dict:
    mask = (d0.prev < b) & (d0.cum > a)
    y = d0.values[mask]
    right = np.minimum(d0.cum[mask], b)
    left = np.maximum(d0.prev[mask], a)
    f = d1.cdf(y)
    f_left = d1.cdf_left(y)
    # increasing pieces peak at the right end, decreasing ones at the left end
    # written as differences of masses so that equal masses cancel exactly
    terms = {
        "winners_lower": ((right - a) - f, right),
        "winners_upper": ((b - left) - (1.0 - f), left),
        "losers_lower": ((b - left) - (1.0 - f_left), left),
        "losers_upper": ((right - a) - f_left, right),
    }
    out = {}
    for name, (vals, xs) in terms.items():
        k = int(np.argmax(vals))
        if vals[k] > 0:
            out[name] = (float(vals[k]), float(xs[k]), float(y[k]))
        else:
            out[name] = (0.0, None, None)
    return out


def winner_bounds(d0: EmpiricalDist, d1: EmpiricalDist, a: float = 0.0, b: float = 1.0) -> WinnerBounds:
    """Joint-normalized winner/loser bounds on (a, b); ``.conditional()`` divides by b - a.

    >>> d0 = EmpiricalDist.from_values([0, 10]); d1 = EmpiricalDist.from_values([1, 5])
    >>> wb = winner_bounds(d0, d1)
    >>> wb.winners.lower, wb.winners.upper
    (0.5, 0.5)
    """
    _check_subgroup(a, b)
    sups = _piece_sups(d0, d1, a, b)
    m = b - a
    wl, ll = sups["winners_lower"][0], sups["losers_lower"][0]
    wu = m - sups["winners_upper"][0]
    lu = m - sups["losers_upper"][0]
    return WinnerBounds(
        winners=IntervalBound(wl, wu, a, b),
        losers=IntervalBound(ll, lu, a, b),
        winners_weak_upper=m - ll,
        losers_weak_upper=m - wl,
        argmax={name: sups[name][1] for name in SUP_NAMES},
        thresholds={name: sups[name][2] for name in SUP_NAMES},
    )


def winner_curve(
    d0: EmpiricalDist,
    d1: EmpiricalDist,
    grid=None,
    tail: str = "left",
    kind: str = "winners",
) -> BoundCurve:
    """Conditional winner (or loser) bounds at each threshold of ``grid``.

    The curve's ``extra`` carries the weak-event upper bound and the
    maximizing x of the lower-bound supremum at each point.
    """
    if kind not in ("winners", "losers"):
        raise ValueError(f"kind must be 'winners' or 'losers', got {kind!r}")
    grid = default_grid(d0, tail) if grid is None else check_grid(grid, tail)
    out, weak, arg = [], [], []
    for t in grid:
        wb = winner_bounds(d0, d1, *subgroup(t, tail)).conditional()
        out.append(getattr(wb, kind))
        weak.append(getattr(wb, f"{kind}_weak_upper"))
        arg.append(wb.argmax[f"{kind}_lower"])
    return BoundCurve(
        grid, out, tail=tail, kind=kind, extra={"weak_upper": np.array(weak), "argmax_x": arg}
    )


def makarov_bounds(d0: EmpiricalDist, d1: EmpiricalDist, c: float) -> IntervalBound:
    """Bounds on P(Y1 - Y0 < c) over the whole population.

    This is the loser bound for the pair (Y0, Y1 - c) on (0, 1).
    """
    if np.isnan(c):
        raise ValueError("c must not be NaN")
    if np.isposinf(c):
        return IntervalBound(1.0, 1.0)
    if np.isneginf(c):
        return IntervalBound(0.0, 0.0)
    return winner_bounds(d0, d1.shift(-c), 0.0, 1.0).losers


# --- fixed-x evaluation used by resampling inference -----------------------


@dataclass(frozen=True)
class PieceTable:
    """F1 evaluated at Q0(x) and Q0(x+) (and their left limits) for fixed x.

    Evaluating at a fixed set of x keeps pieces comparable across bootstrap
    resamples whose own breakpoints differ.
    """

    xs: np.ndarray
    f_at: np.ndarray
    f_at_left: np.ndarray
    f_after: np.ndarray
    f_after_left: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.concatenate((self.f_at, self.f_at_left, self.f_after, self.f_after_left))

    @classmethod
    def from_stacked(cls, xs: np.ndarray, arr: np.ndarray) -> "PieceTable":
        return cls(xs, *np.split(np.asarray(arr, dtype=float), 4, axis=-1))


def piece_table(d0: EmpiricalDist, d1: EmpiricalDist, xs: np.ndarray) -> PieceTable:
    xs = np.asarray(xs, dtype=float)
    q_at = d0._q(xs)
    idx = np.searchsorted(d0.cum, xs, side="right")
    q_after = d0.values[np.minimum(idx, d0.values.size - 1)]
    return PieceTable(xs, d1.cdf(q_at), d1.cdf_left(q_at), d1.cdf(q_after), d1.cdf_left(q_after))


def piece_points(d0: EmpiricalDist, grid) -> np.ndarray:
    """Union of the control breakpoints, 0, and the grid thresholds."""
    return np.unique(np.concatenate(([0.0], d0.cum, np.asarray(grid, dtype=float))))


def piece_values(table: PieceTable, a: float, b: float, which: str):
    """Per-x terms of one winner/loser bound on (a, b).

    Returns ``(mask, values, direction)``. For ``direction == "lower"`` the
    bound is sup of the values (then clipped to [0, b - a]); for ``"upper"``
    it is the inf (then clipped). Works on a single table or on stacked
    bootstrap replicates along the last axis.
    """
    xs = table.xs
    right = (xs > a) & (xs <= b)
    left = (xs >= a) & (xs < b)
    if which == "winners_lower":
        return right, (xs - a) - table.f_at, "lower"
    if which == "winners_upper":
        return left, (xs - a) + (1.0 - table.f_after), "upper"
    if which == "losers_lower":
        return left, (b - xs) - (1.0 - table.f_after_left), "lower"
    if which == "losers_upper":
        return right, (b - xs) + table.f_at_left, "upper"
    raise ValueError(f"unknown bound {which!r}")


def bound_from_pieces(table: PieceTable, a: float, b: float, which: str) -> float:
    mask, vals, direction = piece_values(table, a, b, which)
    v = vals[..., mask]
    raw = v.max(axis=-1) if direction == "lower" else v.min(axis=-1)
    return np.clip(raw, 0.0, b - a)

