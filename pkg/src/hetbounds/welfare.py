"""Welfare bounds for nondecreasing concave welfare functions and maximin targeting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import BoundCurve, IntervalBound, check_grid, default_grid
from .distribution import EmpiricalDist, integrate_transformed
from .ste import _check_subgroup, ste_bounds


class WelfareFn:
    """Piecewise-linear nondecreasing concave h with h(0) = 0.

    ``slopes[0]`` applies left of ``knots[0]``, ``slopes[i]`` between
    ``knots[i-1]`` and ``knots[i]``, and ``slopes[-1]`` right of the last knot.

    >>> h = WelfareFn.parse("1.1|0|1")
    >>> float(h(-1.0)), float(h(2.0))
    (-1.1, 2.0)
    """

    def __init__(self, knots=(), slopes=(1.0,)):
        knots = np.asarray(knots, dtype=float).ravel()
        slopes = np.asarray(slopes, dtype=float).ravel()
        if slopes.size != knots.size + 1:
            raise ValueError(
                f"need one more slope than knots, got {slopes.size} slopes and {knots.size} knots"
            )
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(slopes))):
            raise ValueError("knots and slopes must be finite")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(slopes < 0):
            raise ValueError("slopes must be nonnegative (h nondecreasing)")
        if np.any(np.diff(slopes) > 0):
            raise ValueError("slopes must be nonincreasing (h concave)")
        self.knots = knots
        self.slopes = slopes
        # h at each knot, anchored so that h(0) = 0
        at_knots = np.concatenate(([0.0], np.cumsum(slopes[1:-1] * np.diff(knots))))
        self._at_knots = at_knots
        self._at_knots = at_knots - self(0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.knots.size == 0:
            return self.slopes[0] * x
        i = np.searchsorted(self.knots, x, side="right")
        j = np.maximum(i - 1, 0)
        return self._at_knots[j] + self.slopes[i] * (x - self.knots[j])

    @classmethod
    def identity(cls) -> "WelfareFn":
        return cls((), (1.0,))

    @classmethod
    def loss_averse(cls, loss_weight: float = 1.1) -> "WelfareFn":
        """h(x) = x for gains and loss_weight * x for losses."""
        return cls((0.0,), (loss_weight, 1.0))

    @classmethod
    def parse(cls, text: str) -> "WelfareFn":
        """Parse ``slope0|knot1|slope1|...``."""
        parts = [p.strip() for p in str(text).split("|")]
        if len(parts) % 2 != 1:
            raise ValueError(f"welfare function {text!r} must alternate slope|knot|slope|...")
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"welfare function {text!r} contains a non-numeric entry") from None
        return cls(nums[1::2], nums[0::2])

    def to_text(self) -> str:
        parts = [repr(float(self.slopes[0]))]
        for k, s in zip(self.knots, self.slopes[1:]):
            parts += [repr(float(k)), repr(float(s))]
        return "|".join(parts)

    def __repr__(self):
        return f"WelfareFn({self.to_text()!r})"


def welfare_bounds(
    d0: EmpiricalDist, d1: EmpiricalDist, h: WelfareFn, a: float = 0.0, b: float = 1.0
) -> IntervalBound:
    """Bounds on E[h(Y1 - Y0) 1{a<U<b}]; ``.conditional`` gives E[h(Y1 - Y0) | a<U<b].

    The lower bound couples the subgroup antitonically with the bottom
    b - a mass of the treated distribution, the upper bound comonotonically
    with the top b - a mass.
    """
    if not isinstance(h, WelfareFn):
        raise TypeError("h must be a WelfareFn")
    _check_subgroup(a, b)
    lo = integrate_transformed(d0, d1, a, b, offset=b, sign=-1, transform=h)
    hi = integrate_transformed(d0, d1, a, b, offset=1.0 - b, sign=1, transform=h)
    return IntervalBound(lo, hi, a, b)


def utilitarian_welfare_curve(
    d0: EmpiricalDist, d1: EmpiricalDist, cost: float = 0.0, grid=None
) -> BoundCurve:
    """Per-capita welfare E[(Y1 - Y0 - cost) 1{U<b}] for each b in ``grid``."""
    if not cost >= 0:
        raise ValueError("cost must be nonnegative")
    grid = default_grid(d0, "left") if grid is None else check_grid(grid, "left")
    out = [ste_bounds(d0, d1, 0.0, t).shifted(-cost * t) for t in grid]
    return BoundCurve(grid, out, tail="left", kind="utilitarian")


def nonutilitarian_welfare_curve(
    d0: EmpiricalDist, d1: EmpiricalDist, h: WelfareFn, grid=None, cost: float = 0.0
) -> BoundCurve:
    """Per-capita welfare E[h(Y1 - Y0) 1{U<b}] - cost * b for each b in ``grid``.

    The extremal couplings depend on b, so every point is evaluated afresh.
    """
    if not cost >= 0:
        raise ValueError("cost must be nonnegative")
    grid = default_grid(d0, "left") if grid is None else check_grid(grid, "left")
    out = [welfare_bounds(d0, d1, h, 0.0, t).shifted(-cost * t) for t in grid]
    return BoundCurve(grid, out, tail="left", kind="nonutilitarian")


@dataclass(frozen=True)
class PolicyResult:
    """Maximin eligibility rule: treat units with control rank below ``b_star``.

    ``b_star == 0`` means treating nobody; then ``y0_threshold`` is ``None``.
    ``threshold_ambiguous`` is set when ``b_star`` falls strictly inside a
    flat step of Q0, so the rule splits a tie in control outcomes.
    """

    b_star: float
    y0_threshold: Optional[float]
    welfare_at_star: IntervalBound
    curve: BoundCurve
    threshold_ambiguous: bool = False

    def to_dict(self) -> dict:
        return {
            "b_star": float(self.b_star),
            "y0_threshold": None if self.y0_threshold is None else float(self.y0_threshold),
            "threshold_ambiguous": bool(self.threshold_ambiguous),
            "welfare_at_star": self.welfare_at_star.to_dict(),
        }


def maximin_policy(
    d0: EmpiricalDist,
    d1: EmpiricalDist,
    h: Optional[WelfareFn] = None,
    cost: float = 0.0,
    grid=None,
    tie_tol: float = 1e-12,
) -> PolicyResult:
    """Threshold b maximizing the welfare lower bound.

    ``h=None`` is the utilitarian objective. Treating nobody (b = 0, welfare
    exactly 0) is always a candidate. Ties within ``tie_tol`` (relative) go to
    the smallest b.
    """
    if h is None:
        curve = utilitarian_welfare_curve(d0, d1, cost, grid)
    else:
        curve = nonutilitarian_welfare_curve(d0, d1, h, grid, cost)
    zero = IntervalBound(0.0, 0.0, 0.0, 0.0)
    full = BoundCurve(
        np.concatenate(([0.0], curve.grid)), [zero] + curve.bounds, tail="left", kind=curve.kind
    )
    lowers = full.lower
    best = lowers.max()
    tol = tie_tol * max(1.0, abs(best))
    k = int(np.flatnonzero(lowers >= best - tol)[0])
    b_star = float(full.grid[k])
    if k == 0:
        return PolicyResult(0.0, None, zero, full, False)
    on_break = bool(np.any(np.abs(d0.cum - b_star) <= 1e-12))
    return PolicyResult(b_star, float(d0.quantile(b_star)), full.bounds[k], full, not on_break)
