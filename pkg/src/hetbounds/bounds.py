"""Result containers shared by the bound modules."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

TOL = 1e-12


@dataclass(frozen=True)
class IntervalBound:
    """A partially identified scalar on the subgroup a < U < b.

    ``normalization`` is ``"joint"`` for E[g 1{a<U<b}] and ``"conditional"``
    for E[g | a<U<b].
    """

    lower: float
    upper: float
    a: float = 0.0
    b: float = 1.0
    normalization: str = "joint"

    def __post_init__(self):
        # a == b is the empty subgroup (treat nobody); it has no conditional form
        if not (0.0 <= self.a <= self.b <= 1.0):
            raise ValueError(f"invalid subgroup ({self.a}, {self.b})")
        if self.normalization not in ("joint", "conditional"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.lower > self.upper + TOL * max(1.0, abs(self.lower), abs(self.upper)):
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def conditional(self) -> "IntervalBound":
        if self.normalization == "conditional":
            return self
        m = self.b - self.a
        if m <= 0:
            raise ValueError("the empty subgroup has no conditional normalization")
        return replace(self, lower=self.lower / m, upper=self.upper / m, normalization="conditional")

    @property
    def joint(self) -> "IntervalBound":
        if self.normalization == "joint":
            return self
        m = self.b - self.a
        return replace(self, lower=self.lower * m, upper=self.upper * m, normalization="joint")

    def shifted(self, c: float) -> "IntervalBound":
        return replace(self, lower=self.lower + c, upper=self.upper + c)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol

    def to_dict(self) -> dict:
        return {
            "lower": float(self.lower),
            "upper": float(self.upper),
            "a": float(self.a),
            "b": float(self.b),
            "normalization": self.normalization,
        }


@dataclass
class BoundCurve:
    """Bounds over a grid of subgroup thresholds.

    For ``tail="left"`` grid values are b with subgroup (0, b); for
    ``tail="right"`` they are a with subgroup (a, 1).
    """

    grid: np.ndarray
    bounds: list
    tail: str = "left"
    kind: str = "ste"
    inference: Optional[list] = None
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([bd.lower for bd in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([bd.upper for bd in self.bounds])

    def rows(self) -> list[dict]:
        """Plot-ready rows, one per grid point."""
        out = []
        for i, (t, bd) in enumerate(zip(self.grid, self.bounds)):
            row = {"threshold": float(t), "a": bd.a, "b": bd.b, "lower": bd.lower, "upper": bd.upper}
            for name, values in self.extra.items():
                row[name] = values[i]
            if self.inference is not None:
                inf = self.inference[i]
                row.update(
                    est_lower=inf.estimate.lower,
                    est_upper=inf.estimate.upper,
                    se_lower=inf.se_lower,
                    se_upper=inf.se_upper,
                    ci_lower=inf.ci[0],
                    ci_upper=inf.ci[1],
                    flags=";".join(inf.flags),
                )
            out.append(row)
        return out


def subgroup(t: float, tail: str) -> tuple[float, float]:
    """Subgroup endpoints for grid value ``t`` on the given tail."""
    if tail == "left":
        return 0.0, float(t)
    if tail == "right":
        return float(t), 1.0
    raise ValueError(f"tail must be 'left' or 'right', got {tail!r}")


def check_grid(grid, tail: str) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if tail == "left" and not (grid[0] > 0 and grid[-1] <= 1):
        raise ValueError("left-tail grid values must lie in (0, 1]")
    if tail == "right" and not (grid[0] >= 0 and grid[-1] < 1):
        raise ValueError("right-tail grid values must lie in [0, 1)")
    subgroup(0.5, tail)
    return grid


def default_grid(d0, tail: str = "left", max_points: int = 512) -> np.ndarray:
    """Breakpoints of the control distribution, thinned to ``max_points``.

    Left tails use the breakpoints c_1..c_m (so b = 1 is always present);
    right tails use 0, c_1..c_{m-1}.
    """
    pts = d0.cum if tail == "left" else d0.prev
    if pts.size > max_points:
        idx = np.unique(np.round(np.linspace(0, pts.size - 1, max_points)).astype(int))
        pts = pts[idx]
    return check_grid(pts.copy(), tail)


def uniform_grid(size: int, tail: str = "left") -> np.ndarray:
    """``size`` evenly spaced thresholds: k/size for k=1..size (left) or k=0..size-1 (right)."""
    if size < 1:
        raise ValueError("grid size must be positive")
    k = np.arange(1, size + 1) if tail == "left" else np.arange(size)
    return check_grid(k / size, tail)
