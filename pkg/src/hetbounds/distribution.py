"""Weighted empirical distributions as exact step functions.

Every distribution is stored as its distinct sorted support points together
with the cumulative normalized weights, so the CDF, its left limit and the
left-continuous quantile function are all exact lookups, and integrals of
quantile functions reduce to finite sums over step pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Transform = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WeightedSample:
    """Observations from one study arm.

    Parameters
    ----------
    values : array
        Outcome values.
    weights : array, optional
        Positive sampling weights. Defaults to ones.
    clusters : array, optional
        Cluster labels used by cluster resampling and cluster permutation.
    """

    values: np.ndarray
    weights: Optional[np.ndarray] = None
    clusters: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("sample is empty")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample values must be finite")
        if self.weights is None:
            weights = np.ones_like(values)
        else:
            weights = np.asarray(self.weights, dtype=float).ravel()
            if weights.shape != values.shape:
                raise ValueError(
                    f"weights have length {weights.size}, values have length {values.size}"
                )
            if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
                raise ValueError("weights must be finite and strictly positive")
        clusters = self.clusters
        if clusters is not None:
            clusters = np.asarray(clusters).ravel()
            if clusters.shape != values.shape:
                raise ValueError(
                    f"clusters have length {clusters.size}, values have length {values.size}"
                )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "clusters", clusters)

    def __len__(self):
        return self.values.size

    @property
    def has_unit_weights(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def take(self, idx: np.ndarray) -> "WeightedSample":
        clusters = None if self.clusters is None else self.clusters[idx]
        return WeightedSample(self.values[idx], self.weights[idx], clusters)


class EmpiricalDist:
    """Step-function CDF/quantile pair of a weighted sample.

    ``values`` holds the distinct support points y_1 < ... < y_m and ``cum``
    the cumulative normalized weights c_1 < ... < c_m = 1. The quantile
    function is Q(u) = y_k on (c_{k-1}, c_k].
    """

    __slots__ = ("values", "cum", "prev")

    def __init__(self, values, cum):
        values = np.asarray(values, dtype=float)
        cum = np.asarray(cum, dtype=float)
        if values.ndim != 1 or values.size == 0 or values.shape != cum.shape:
            raise ValueError("values and cum must be nonempty 1-d arrays of equal length")
        if np.any(np.diff(values) <= 0):
            raise ValueError("support values must be strictly increasing")
        if np.any(np.diff(cum) <= 0) or cum[0] <= 0 or cum[-1] != 1.0:
            raise ValueError("cumulative weights must increase strictly to exactly 1")
        values.flags.writeable = False
        cum.flags.writeable = False
        self.values = values
        self.cum = cum
        prev = np.concatenate(([0.0], cum[:-1]))
        prev.flags.writeable = False
        self.prev = prev

    @classmethod
    def from_values(cls, values, weights=None) -> "EmpiricalDist":
        return build_dist(WeightedSample(values, weights))

    def __repr__(self):
        return f"EmpiricalDist(m={self.values.size}, support=[{self.values[0]:g}, {self.values[-1]:g}])"

    def __len__(self):
        return self.values.size

    @property
    def probs(self) -> np.ndarray:
        """Probability mass at each support point."""
        return self.cum - self.prev

    def mean(self) -> float:
        return math.fsum(self.values * self.probs)

    def shift(self, c: float) -> "EmpiricalDist":
        """Distribution of Y + c."""
        return EmpiricalDist(self.values + c, self.cum.copy())

    def reflect(self) -> "EmpiricalDist":
        """Distribution of -Y."""
        mass = self.probs[::-1]
        cum = np.cumsum(mass.astype(np.longdouble)).astype(float)
        cum[-1] = 1.0
        return EmpiricalDist(-self.values[::-1], cum)

    def cdf(self, y):
        """F(y): mass of support points <= y. Right-continuous."""
        idx = np.searchsorted(self.values, y, side="right")
        out = np.where(idx > 0, self.cum[np.maximum(idx - 1, 0)], 0.0)
        return out if np.ndim(y) else float(out)

    def cdf_left(self, y):
        """F(y-): mass of support points strictly below y."""
        idx = np.searchsorted(self.values, y, side="left")
        out = np.where(idx > 0, self.cum[np.maximum(idx - 1, 0)], 0.0)
        return out if np.ndim(y) else float(out)

    def quantile(self, u):
        """Left-continuous generalized inverse Q(u) = inf{y : F(y) >= u}, 0 < u <= 1."""
        arr = np.asarray(u, dtype=float)
        if np.any(~(arr > 0)) or np.any(arr > 1):
            raise ValueError("quantile level must lie in (0, 1]")
        out = self._q(arr)
        return out if np.ndim(u) else float(out)

    def quantile_right(self, u):
        """Right limit Q(u+), the value of the step just above level u, 0 <= u < 1."""
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0) or np.any(~(arr < 1)):
            raise ValueError("quantile level must lie in [0, 1)")
        idx = np.searchsorted(self.cum, arr, side="right")
        out = self.values[np.minimum(idx, self.values.size - 1)]
        return out if np.ndim(u) else float(out)

    def _q(self, u: np.ndarray) -> np.ndarray:
        # unchecked lookup; levels outside (0, 1] clamp to the extreme steps
        idx = np.searchsorted(self.cum, u, side="left")
        return self.values[np.minimum(idx, self.values.size - 1)]

    def integrate_quantile(self, a: float, b: float) -> float:
        """Exact integral of Q over (a, b)."""
        _check_unit_interval(a, b)
        lo = np.maximum(self.prev, a)
        hi = np.minimum(self.cum, b)
        return math.fsum(self.values * np.clip(hi - lo, 0.0, None))


def build_dist(sample: WeightedSample) -> EmpiricalDist:
    """Merge ties and normalize weights into an :class:`EmpiricalDist`."""
    if not isinstance(sample, WeightedSample):
        sample = WeightedSample(sample)
    values, inverse = np.unique(sample.values, return_inverse=True)
    mass = np.bincount(inverse, weights=sample.weights, minlength=values.size)
    # extended-precision running sum keeps c_k accurate; the last step is pinned to 1
    running = np.cumsum(mass.astype(np.longdouble))
    cum = (running / running[-1]).astype(float)
    cum[-1] = 1.0
    keep = np.concatenate((np.diff(cum) > 0, [True]))
    if not keep.all():
        # a weight below float resolution of the total; fold it into the next point
        values, cum = values[keep], cum[keep]
    return EmpiricalDist(values, cum)


def _check_unit_interval(a: float, b: float):
    if not (0.0 <= a < b <= 1.0):
        raise ValueError(f"need 0 <= a < b <= 1, got a={a!r}, b={b!r}")


def positive_part(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def negative_part(x: np.ndarray) -> np.ndarray:
    return np.maximum(-x, 0.0)


def integrate_transformed(
    d0: EmpiricalDist,
    d1: EmpiricalDist,
    a: float,
    b: float,
    offset: float = 0.0,
    sign: int = 1,
    transform: Optional[Transform] = None,
) -> float:
    """Exact value of the integral over (a, b) of g(Q1(offset + sign*u) - Q0(u)).

    The integrand is piecewise constant on the common refinement of the
    breakpoints of Q0 and of u -> Q1(offset + sign*u), so the integral is a
    finite sum. ``transform`` is the vectorized g; ``None`` means identity.
    """
    _check_unit_interval(a, b)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    ends = (offset + sign * a, offset + sign * b)
    if min(ends) < -1e-12 or max(ends) > 1 + 1e-12:
        raise ValueError(
            f"u-map sends ({a}, {b}) outside the unit interval: {ends}"
        )
    br0 = d0.cum[(d0.cum > a) & (d0.cum < b)]
    br1 = sign * (d1.cum - offset)
    br1 = br1[(br1 > a) & (br1 < b)]
    edges = np.unique(np.concatenate(([a], br0, br1, [b])))
    lengths = np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    diff = d1._q(offset + sign * mids) - d0._q(mids)
    vals = diff if transform is None else np.asarray(transform(diff), dtype=float)
    return math.fsum(vals * lengths)
