"""Brute-force ground truth on tiny equal-weight instances.

With n equally weighted units per arm, every coupling of the two empirical
marginals is a doubly stochastic matrix. Subgroup functionals are linear in
that matrix, so their extremes are reached at permutations (Birkhoff), and
enumerating all n! assignments gives exact minima and maxima.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .distribution import EmpiricalDist
from .winners import winner_bounds

MAX_N = 8

FUNCTIONALS = (
    "mean-effect",
    "mean-h",
    "winner-count",
    "loser-count",
    "positive-part",
    "negative-part",
)


@dataclass(frozen=True)
class CouplingInstance:
    """Two equal-size arms and the rank subgroup a < U < b.

    ``y0`` is stored sorted, so unit k has control rank interval (k/n, (k+1)/n]
    and the subgroup is the ranks ``lo <= k < hi`` with lo = a*n, hi = b*n.
    """

    y0: np.ndarray
    y1: np.ndarray
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        y0 = np.sort(np.asarray(self.y0, dtype=float).ravel())
        y1 = np.asarray(self.y1, dtype=float).ravel()
        n = y0.size
        if n == 0 or y1.size != n:
            raise ValueError("both arms must be nonempty and of equal size")
        if n > MAX_N:
            raise ValueError(f"enumeration is limited to n <= {MAX_N}, got n={n}")
        if not 0.0 <= self.a < self.b <= 1.0:
            raise ValueError(f"need 0 <= a < b <= 1, got ({self.a}, {self.b})")
        for t in (self.a, self.b):
            if abs(t * n - round(t * n)) > 1e-9:
                raise ValueError(f"subgroup endpoint {t} is not a multiple of 1/{n}")
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "y1", y1)

    @property
    def n(self) -> int:
        return self.y0.size

    @property
    def ranks(self) -> range:
        return range(round(self.a * self.n), round(self.b * self.n))


@lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)


def _pointwise(functional: str, h: Optional[Callable]) -> Callable[[np.ndarray], np.ndarray]:
    if functional == "mean-effect":
        return lambda d: d
    if functional == "mean-h":
        if h is None:
            raise ValueError("functional 'mean-h' needs a welfare function h")
        return lambda d: np.asarray(h(d), dtype=float)
    if functional == "winner-count":
        return lambda d: (d > 0).astype(float)
    if functional == "loser-count":
        return lambda d: (d < 0).astype(float)
    if functional == "positive-part":
        return lambda d: np.maximum(d, 0.0)
    if functional == "negative-part":
        return lambda d: np.maximum(-d, 0.0)
    raise ValueError(f"unknown functional {functional!r}; expected one of {FUNCTIONALS}")


def subgroup_extremes(y0, y1, functional: str, h=None) -> tuple[np.ndarray, np.ndarray]:
    """Min and max of E[g(Y1 - Y0) 1{lo/n < U < hi/n}] for every 0 <= lo < hi <= n.

    Returns two (n+1, n+1) arrays indexed [lo, hi]; entries with lo >= hi are NaN.
    Values are joint-normalized (divided by n).
    """
    y0 = np.sort(np.asarray(y0, dtype=float).ravel())
    y1 = np.asarray(y1, dtype=float).ravel()
    n = y0.size
    if n > MAX_N:
        raise ValueError(f"enumeration is limited to n <= {MAX_N}, got n={n}")
    g = _pointwise(functional, h)
    perms = _permutations(n)
    vals = g(y1[perms] - y0[None, :])
    csum = np.zeros((perms.shape[0], n + 1))
    np.cumsum(vals, axis=1, out=csum[:, 1:])
    lo_out = np.full((n + 1, n + 1), np.nan)
    hi_out = np.full((n + 1, n + 1), np.nan)
    for lo in range(n):
        block = csum[:, lo + 1 :] - csum[:, [lo]]
        lo_out[lo, lo + 1 :] = block.min(axis=0) / n
        hi_out[lo, lo + 1 :] = block.max(axis=0) / n
    return lo_out, hi_out


def oracle_extremes(inst: CouplingInstance, functional: str, h=None) -> tuple[float, float]:
    """Exact (min, max) of E[g(Y1 - Y0) 1{a<U<b}] over all couplings.

    >>> oracle_extremes(CouplingInstance([0, 10], [1, 5]), "winner-count")
    (0.5, 0.5)
    """
    g = _pointwise(functional, h)
    perms = _permutations(inst.n)
    idx = list(inst.ranks)
    diffs = inst.y1[perms[:, idx]] - inst.y0[idx][None, :]
    totals = g(diffs).sum(axis=1) / inst.n
    return float(totals.min()), float(totals.max())


@dataclass(frozen=True)
class ExtremalCoupling:
    """Coupling from the attainment argument for the winner lower bound.

    ``perm[k]`` is the index into the sorted treated outcomes assigned to the
    control unit of rank k. ``shift`` is the number of subgroup units left
    free at the bottom of the subgroup and ``exact`` says whether the bound
    times n was an integer.
    """

    perm: np.ndarray
    winners: int
    bound: float
    shift: int
    exact: bool


def extremal_lower_coupling(y0, y1, a: float = 0.0, b: float = 1.0) -> ExtremalCoupling:
    """Assignment whose subgroup winner count equals the winner lower bound.

    Subgroup ranks from lo + D upward receive the treated outcomes in
    increasing order starting from the smallest, where D = n * bound. Those
    units cannot win; the first D subgroup ranks and everyone outside the
    subgroup take the remaining treated outcomes.
    """
    inst = CouplingInstance(y0, y1, a, b)
    n = inst.n
    y1s = np.sort(inst.y1)
    d0 = EmpiricalDist.from_values(inst.y0)
    d1 = EmpiricalDist.from_values(y1s)
    bound = winner_bounds(d0, d1, a, b).winners.lower
    target = bound * n
    shift = int(math.ceil(target - 1e-9))
    exact = abs(target - shift) <= 1e-9
    lo, hi = inst.ranks.start, inst.ranks.stop
    perm = np.empty(n, dtype=np.intp)
    tail_ranks = np.arange(lo + shift, hi)
    perm[tail_ranks] = tail_ranks - lo - shift
    rest_ranks = np.concatenate((np.arange(0, lo + shift), np.arange(hi, n)))
    perm[rest_ranks] = np.arange(hi - lo - shift, n)
    sub = np.arange(lo, hi)
    winners = int(np.sum(y1s[perm[sub]] > inst.y0[sub]))
    return ExtremalCoupling(perm, winners, bound, shift, exact)
