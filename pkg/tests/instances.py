"""Random equal-weight instances shared by the test modules."""

import numpy as np

from hetbounds import EmpiricalDist


def random_instance(rng, n, distinct=False):
    """Two arms of size n; with ``distinct=False`` values come from a small lattice so ties occur."""
    if distinct:
        vals = rng.permutation(np.arange(2 * n)).astype(float) + rng.uniform(0, 0.5)
        y0, y1 = vals[:n], vals[n:] + rng.integers(-2, 4)
    else:
        y0 = rng.integers(0, 5, n).astype(float)
        y1 = rng.integers(-1, 6, n).astype(float)
    return np.sort(y0), y1


def dists(y0, y1, w0=None, w1=None):
    return EmpiricalDist.from_values(y0, w0), EmpiricalDist.from_values(y1, w1)


def breakpoint_pairs(n):
    return [(lo, hi) for lo in range(n) for hi in range(lo + 1, n + 1)]


def uniform_shift_arms(rng, n, delta):
    """Y0 ~ U(0,1) and Y1 = U' + delta drawn independently per arm."""
    from hetbounds import WeightedSample

    return WeightedSample(rng.uniform(0, 1, n)), WeightedSample(rng.uniform(0, 1, n) + delta)
