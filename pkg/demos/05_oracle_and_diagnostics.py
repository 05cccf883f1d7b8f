# coding: utf-8

# # Checking the formulas by brute force, and testing for any effect
#
# With n equally weighted units per arm every coupling is a mixture of
# permutations, so on tiny data the bounds can be checked by enumerating
# all n! assignments.

import numpy as np

from hetbounds import (
    CouplingInstance,
    EmpiricalDist,
    build_dist,
    extremal_lower_coupling,
    ks_test,
    oracle_extremes,
    ste_bounds,
    winner_bounds,
)
from _data import earnings_experiment

y0 = np.array([3.1, 0.4, 7.7, 5.2, 1.9, 9.0])
y1 = np.array([4.4, 2.6, 8.8, 3.5, 6.9, 10.2])
d0, d1 = EmpiricalDist.from_values(y0), EmpiricalDist.from_values(y1)

inst = CouplingInstance(y0, y1, 0.0, 0.5)
print("STE on bottom half, formula:", ste_bounds(d0, d1, 0, 0.5))
print("                     oracle:", oracle_extremes(inst, "mean-effect"))
wb = winner_bounds(d0, d1, 0, 0.5)
print("winner share, formula:", (wb.winners.lower, wb.winners.upper),
      "oracle:", oracle_extremes(inst, "winner-count"))

# The coupling that attains the winner lower bound, as an assignment of
# sorted treated outcomes to control ranks.

ec = extremal_lower_coupling(y0, y1, 0.0, 0.5)
print("extremal assignment:", ec.perm, "winners in subgroup:", ec.winners, "of", 3)

# A permutation Kolmogorov-Smirnov test of equal distributions. If it does
# not reject, nothing here rules out a zero effect for everyone.

arm0, arm1 = earnings_experiment()
print(ks_test(arm0, arm1, permutations=999, seed=1))
print(ks_test(arm0, arm1, permutations=999, seed=1, cluster=True))
print("quantile gap at the median:", build_dist(arm1).quantile(0.5) - build_dist(arm0).quantile(0.5))
