# coding: utf-8

# # How many people gained, how many lost?
#
# Even when the average effect is positive, some units may lose. The share
# of winners P(Y1 > Y0 | U < b) has sharp bounds computed from a supremum
# over the control quantile function; no search grid is involved.

import numpy as np

from hetbounds import build_dist, makarov_bounds, uniform_grid, winner_bounds, winner_curve
from _data import earnings_experiment

arm0, arm1 = earnings_experiment()
d0, d1 = build_dist(arm0), build_dist(arm1)

wb = winner_bounds(d0, d1, 0.0, 0.5).conditional()
print(f"winners among the bottom half: [{wb.winners.lower:.3f}, {wb.winners.upper:.3f}]")
print(f"losers  among the bottom half: [{wb.losers.lower:.3f}, {wb.losers.upper:.3f}]")

# The supremum is reached at a control rank x; the control outcome there is
# the natural threshold to report.

print("lower bound reached at rank", round(wb.argmax["winners_lower"], 3),
      "control outcome", wb.thresholds["winners_lower"])

# Curves over b. The lower bound of the joint share is nondecreasing in b;
# the conditional share can fall as richer people are added.

curve = winner_curve(d0, d1, uniform_grid(10, "left"), "left", "winners")
for t, lo, hi in zip(curve.grid, curve.lower, curve.upper):
    print(f"  b={t:.1f}  winners in [{lo:.3f}, {hi:.3f}]")

losers = winner_curve(d0, d1, uniform_grid(10, "right"), "right", "losers")
print("\nloser lower bound among units above rank a:", np.round(losers.lower, 3))

# With the whole population, the loser machinery reproduces the classical
# Makarov bounds on the distribution of Y1 - Y0.

for c in (-500.0, 0.0, 500.0):
    bd = makarov_bounds(d0, d1, c)
    print(f"P(Y1 - Y0 < {c:+.0f}) in [{bd.lower:.3f}, {bd.upper:.3f}]")
