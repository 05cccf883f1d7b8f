# coding: utf-8

# # Welfare and a maximin eligibility threshold
#
# A planner treats everyone below control rank b and pays a cost per treated
# person. Welfare is only partially identified, so we pick the b that
# maximizes the worst case.

from hetbounds import WelfareFn, build_dist, maximin_policy, nonutilitarian_welfare_curve, uniform_grid
from _data import earnings_experiment

arm0, arm1 = earnings_experiment()
d0, d1 = build_dist(arm0), build_dist(arm1)

for cost in (0.0, 150.0, 400.0):
    res = maximin_policy(d0, d1, cost=cost)
    print(f"cost {cost:5.0f}: treat U < {res.b_star:.3f}, threshold {res.y0_threshold}, "
          f"worst-case welfare {res.welfare_at_star.lower:.1f}")

# Losses can count more than gains. With h(x) = 1.1 x for x < 0 and x
# otherwise, welfare E[h(Y1 - Y0)] no longer depends on the marginals only
# through their means, and its bounds use a coupling that changes with b.

h = WelfareFn.parse("1.1|0|1")
curve = nonutilitarian_welfare_curve(d0, d1, h, uniform_grid(10, "left"))
for row in curve.rows():
    print(f"  b={row['threshold']:.1f}  [{row['lower']:8.1f}, {row['upper']:8.1f}]")
res = maximin_policy(d0, d1, h=h)
print("loss-averse maximin threshold:", res.b_star, "ambiguous:", res.threshold_ambiguous)
