"""Sharp bounds on subgroup treatment effects, winner/loser shares and welfare.

Subgroups are bands a < U < b of the normalized control-outcome rank U. All
bounds are computed exactly from the two marginal outcome distributions.
"""

from .bounds import BoundCurve, IntervalBound, default_grid, uniform_grid
from .diagnostics import KsResult, ks_statistic, ks_test
from .distribution import (
    EmpiricalDist,
    WeightedSample,
    build_dist,
    integrate_transformed,
    negative_part,
    positive_part,
)
from .inference import (
    BootstrapPlan,
    BootstrapResult,
    HmuResult,
    InferenceResult,
    bootstrap_ses,
    hmu_sup_bound,
    im_critical_value,
    im_interval,
    interval_curve_inference,
    winner_curve_inference,
    winner_point_inference,
)
from .oracle import CouplingInstance, ExtremalCoupling, extremal_lower_coupling, oracle_extremes, subgroup_extremes
from .ste import mean_difference, ste_bounds, ste_curve, ste_negative_part_bounds, ste_positive_part_bounds
from .welfare import (
    PolicyResult,
    WelfareFn,
    maximin_policy,
    nonutilitarian_welfare_curve,
    utilitarian_welfare_curve,
    welfare_bounds,
)
from .winners import WinnerBounds, makarov_bounds, winner_bounds, winner_curve

__version__ = "0.1.0"

__all__ = [
    "bootstrap_ses",
    "BootstrapPlan",
    "BootstrapResult",
    "BoundCurve",
    "build_dist",
    "CouplingInstance",
    "default_grid",
    "EmpiricalDist",
    "extremal_lower_coupling",
    "ExtremalCoupling",
    "hmu_sup_bound",
    "HmuResult",
    "im_critical_value",
    "im_interval",
    "InferenceResult",
    "integrate_transformed",
    "interval_curve_inference",
    "IntervalBound",
    "ks_statistic",
    "ks_test",
    "KsResult",
    "makarov_bounds",
    "maximin_policy",
    "mean_difference",
    "negative_part",
    "nonutilitarian_welfare_curve",
    "oracle_extremes",
    "PolicyResult",
    "positive_part",
    "ste_bounds",
    "ste_curve",
    "ste_negative_part_bounds",
    "ste_positive_part_bounds",
    "subgroup_extremes",
    "uniform_grid",
    "utilitarian_welfare_curve",
    "WeightedSample",
    "welfare_bounds",
    "WelfareFn",
    "winner_bounds",
    "winner_curve",
    "winner_curve_inference",
    "winner_point_inference",
    "WinnerBounds",
]
