"""Bootstrap standard errors, Imbens-Manski intervals and half-median-unbiased sup estimates.

Interval-valued quantities whose endpoints are smooth functionals (STE and
welfare bounds) get Imbens-Manski confidence intervals from bootstrap
standard errors. Winner and loser bounds are suprema (or infima) over x of
noisy pieces, i.e. intersection bounds; they get a simplified
Chernozhukov-Lee-Rosen correction that shifts every piece by a bootstrap
critical value times its standard error before taking the sup.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize, stats

from .bounds import BoundCurve, IntervalBound, check_grid, subgroup
from .distribution import EmpiricalDist, WeightedSample, build_dist
from .resample import ArmResampler, replicate_rng, resolve_seed
from .winners import PieceTable, piece_points, piece_table, piece_values, winner_curve

logger = logging.getLogger(__name__)

SE_FLOOR = 1e-10
MAX_REDRAW_SHARE = 0.10

Statistic = Callable[[EmpiricalDist, EmpiricalDist], np.ndarray]


@dataclass(frozen=True)
class BootstrapPlan:
    """Resampling design.

    ``cluster=True`` resamples whole clusters with replacement within each
    arm; otherwise units are resampled within arm. ``threads`` only changes
    scheduling, never the result.
    """

    replications: int = 499
    seed: Optional[int] = None
    cluster: bool = False
    threads: int = 1

    def __post_init__(self):
        if int(self.replications) < 1:
            raise ValueError("replications must be at least 1")
        if int(self.threads) < 1:
            raise ValueError("threads must be at least 1")


@dataclass
class BootstrapResult:
    replicates: np.ndarray
    se: np.ndarray
    seed: int
    redraws: int = 0
    degenerate: bool = False

    @property
    def se_lower(self) -> float:
        return float(self.se[0])

    @property
    def se_upper(self) -> float:
        return float(self.se[1])

    def to_csv(self, path, columns=None):
        """Write the replicate matrix, one row per replicate."""
        k = self.replicates.shape[1]
        columns = list(columns) if columns is not None else [f"v{j}" for j in range(k)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["replicate"] + columns)
            for b, row in enumerate(self.replicates):
                writer.writerow([b] + [repr(float(v)) for v in row])


def bootstrap_ses(
    statistic: Statistic,
    arm0: WeightedSample,
    arm1: WeightedSample,
    plan: BootstrapPlan,
) -> BootstrapResult:
    """Bootstrap replicates and standard errors of a vector statistic.

    ``statistic(d0, d1)`` must be deterministic. A replicate whose statistic
    raises ``ValueError`` is redrawn from the next sub-stream of the same
    index; more than 10% redraws aborts. With a single replicate the
    standard errors are 0 and the result is flagged degenerate.
    """
    seed = resolve_seed(plan.seed)
    r0 = ArmResampler(arm0, plan.cluster)
    r1 = ArmResampler(arm1, plan.cluster)
    B = int(plan.replications)
    budget = int(np.floor(MAX_REDRAW_SHARE * B))

    def one(b):
        attempt = 0
        while True:
            rng = replicate_rng(seed, b, attempt)
            s0, s1 = r0.draw(rng), r1.draw(rng)
            try:
                return np.atleast_1d(np.asarray(statistic(build_dist(s0), build_dist(s1)), float)), attempt
            except ValueError as exc:
                attempt += 1
                logger.debug("replicate %d redrawn: %s", b, exc)
                if attempt > budget:
                    raise RuntimeError(f"replicate {b} failed {attempt} times") from exc

    if plan.threads > 1:
        with ThreadPoolExecutor(max_workers=int(plan.threads)) as pool:
            results = list(pool.map(one, range(B)))
    else:
        results = [one(b) for b in range(B)]
    redraws = sum(r[1] for r in results)
    if redraws > budget:
        raise RuntimeError(f"{redraws} of {B} replicates needed redraws (limit {budget})")
    reps = np.vstack([r[0] for r in results])
    if B < 2:
        se = np.zeros(reps.shape[1])
    else:
        se = reps.std(axis=0, ddof=1)
    return BootstrapResult(reps, se, seed, redraws, degenerate=B < 2)


def im_critical_value(delta_over_sigma: float, alpha: float = 0.05) -> float:
    """Imbens-Manski critical value c solving Phi(c + r) - Phi(-c) = 1 - alpha.

    r = 0 gives the two-sided normal quantile; r -> inf the one-sided one.

    >>> round(im_critical_value(0.0, 0.05), 6)
    1.959964
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    r = float(delta_over_sigma)
    if not r >= 0:
        raise ValueError("delta_over_sigma must be nonnegative")
    lo = stats.norm.ppf(1 - alpha)
    hi = stats.norm.ppf(1 - alpha / 2)

    def gap(c):
        return stats.norm.cdf(c + r) - stats.norm.cdf(-c) - (1 - alpha)

    if gap(lo) >= 0:
        return float(lo)
    if gap(hi) <= 0:
        return float(hi)
    return float(optimize.bisect(gap, lo, hi, xtol=1e-12))


@dataclass(frozen=True)
class InferenceResult:
    estimate: IntervalBound
    se_lower: float
    se_upper: float
    ci: tuple
    alpha: float
    method: str
    critical_value: Optional[float] = None
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate.to_dict(),
            "se_lower": float(self.se_lower),
            "se_upper": float(self.se_upper),
            "ci": [float(self.ci[0]), float(self.ci[1])],
            "alpha": float(self.alpha),
            "method": self.method,
            "critical_value": None if self.critical_value is None else float(self.critical_value),
            "flags": list(self.flags),
        }


def im_interval(estimate: IntervalBound, se_lower: float, se_upper: float, alpha: float = 0.05) -> InferenceResult:
    """Imbens-Manski confidence interval for a parameter in [lower, upper]."""
    if se_lower < 0 or se_upper < 0:
        raise ValueError("standard errors must be nonnegative")
    sigma = max(se_lower, se_upper)
    if sigma == 0:
        return InferenceResult(
            estimate, 0.0, 0.0, (estimate.lower, estimate.upper), alpha, "imbens-manski", None, ("zero-se",)
        )
    c = im_critical_value(max(estimate.upper - estimate.lower, 0.0) / sigma, alpha)
    ci = (estimate.lower - c * se_lower, estimate.upper + c * se_upper)
    return InferenceResult(estimate, float(se_lower), float(se_upper), ci, alpha, "imbens-manski", c)


@dataclass(frozen=True)
class HmuResult:
    value: float
    critical_value: float
    selected: int
    se_at_argmax: float
    flagged: bool = False


def hmu_sup_bound(
    estimates,
    replicates,
    p: float = 0.5,
    direction: str = "lower",
    n: Optional[int] = None,
    natural_range=(-np.inf, np.inf),
) -> HmuResult:
    """Bias-corrected estimate of sup_x theta(x) (``direction="lower"``) or inf_x theta(x).

    ``estimates`` holds theta_hat(x) per piece and ``replicates`` the (B, m)
    bootstrap draws. Pieces are studentized by their bootstrap SE (floored at
    1e-10). A preliminary critical value at level 1 - 0.1/log(n) selects the
    pieces that can be near the sup; the p-quantile of the max studentized
    deviation over those pieces is the final k, and the result is
    sup_x [theta_hat(x) - k * se(x)] clipped to ``natural_range``. p = 0.5
    gives the half-median-unbiased estimate, p = 1 - alpha the one-sided
    confidence limit. The upper direction mirrors all signs.
    """
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    est = np.asarray(estimates, dtype=float).ravel()
    if est.size == 0:
        raise ValueError("need at least one piece")
    reps = np.asarray(replicates, dtype=float).reshape(-1, est.size)
    lo_clip, hi_clip = natural_range
    if direction == "upper":
        est, reps, lo_clip, hi_clip = -est, -reps, -hi_clip, -lo_clip

    raw_se = reps.std(axis=0, ddof=1) if reps.shape[0] > 1 else np.zeros(est.size)
    if not np.any(raw_se > SE_FLOOR):
        k0 = int(np.argmax(est))
        value = float(np.clip(est[k0], lo_clip, hi_clip))
        return HmuResult(-value if direction == "upper" else value, 0.0, est.size, 0.0, True)

    se = np.maximum(raw_se, SE_FLOOR)
    dev = (reps - est) / se
    level = 1.0 - 0.1 / np.log(max(n if n is not None else reps.shape[0], 3))
    k_pre = np.quantile(dev.max(axis=1), level)
    keep = est >= est.max() - 2.0 * max(k_pre, 0.0) * se
    k = float(np.quantile(dev[:, keep].max(axis=1), p))
    shifted = est - k * se
    j = int(np.argmax(shifted))
    value = float(np.clip(shifted[j], lo_clip, hi_clip))
    if direction == "upper":
        value = -value
    return HmuResult(value, k, int(keep.sum()), float(raw_se[j]), False)


# --- curves with bands -----------------------------------------------------


def interval_curve_inference(
    arm0: WeightedSample,
    arm1: WeightedSample,
    curve_fn: Callable[[EmpiricalDist, EmpiricalDist], BoundCurve],
    plan: BootstrapPlan,
    alpha: float = 0.05,
) -> tuple[BoundCurve, BootstrapResult]:
    """Attach pointwise Imbens-Manski intervals to an STE or welfare curve.

    ``curve_fn`` must evaluate on a fixed grid. All points share one set of
    bootstrap resamples.
    """
    curve = curve_fn(build_dist(arm0), build_dist(arm1))

    def stat(d0, d1):
        c = curve_fn(d0, d1)
        return np.concatenate((c.lower, c.upper))

    boot = bootstrap_ses(stat, arm0, arm1, plan)
    m = len(curve)
    flags = ("degenerate-bootstrap",) if boot.degenerate else ()
    inference = []
    for i, bd in enumerate(curve.bounds):
        res = im_interval(bd, float(boot.se[i]), float(boot.se[m + i]), alpha)
        inference.append(_with_flags(res, flags))
    curve.inference = inference
    return curve, boot


def _with_flags(res: InferenceResult, flags: tuple) -> InferenceResult:
    if not flags:
        return res
    return InferenceResult(
        res.estimate, res.se_lower, res.se_upper, res.ci, res.alpha, res.method, res.critical_value,
        tuple(res.flags) + tuple(flags),
    )


def _winner_point(
    base: PieceTable,
    reps: PieceTable,
    a: float,
    b: float,
    kind: str,
    alpha: float,
    n: int,
    degenerate: bool,
) -> InferenceResult:
    m = b - a
    out = {}
    for side in ("lower", "upper"):
        which = f"{kind}_{side}"
        mask, est, direction = piece_values(base, a, b, which)
        _, rep_vals, _ = piece_values(reps, a, b, which)
        est, rep_vals = est[mask], rep_vals[:, mask]
        point = hmu_sup_bound(est, rep_vals, 0.5, direction, n, (0.0, m))
        band = hmu_sup_bound(est, rep_vals, 1.0 - alpha, direction, n, (0.0, m))
        out[side] = (point, band)
    flags = []
    lo, hi = out["lower"][0].value, out["upper"][0].value
    if lo > hi:
        lo = hi = 0.5 * (lo + hi)
        flags.append("crossed")
    if out["lower"][0].flagged or out["upper"][0].flagged:
        flags.append("zero-se")
    if degenerate:
        flags.append("degenerate-bootstrap")
    estimate = IntervalBound(lo / m, hi / m, a, b, "conditional")
    ci = (out["lower"][1].value / m, out["upper"][1].value / m)
    return InferenceResult(
        estimate,
        out["lower"][0].se_at_argmax / m,
        out["upper"][0].se_at_argmax / m,
        ci,
        alpha,
        "clr-hmu",
        None,
        tuple(flags),
    )


def winner_curve_inference(
    arm0: WeightedSample,
    arm1: WeightedSample,
    grid,
    tail: str = "left",
    kind: str = "winners",
    plan: BootstrapPlan = BootstrapPlan(),
    alpha: float = 0.05,
) -> tuple[BoundCurve, BootstrapResult]:
    """Winner/loser curve with half-median-unbiased estimates and one-sided bands.

    Each point's ``inference`` holds the corrected conditional bounds as
    ``estimate`` and, as ``ci``, the (1 - alpha) lower confidence limit of the
    lower bound and upper confidence limit of the upper bound.
    """
    grid = check_grid(grid, tail)
    d0, d1 = build_dist(arm0), build_dist(arm1)
    curve = winner_curve(d0, d1, grid, tail, kind)
    xs = piece_points(d0, grid)
    base = piece_table(d0, d1, xs)
    boot = bootstrap_ses(lambda e0, e1: piece_table(e0, e1, xs).stacked(), arm0, arm1, plan)
    reps = PieceTable.from_stacked(xs, boot.replicates)
    n = len(arm0) + len(arm1)
    curve.inference = [
        _winner_point(base, reps, *subgroup(t, tail), kind, alpha, n, boot.degenerate) for t in grid
    ]
    return curve, boot


def winner_point_inference(
    arm0: WeightedSample,
    arm1: WeightedSample,
    a: float,
    b: float,
    kind: str = "winners",
    plan: BootstrapPlan = BootstrapPlan(),
    alpha: float = 0.05,
) -> tuple[InferenceResult, BootstrapResult]:
    d0, d1 = build_dist(arm0), build_dist(arm1)
    xs = piece_points(d0, [a, b])
    base = piece_table(d0, d1, xs)
    boot = bootstrap_ses(lambda e0, e1: piece_table(e0, e1, xs).stacked(), arm0, arm1, plan)
    reps = PieceTable.from_stacked(xs, boot.replicates)
    n = len(arm0) + len(arm1)
    return _winner_point(base, reps, a, b, kind, alpha, n, boot.degenerate), boot
