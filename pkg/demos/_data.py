"""Synthetic two-arm earnings experiment shared by the demo scripts."""

import numpy as np

from hetbounds import WeightedSample


def earnings_experiment(n=600, seed=0):
    """Control and treated earnings with a mass at zero and uneven gains.

    Low earners gain a lot, high earners lose a little; sampling weights
    are uneven and units come in 40 sites (clusters).
    """
    rng = np.random.default_rng(seed)

    def arm(treated):
        base = rng.lognormal(7.0, 0.9, n) * (rng.uniform(size=n) > 0.3)
        if treated:
            gain = np.where(base < 800, 600.0, -0.05 * base)
            base = np.maximum(base + gain * (rng.uniform(size=n) > 0.2), 0.0)
        weights = rng.uniform(0.5, 2.0, n)
        sites = rng.integers(0, 40, n)
        return WeightedSample(np.round(base, 2), weights, sites)

    return arm(False), arm(True)
