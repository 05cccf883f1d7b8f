"""Seeding and within-arm resampling shared by the bootstrap and permutation code.

Replicate ``b`` always draws from the stream seeded by ``(seed, b)`` so the
output does not depend on how replicates are scheduled across threads.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .distribution import WeightedSample


def resolve_seed(seed: Optional[int]) -> int:
    """Return ``seed`` or, if ``None``, a fresh 64-bit seed from OS entropy."""
    if seed is None:
        return int(np.random.SeedSequence().entropy % (1 << 64))
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return seed


def replicate_rng(seed: int, index: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, attempt)))


class ArmResampler:
    """Draws bootstrap resamples of one arm, by unit or by whole cluster."""

    def __init__(self, sample: WeightedSample, cluster: bool = False):
        self.sample = sample
        self.cluster = cluster
        if cluster:
            if sample.clusters is None:
                raise ValueError("cluster resampling needs cluster labels")
            _, inverse = np.unique(sample.clusters, return_inverse=True)
            order = np.argsort(inverse, kind="stable")
            sizes = np.bincount(inverse)
            self._groups = np.split(order, np.cumsum(sizes)[:-1])

    def draw(self, rng: np.random.Generator) -> WeightedSample:
        if self.cluster:
            picks = rng.integers(0, len(self._groups), len(self._groups))
            idx = np.concatenate([self._groups[g] for g in picks])
        else:
            n = len(self.sample)
            idx = rng.integers(0, n, n)
        return self.sample.take(idx)
