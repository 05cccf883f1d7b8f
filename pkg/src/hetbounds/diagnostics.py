"""Weighted two-sample Kolmogorov-Smirnov permutation test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distribution import WeightedSample
from .resample import replicate_rng, resolve_seed


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    permutations: int
    seed: int
    cluster: bool = False

    def to_dict(self) -> dict:
        return {
            "statistic": float(self.statistic),
            "p_value": float(self.p_value),
            "permutations": int(self.permutations),
            "seed": int(self.seed),
            "cluster": bool(self.cluster),
        }


def _ks_stats(weights: np.ndarray, last_of_tie: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """KS distances for each row of a (k, N) boolean treated-label matrix.

    ``weights`` are in pooled sorted order; CDF differences are read at the
    last position of each tie block only.
    """
    w1 = labels * weights
    w0 = (~labels) * weights
    c1 = np.cumsum(w1, axis=-1)
    c0 = np.cumsum(w0, axis=-1)
    f1 = c1[..., last_of_tie] / c1[..., -1:]
    f0 = c0[..., last_of_tie] / c0[..., -1:]
    return np.abs(f1 - f0).max(axis=-1)


def ks_statistic(arm0: WeightedSample, arm1: WeightedSample) -> float:
    """sup_y |F1(y) - F0(y)| for the weighted empirical CDFs."""
    pooled = np.concatenate((arm0.values, arm1.values))
    order = np.argsort(pooled, kind="stable")
    vals = pooled[order]
    last = np.flatnonzero(np.concatenate((vals[1:] != vals[:-1], [True])))
    w = np.concatenate((arm0.weights, arm1.weights))[order]
    labels = np.concatenate((np.zeros(len(arm0), bool), np.ones(len(arm1), bool)))[order]
    return float(_ks_stats(w, last, labels))


def ks_test(
    arm0: WeightedSample,
    arm1: WeightedSample,
    permutations: int = 999,
    seed: Optional[int] = None,
    cluster: bool = False,
) -> KsResult:
    """Permutation test of equal distributions.

    Treatment labels are reassigned at random keeping the arm sizes (or, with
    ``cluster=True``, the number of clusters per arm, moving whole clusters).
    Units keep their weights. The p-value is (1 + #{D* >= D}) / (B + 1).
    Permutation b draws from its own stream derived from (seed, b).
    """
    if permutations < 1:
        raise ValueError("permutations must be at least 1")
    if cluster and (arm0.clusters is None or arm1.clusters is None):
        raise ValueError("cluster permutation needs cluster labels on both arms")
    seed = resolve_seed(seed)

    pooled = np.concatenate((arm0.values, arm1.values))
    order = np.argsort(pooled, kind="stable")
    vals = pooled[order]
    last = np.flatnonzero(np.concatenate((vals[1:] != vals[:-1], [True])))
    w = np.concatenate((arm0.weights, arm1.weights))[order]
    n0, n1 = len(arm0), len(arm1)
    observed = np.concatenate((np.zeros(n0, bool), np.ones(n1, bool)))[order]
    stat = float(_ks_stats(w, last, observed))

    if cluster:
        # clusters are nested in arms; the same label in both arms names two clusters
        keys = [(0, c) for c in arm0.clusters] + [(1, c) for c in arm1.clusters]
        _, unit_cluster = np.unique(np.array([f"{i}\x1f{c}" for i, c in keys]), return_inverse=True)
        unit_cluster = unit_cluster[order]
        n_clusters = unit_cluster.max() + 1
        treated_clusters = np.unique(unit_cluster[observed]).size
    labels = np.empty((permutations, n0 + n1), dtype=bool)
    for b in range(permutations):
        rng = replicate_rng(seed, b)
        if cluster:
            chosen = np.zeros(n_clusters, bool)
            chosen[rng.permutation(n_clusters)[:treated_clusters]] = True
            labels[b] = chosen[unit_cluster]
        else:
            labels[b] = observed[rng.permutation(n0 + n1)]
    perm_stats = _ks_stats(w, last, labels)
    exceed = int(np.sum(perm_stats >= stat - 1e-12))
    p = (1 + exceed) / (permutations + 1)
    return KsResult(stat, p, permutations, seed, cluster)
