"""Scores for weight matrices and partitions, and modularity-based tuning of lambda."""
from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .detect import AwcdConfig, initial_test_matrix, threshold
from .graph import Graph


def _check_pair(w, w_star):
    w = np.asarray(w)
    w_star = np.asarray(w_star)
    if w.shape != w_star.shape or w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"dimension mismatch: {w.shape} vs {w_star.shape}")
    return w, w_star


def rand_index(w, w_star) -> float:
    """Fraction of unordered pairs ``i < j`` on which the two weight matrices agree."""
    w, w_star = _check_pair(w, w_star)
    n = w.shape[0]
    if n < 2:
        raise ValueError("need at least two vertices")
    iu = np.triu_indices(n, 1)
    agree = np.count_nonzero((w[iu] != 0) == (w_star[iu] != 0))
    return agree / iu[0].size


def exact_recovery(w, w_star) -> bool:
    w, w_star = _check_pair(w, w_star)
    return bool(np.array_equal(w != 0, w_star != 0))


def rand_index_over_grid(T: np.ndarray, w_star, lambdas: Sequence[float]) -> np.ndarray:
    """Rand index of ``threshold(T, lam)`` for each ``lam``, without building each W.

    Sorts the upper-triangle statistics once; equivalent to calling
    :func:`rand_index` on every thresholded matrix.
    """
    n = T.shape[0]
    iu = np.triu_indices(n, 1)
    t = T[iu]
    same = np.asarray(w_star)[iu] != 0
    t_same = np.sort(t[same])
    t_diff = np.sort(t[~same])
    lams = np.asarray(lambdas, dtype=np.float64)
    kept_same = np.searchsorted(t_same, lams, side="right")
    kept_diff = np.searchsorted(t_diff, lams, side="right")
    agree = kept_same + (t_diff.size - kept_diff)
    return agree / t.size


def partition_from_weights(w) -> np.ndarray:
    """Connected components of the off-diagonal ones of ``w``.

    Labels are numbered by first appearance, so the component holding the
    smallest vertex gets 0.
    """
    w = np.asarray(w)
    n = w.shape[0]
    m = sp.csr_matrix(w != 0)
    _, raw = connected_components(m, directed=False)
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(order.size)
    return remap[raw].astype(np.int64) if n else np.empty(0, dtype=np.int64)


def modularity(g: Graph, labels) -> float:
    """Newman-Girvan modularity of ``labels`` on ``g``."""
    m = g.n_edges
    if m == 0:
        raise ValueError("modularity is undefined for a graph without edges")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (g.n_vertices,):
        raise ValueError("one label per vertex required")
    u, v = g.edges[:, 0], g.edges[:, 1]
    n_comm = int(labels.max()) + 1 if labels.size else 0
    inside = np.bincount(labels[u][labels[u] == labels[v]], minlength=n_comm)
    deg_sum = np.bincount(labels, weights=g.degrees(), minlength=n_comm)
    two_m = 2.0 * m
    return float(np.sum(2.0 * inside / two_m - (deg_sum / two_m) ** 2))


TIE_BREAKS = ("smallest", "median")


def tune_lambda(g: Graph, config: AwcdConfig, lambda_grid: Sequence[float], T: np.ndarray | None = None,
                tie_break: str = "smallest"):
    """Pick the lambda whose first-step partition has the highest modularity.

    Ties go to the smaller lambda by default.  Since partitions come from
    connected components, whole plateaus of lambda tie; ``tie_break="median"``
    picks the middle of the tied values instead of the lower edge.
    ``config.lam`` is ignored.  Returns ``(best_lambda, best_modularity)``.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
    grid = sorted(float(x) for x in lambda_grid)
    if not grid:
        raise ValueError("empty lambda grid")
    if T is None:
        T = initial_test_matrix(g, config.k, config.variant, neighborhood=config.neighborhood)
    scores = [modularity(g, partition_from_weights(threshold(T, lam))) for lam in grid]
    best_q = max(scores)
    tied = [lam for lam, q in zip(grid, scores) if q == best_q]
    lam = tied[0] if tie_break == "smallest" else tied[(len(tied) - 1) // 2]
    return lam, best_q


def auto_lambda_grid(T: np.ndarray, count: int, quantile: float = 0.9) -> np.ndarray:
    """Linear grid from 0 to the ``quantile`` of the finite off-diagonal statistics."""
    iu = np.triu_indices(T.shape[0], 1)
    t = T[iu]
    t = t[np.isfinite(t)]
    top = float(np.quantile(t, quantile)) if t.size else 1.0
    if top <= 0:
        top = 1.0
    return np.linspace(0.0, top, count)
