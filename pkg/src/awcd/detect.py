"""Adaptive weights community detection.

For every vertex pair the procedure compares the edge density between the
two current local communities with the densities inside each of them,
using the Bernoulli likelihood-ratio statistic, and keeps the pair in a
common community when the statistic is at most ``lambda``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .graph import Graph, bounded_distances


class VariantTag(str, enum.Enum):
    CIRCLE = "circle"
    DEBIASED = "debiased"
    PLUS = "plus"


class BiasIndicator(str, enum.Enum):
    EDGE = "edge"
    DIAG = "diag"


@dataclass(frozen=True)
class Variant:
    """Count rule.  ``bias_indicator`` only matters for ``debiased`` with k >= 2.

    ``edge`` subtracts the walk correction when ``i`` and ``j`` are adjacent,
    ``diag`` only on the diagonal ``i == j``.
    """

    tag: VariantTag = VariantTag.DEBIASED
    bias_indicator: BiasIndicator = BiasIndicator.EDGE

    def __post_init__(self):
        object.__setattr__(self, "tag", VariantTag(self.tag))
        object.__setattr__(self, "bias_indicator", BiasIndicator(self.bias_indicator))

    @classmethod
    def parse(cls, text: str) -> "Variant":
        """``circle``, ``debiased``, ``debiased:diag``, ``plus``."""
        tag, _, ind = text.partition(":")
        return cls(VariantTag(tag), BiasIndicator(ind or "edge"))

    def __str__(self):
        if self.tag is VariantTag.DEBIASED and self.bias_indicator is BiasIndicator.DIAG:
            return "debiased:diag"
        return self.tag.value


CIRCLE = Variant(VariantTag.CIRCLE)
DEBIASED = Variant(VariantTag.DEBIASED)
PLUS = Variant(VariantTag.PLUS)


@dataclass(frozen=True)
class AwcdConfig:
    k: int = 1
    lam: float = 0.0
    l_max: int = 1
    variant: Variant = DEBIASED
    neighborhood: str = "ring"

    def __post_init__(self):
        _check_neighborhood(self.neighborhood, self.variant)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")


NEIGHBORHOODS = ("ring", "ball")


def _check_neighborhood(neighborhood, variant):
    if neighborhood not in NEIGHBORHOODS:
        raise ValueError(f"neighborhood must be one of {NEIGHBORHOODS}")
    if neighborhood == "ball" and variant.tag is VariantTag.PLUS:
        raise ValueError("the plus variant is defined for exact rings only")


class CountPair(NamedTuple):
    S: float
    N: int


# --------------------------------------------------------------------------
# scalar pieces

def bernoulli_kl(p: float, q: float) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q), possibly ``inf``."""
    for x in (p, q):
        if not 0.0 <= x <= 1.0 or math.isnan(x):
            raise ValueError(f"probability out of [0, 1]: {x!r}")
    out = 0.0
    if p > 0:
        if q == 0:
            return math.inf
        out += p * math.log(p / q)
    if p < 1:
        if q == 1:
            return math.inf
        out += (1 - p) * math.log((1 - p) / (1 - q))
    return max(out, 0.0)


def _ratio(s, n):
    return s / n if n > 0 else 0.0


def estimate_thetas(c_ii: CountPair, c_jj: CountPair, c_ij: CountPair):
    """Unpooled estimates ``(theta_ii, theta_jj, theta_ij)`` and the pooled one."""
    pooled_n = c_ii.N + 2 * c_ij.N + c_jj.N
    pooled = (c_ii.S + 2 * c_ij.S + c_jj.S) / pooled_n if pooled_n > 0 else 0.0
    return _ratio(c_ii.S, c_ii.N), _ratio(c_jj.S, c_jj.N), _ratio(c_ij.S, c_ij.N), pooled


def test_statistic(c_ii: CountPair, c_jj: CountPair, c_ij: CountPair) -> float:
    t_ii, t_jj, t_ij, pooled = estimate_thetas(c_ii, c_jj, c_ij)
    total = 0.0
    for c, theta in ((c_ii, t_ii), (c_jj, t_jj), (c_ij, t_ij)):
        if c.N > 0:
            kl = bernoulli_kl(theta, pooled)
            if kl > 0:
                total += c.N * kl
    return total


# --------------------------------------------------------------------------
# per-pair counts (reference path, set enumeration)

def pair_counts(g: Graph, rings: Sequence, i: int, j: int, variant: Variant, k: int,
                inner_rings: Sequence | None = None) -> CountPair:
    """``(S_ij, N_ij)`` for one pair, by direct enumeration of the ring sets.

    ``rings`` are the starting communities (the exact-``k`` rings).  The plus
    variant also needs the ``k-1`` rings; they are computed from ``g`` unless
    passed as ``inner_rings``.
    """
    if i > j:
        i, j = j, i
    ci = set(np.asarray(rings[i]).tolist())
    cj = set(np.asarray(rings[j]).tolist())
    if variant.tag is VariantTag.PLUS:
        if inner_rings is None:
            inner_rings = _inner_rings(g, k)
        pi = set(np.asarray(inner_rings[i]).tolist())
        pj = set(np.asarray(inner_rings[j]).tolist())
        a = sorted(ci - pj)
        b = sorted(cj - pi)
        s = sum(g.adj(v1, v2) for v1 in a for v2 in b)
        n = sum(1 for v1 in a for v2 in b if v1 != v2)
        return CountPair(float(s), n)

    s = sum(g.adj(v1, v2) for v1 in ci for v2 in cj)
    n = len(ci) * (len(cj) - (1 if i == j else 0))
    if variant.tag is VariantTag.DEBIASED:
        s = max(s - _correction(g, i, j, len(ci), len(cj), variant, k), 0)
    return CountPair(float(s), n)


def _inner_rings(g, k):
    if k == 1:
        return [np.array([x]) for x in range(g.n_vertices)]
    dist = bounded_distances(g, k - 1)
    return [np.flatnonzero(row == k - 1) for row in dist]


def _correction(g, i, j, size_i, size_j, variant, k):
    if k == 1:
        return (size_i + size_j - 1) if g.adj(i, j) else 0
    if variant.bias_indicator is BiasIndicator.EDGE:
        hit = g.adj(i, j) == 1
    else:
        hit = i == j
    return (size_i + size_j) if hit else 0


# --------------------------------------------------------------------------
# all-pairs counts (fast path)

def _walk_sums(R: np.ndarray, adj: sp.csr_matrix) -> np.ndarray:
    """``R @ A @ R.T`` with exact integer results.

    Sparse starting sets go through scipy sparse products; dense ones through
    BLAS, in float32 when every partial sum is below 2**24 (exact there).
    """
    n = R.shape[0]
    nnz = int(np.count_nonzero(R))
    a = adj.astype(np.float64)
    if nnz <= 0.05 * n * n:
        r = sp.csr_matrix(R, dtype=np.float64)
        M = np.asarray((a @ r.T).toarray())  # (A R^T)
        return np.asarray(r @ M)
    # every partial sum is bounded by the total degree 2m
    dtype = np.float32 if adj.nnz < 2 ** 24 else np.float64
    Rd = R.astype(dtype)
    M = np.asarray(a.astype(dtype) @ Rd.T, dtype=dtype)
    return (Rd @ M).astype(np.float64)


def count_matrices(g: Graph, R: np.ndarray, variant: Variant, k: int, P: np.ndarray | None = None):
    """Dense ``(S, N)`` over all pairs for starting-set matrix ``R``.

    ``R[i]`` marks the starting community of ``i`` (never containing ``i``).
    ``k`` selects the bias-correction rule; ``P`` is the inner-ring matrix used
    by the plus variant (identity when ``k == 1`` and omitted).
    """
    R = np.asarray(R, dtype=bool)
    n = g.n_vertices
    adj = g.adjacency
    if variant.tag is VariantTag.PLUS:
        if P is None:
            if k != 1:
                raise ValueError("plus variant with k >= 2 needs the inner ring matrix")
            P = np.eye(n, dtype=bool)
        return kernels.plus_counts(R, P, adj)

    sizes = R.sum(axis=1).astype(np.float64)
    S = _walk_sums(R, adj)
    N = np.outer(sizes, sizes)
    N[np.diag_indices(n)] -= sizes
    if variant.tag is VariantTag.DEBIASED:
        corr_sizes = sizes[:, None] + sizes[None, :]
        if k == 1:
            mask = adj.toarray().astype(bool)
            S -= np.where(mask, corr_sizes - 1.0, 0.0)
        elif variant.bias_indicator is BiasIndicator.EDGE:
            mask = adj.toarray().astype(bool)
            S -= np.where(mask, corr_sizes, 0.0)
        else:
            S[np.diag_indices(n)] -= 2.0 * sizes
        np.maximum(S, 0.0, out=S)
    return S, N


def _rings_and_inner(g: Graph, k: int, neighborhood: str = "ring"):
    """Starting-set matrix and the inner ring (``k-1``) used by the plus variant.

    ``ring`` starts from vertices at distance exactly ``k``; ``ball`` from all
    vertices at distance ``1..k``.
    """
    dist = bounded_distances(g, k)
    if neighborhood == "ball":
        return dist >= 1, None
    return dist == k, dist == (k - 1)


def test_matrix_from_rings(g: Graph, R: np.ndarray, variant: Variant, k: int, P=None) -> np.ndarray:
    S, N = count_matrices(g, R, variant, k, P)
    return kernels.test_matrix(S, N)


def threshold(T: np.ndarray, lam: float) -> np.ndarray:
    """Weight matrix ``W_ij = 1(T_ij <= lam)`` with unit diagonal."""
    W = (T <= lam).astype(np.int8)
    np.fill_diagonal(W, 1)
    return W


def initial_test_matrix(g: Graph, k: int, variant: Variant, neighborhood: str = "ring") -> np.ndarray:
    """Test matrix of the first iteration, starting from the ``k``-neighbourhoods."""
    _check_neighborhood(neighborhood, variant)
    R, P = _rings_and_inner(g, k, neighborhood)
    return test_matrix_from_rings(g, R, variant, k, P)


def _rings_to_matrix(rings, n):
    R = np.zeros((n, n), dtype=bool)
    for i, members in enumerate(rings):
        members = np.asarray(members, dtype=np.int64)
        if members.size:
            R[i, members] = True
    return R


def step(g: Graph, rings: Sequence | None, config: AwcdConfig):
    """One thresholding step from the exact-``k`` rings.

    ``rings`` may be None, in which case they are computed from ``g``.
    Returns ``(W, T)``.
    """
    if rings is None:
        R, P = _rings_and_inner(g, config.k, config.neighborhood)
    else:
        R = _rings_to_matrix(rings, g.n_vertices)
        P = None
        if config.variant.tag is VariantTag.PLUS and config.k > 1:
            P = bounded_distances(g, config.k - 1) == (config.k - 1)
    T = test_matrix_from_rings(g, R, config.variant, config.k, P)
    return threshold(T, config.lam), T


def step_with_start(g: Graph, start: Sequence, variant: Variant, lam: float):
    """Single step from caller-supplied starting communities (1-hop count rules)."""
    R = _rings_to_matrix(start, g.n_vertices)
    if np.any(np.diag(R)):
        raise ValueError("starting sets must not contain their own vertex")
    T = test_matrix_from_rings(g, R, variant, 1)
    return threshold(T, lam)


def iterate_from(g: Graph, W: np.ndarray, variant: Variant, lam: float):
    """Follow-up iteration: rows of ``W`` (minus the diagonal) are the new communities."""
    R = np.asarray(W, dtype=bool).copy()
    np.fill_diagonal(R, False)
    T = test_matrix_from_rings(g, R, variant, 1)
    return threshold(T, lam), T


def run(g: Graph, config: AwcdConfig):
    """Full procedure with ``config.l_max`` iterations.

    Returns the final weight matrix and the list of per-iteration test matrices.
    """
    W, T = step(g, None, config)
    tests = [T]
    for _ in range(config.l_max - 1):
        W, T = iterate_from(g, W, config.variant, config.lam)
        tests.append(T)
    return W, tests
