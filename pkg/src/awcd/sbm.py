"""Seeded stochastic block model graphs.

Randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence``.  Replicate ``r`` of an experiment with base seed ``s``
uses :func:`derive_seed` ``(s, r)``, so replicates are independent streams
and each one can be regenerated on its own.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class SbmSpec:
    """Blocks of sizes ``block_sizes``; within-block probability per block, one
    shared between-block probability."""

    block_sizes: tuple
    theta_within: tuple
    rho_between: float

    def __post_init__(self):
        sizes = tuple(int(x) for x in self.block_sizes)
        thetas = tuple(float(x) for x in self.theta_within)
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "theta_within", thetas)
        object.__setattr__(self, "rho_between", float(self.rho_between))
        if not sizes:
            raise ValueError("need at least one block")
        if any(s <= 0 for s in sizes):
            raise ValueError("block sizes must be positive")
        if len(thetas) != len(sizes):
            raise ValueError("one within-block probability per block")
        for p in thetas + (self.rho_between,):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of [0, 1]: {p}")

    @classmethod
    def symmetric(cls, n: int, K: int, theta: float, rho: float) -> "SbmSpec":
        return cls((n,) * K, (theta,) * K, rho)

    @property
    def K(self) -> int:
        return len(self.block_sizes)

    @property
    def n_vertices(self) -> int:
        return sum(self.block_sizes)

    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(self.K, dtype=np.int64), self.block_sizes)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_seed(base_seed: int, replicate: int) -> int:
    """64-bit seed of replicate ``replicate`` under ``base_seed``."""
    ss = np.random.SeedSequence([int(base_seed), int(replicate)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _upper_pairs(idx, n):
    """Decode row-major linear indices of the strict upper triangle of an n x n matrix."""
    idx = idx.astype(np.int64)
    # row r starts at r*n - r*(r+1)/2
    b = 2 * n - 1
    r = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    start = r * n - r * (r + 1) // 2
    # guard against floating rounding at row boundaries
    low = idx < start
    r[low] -= 1
    start = r * n - r * (r + 1) // 2
    nxt = (r + 1) * n - (r + 1) * (r + 2) // 2
    high = idx >= nxt
    r[high] += 1
    start = r * n - r * (r + 1) // 2
    c = idx - start + r + 1
    return r, c


def _sample_pairs(rng, m, p):
    if p <= 0.0 or m == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(m, dtype=np.int64)
    count = int(rng.binomial(m, p))
    picked = rng.choice(m, size=count, replace=False, shuffle=False)
    return np.sort(picked.astype(np.int64))


def sample(spec: SbmSpec, seed: int):
    """Draw ``(graph, labels)``.  Vertices of block 0 come first, then block 1, ...

    Each block pair's edge count is drawn as a binomial, then that many
    distinct vertex pairs are chosen uniformly; this is equivalent to one
    independent Bernoulli draw per pair.
    """
    rng = make_rng(seed)
    offsets = np.concatenate([[0], np.cumsum(spec.block_sizes)])
    chunks = []
    for a in range(spec.K):
        na = spec.block_sizes[a]
        picked = _sample_pairs(rng, na * (na - 1) // 2, spec.theta_within[a])
        if picked.size:
            r, c = _upper_pairs(picked, na)
            chunks.append(np.column_stack([r + offsets[a], c + offsets[a]]))
        for b in range(a + 1, spec.K):
            nb = spec.block_sizes[b]
            picked = _sample_pairs(rng, na * nb, spec.rho_between)
            if picked.size:
                r, c = np.divmod(picked, nb)
                chunks.append(np.column_stack([r + offsets[a], c + offsets[b]]))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(spec.n_vertices, edges), spec.labels()


def true_weights(labels: Sequence[int]) -> np.ndarray:
    labels = np.asarray(labels)
    return (labels[:, None] == labels[None, :]).astype(np.int8)


def oracle_start(labels: Sequence[int], i: int, size: int, seed: int) -> np.ndarray:
    """Uniform random subset of ``i``'s true community (without ``i``)."""
    labels = np.asarray(labels)
    pool = np.flatnonzero(labels == labels[i])
    pool = pool[pool != i]
    if size < 0 or size > pool.size:
        raise ValueError(f"size {size} not in 0..{pool.size}")
    rng = make_rng(seed)
    return np.sort(rng.choice(pool, size=size, replace=False))


def oracle_starts(labels: Sequence[int], size: int, seed: int) -> list:
    """:func:`oracle_start` for every vertex, vertex ``i`` using replicate ``i`` of ``seed``."""
    return [oracle_start(labels, i, size, derive_seed(seed, i)) for i in range(len(labels))]
