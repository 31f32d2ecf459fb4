"""Undirected simple graphs, edge-list I/O and exact-distance neighbourhoods."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp

from . import kernels


class GraphFormatError(ValueError):
    """Malformed edge-list input.  ``lineno`` is 1-based, or None."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class SelfLoopError(GraphFormatError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices ``0..n_vertices-1``.

    ``edges`` is an ``(m, 2)`` int64 array of unique pairs with ``u < v``,
    sorted lexicographically.  Use :meth:`from_edges` to build one from
    arbitrary input; the constructor trusts its arguments.
    """

    n_vertices: int
    edges: np.ndarray
    _csr: sp.csr_matrix = field(repr=False)

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable) -> "Graph":
        n = int(n_vertices)
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise SelfLoopError("self-loop in edge set")
            e = np.sort(e, axis=1)
            e = np.unique(e, axis=0)
        csr = _symmetric_csr(n, e)
        return cls(n, e, csr)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency in CSR form (int8 data, sorted indices)."""
        return self._csr

    def dense_adjacency(self, dtype=np.float64) -> np.ndarray:
        return self._csr.toarray().astype(dtype, copy=False)

    def adj(self, u: int, v: int) -> int:
        if u == v:
            return 0
        row = self._csr.indices[self._csr.indptr[u]:self._csr.indptr[u + 1]]
        k = np.searchsorted(row, v)
        return int(k < row.size and row[k] == v)

    def neighbors(self, u: int) -> np.ndarray:
        return self._csr.indices[self._csr.indptr[u]:self._csr.indptr[u + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self._csr.indptr).astype(np.int64)

    def relabel(self, perm) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph.from_edges(self.n_vertices, perm[self.edges])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_vertices == other.n_vertices and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n_vertices, self.edges.tobytes()))


def _symmetric_csr(n, edges):
    if edges.size == 0:
        return sp.csr_matrix((n, n), dtype=np.int8)
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    data = np.ones(rows.size, dtype=np.int8)
    m = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    m.sort_indices()
    return m


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_int(token, lineno):
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"expected an integer, got {token!r}", lineno) from None


def load_edge_list(text: str | TextIO) -> Graph:
    """Parse the edge-list format.

    The first data line is the vertex count, every further data line holds
    ``u v``.  ``#`` starts a comment; blank lines are skipped.  Duplicate
    lines and reversed pairs collapse into one edge.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = _data_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise GraphFormatError("missing vertex count") from None
    tokens = header.split()
    if len(tokens) != 1:
        raise GraphFormatError("first data line must hold only the vertex count", lineno)
    n = _parse_int(tokens[0], lineno)
    if n < 0:
        raise GraphFormatError("vertex count must be nonnegative", lineno)

    pairs = []
    for lineno, line in lines:
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", lineno)
        u, v = (_parse_int(t, lineno) for t in tokens)
        for x in (u, v):
            if x < 0 or x >= n:
                raise GraphFormatError(f"vertex index {x} out of range 0..{n - 1}", lineno)
        if u == v:
            raise SelfLoopError(f"self-loop on vertex {u}", lineno)
        pairs.append((u, v))
    return Graph.from_edges(n, np.array(pairs, dtype=np.int64).reshape(-1, 2))


def format_edge_list(g: Graph) -> str:
    out = [f"{g.n_vertices}\n"]
    out.extend(f"{u} {v}\n" for u, v in g.edges.tolist())
    return "".join(out)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(g))


def bounded_distances(g: Graph, k: int) -> np.ndarray:
    """Dense ``(n, n)`` int16 matrix of BFS distances truncated at ``k``.

    Entry ``[i, v]`` is the shortest-path distance when it is at most ``k``
    and ``-1`` otherwise.  The diagonal is 0.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    return kernels.bounded_distances(g.adjacency, k)


def k_ring(g: Graph, i: int, k: int) -> np.ndarray:
    """Vertices at shortest-path distance exactly ``k`` from ``i``."""
    if not 0 <= i < g.n_vertices:
        raise IndexError(f"vertex {i} out of range")
    if k < 1:
        raise ValueError("k must be >= 1")
    indptr, indices = g.adjacency.indptr, g.adjacency.indices
    dist = {i: 0}
    frontier = [i]
    for d in range(1, k + 1):
        nxt = []
        for u in frontier:
            for v in indices[indptr[u]:indptr[u + 1]].tolist():
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
        if not frontier:
            break
    return np.array(sorted(frontier), dtype=np.int64)


def ring_matrix(g: Graph, k: int) -> np.ndarray:
    """Boolean ``(n, n)`` matrix whose row ``i`` marks the exact-``k`` ring of ``i``.

    ``k = 0`` gives the identity (the ring of radius zero is ``{i}``).
    """
    return bounded_distances(g, k) == k


def k_rings_all(g: Graph, k: int) -> list[np.ndarray]:
    """``k_ring(g, i, k)`` for every vertex, from one bounded BFS per vertex."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rings = ring_matrix(g, k)
    return [np.flatnonzero(row) for row in rings]
