import io

import numpy as np
import pytest

import oracles
from awcd.graph import (Graph, GraphFormatError, SelfLoopError, bounded_distances, format_edge_list,
                        k_ring, k_rings_all, load_edge_list, ring_matrix, write_edge_list)


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def as_sets(rings):
    return [set(r.tolist()) for r in rings]


class TestLoad:
    def test_path(self):
        g = load_edge_list("3\n0 1\n1 2")
        assert g.n_vertices == 3
        assert g.n_edges == 2
        assert g.adj(0, 1) == g.adj(1, 2) == 1
        assert g.adj(0, 2) == 0

    def test_symmetric_duplicates_collapse(self):
        g = load_edge_list("2\n0 1\n1 0\n0 1\n")
        assert g.n_edges == 1
        assert g.edges.tolist() == [[0, 1]]

    def test_out_of_range(self):
        with pytest.raises(GraphFormatError) as exc:
            load_edge_list("2\n0 2")
        assert exc.value.lineno == 2

    def test_negative_index(self):
        with pytest.raises(GraphFormatError):
            load_edge_list("2\n-1 0")

    def test_self_loop(self):
        with pytest.raises(SelfLoopError):
            load_edge_list("3\n1 1")

    def test_non_integer(self):
        with pytest.raises(GraphFormatError) as exc:
            load_edge_list("3\n0 x\n")
        assert "line 2" in str(exc.value)

    def test_bad_header(self):
        with pytest.raises(GraphFormatError):
            load_edge_list("3 4\n0 1")
        with pytest.raises(GraphFormatError):
            load_edge_list("# only a comment\n")

    def test_wrong_token_count(self):
        with pytest.raises(GraphFormatError):
            load_edge_list("3\n0 1 2")

    def test_comments_and_blanks(self):
        text = "# header\n\n4  # vertex count\n0 1 # first\n\n  2\t3\n# trailing\n"
        g = load_edge_list(io.StringIO(text))
        assert g.n_vertices == 4
        assert g.edges.tolist() == [[0, 1], [2, 3]]

    def test_zero_vertices(self):
        g = load_edge_list("0\n")
        assert g.n_vertices == 0 and g.n_edges == 0

    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(3)
        g = Graph.from_edges(30, oracles.random_graph(rng, 30, 0.2))
        p = tmp_path / "g.txt"
        write_edge_list(g, p)
        assert load_edge_list(p.read_text()) == g
        assert format_edge_list(g) == p.read_text()


class TestGraph:
    def test_adj_diagonal_zero(self):
        g = complete(3)
        assert all(g.adj(i, i) == 0 for i in range(3))

    def test_from_edges_rejects(self):
        with pytest.raises(SelfLoopError):
            Graph.from_edges(3, [(1, 1)])
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(0, 3)])

    def test_adjacency_symmetric(self):
        rng = np.random.default_rng(0)
        g = Graph.from_edges(25, oracles.random_graph(rng, 25, 0.3))
        A = g.dense_adjacency()
        assert np.array_equal(A, A.T)
        assert A.sum() == 2 * g.n_edges
        assert np.array_equal(g.degrees(), A.sum(axis=1))

    def test_relabel(self):
        g = path(4)
        h = g.relabel([3, 2, 1, 0])
        assert h == g  # a path reversed is the same path
        h = g.relabel([1, 0, 2, 3])
        assert sorted(map(tuple, h.edges.tolist())) == [(0, 1), (0, 2), (2, 3)]


class TestRings:
    def test_path_ring(self):
        assert k_ring(path(4), 0, 2).tolist() == [2]

    def test_triangle_ring2_empty(self):
        assert k_ring(complete(3), 0, 2).tolist() == []

    def test_ring1_is_neighbours(self):
        rng = np.random.default_rng(1)
        g = Graph.from_edges(20, oracles.random_graph(rng, 20, 0.2))
        for i in range(20):
            assert k_ring(g, i, 1).tolist() == sorted(g.neighbors(i).tolist())

    def test_all_path(self):
        assert as_sets(k_rings_all(path(3), 1)) == [{1}, {0, 2}, {1}]

    def test_all_k4(self):
        assert as_sets(k_rings_all(complete(4), 1)) == [{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}]
        assert as_sets(k_rings_all(complete(4), 2)) == [set()] * 4

    def test_isolated_vertex(self):
        g = Graph.from_edges(3, [(0, 1)])
        for k in (1, 2, 3):
            assert k_ring(g, 2, k).tolist() == []

    def test_ring_zero_is_identity(self):
        assert np.array_equal(ring_matrix(path(4), 0), np.eye(4, dtype=bool))

    @pytest.mark.parametrize("seed", range(8))
    def test_against_oracle(self, seed, backend):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 35))
        edges = oracles.random_graph(rng, n, float(rng.uniform(0.03, 0.3)))
        g = Graph.from_edges(n, edges)
        nb = oracles.adjacency_sets(n, edges)
        for k in (1, 2, 3, 4):
            expect = oracles.rings(nb, k)
            assert as_sets(k_rings_all(g, k)) == expect
            assert [set(k_ring(g, i, k).tolist()) for i in range(n)] == expect

    def test_rings_partition_component(self):
        rng = np.random.default_rng(5)
        n = 30
        edges = oracles.random_graph(rng, n, 0.07)
        g = Graph.from_edges(n, edges)
        nb = oracles.adjacency_sets(n, edges)
        for i in range(n):
            seen = {i}
            for k in range(1, n):
                r = set(k_ring(g, i, k).tolist())
                assert not (r & seen)
                seen |= r
            assert seen == set(oracles.bfs_distances(nb, i))

    def test_bounded_distances_cap(self, backend):
        D = bounded_distances(path(6), 2)
        assert D[0].tolist() == [0, 1, 2, -1, -1, -1]
        assert np.array_equal(D, D.T)

    def test_backends_agree(self):
        from awcd import _accel
        rng = np.random.default_rng(9)
        g = Graph.from_edges(60, oracles.random_graph(rng, 60, 0.05))
        prev = _accel.use_numba(True)
        try:
            a = bounded_distances(g, 3)
            _accel.use_numba(False)
            b = bounded_distances(g, 3)
        finally:
            _accel.use_numba(prev)
        assert np.array_equal(a, b)
