"""Graph construction, matrices, connectivity, and schedule aggregation."""

import itertools

import numpy as np
import pytest

from swarmsync.graphs import (
    Connectivity,
    ConnectivityKind,
    GraphSequence,
    WeightedDigraph,
    classify_connectivity,
    complete_graph,
    directed_tree,
    graph_from_json,
    graph_to_json,
    is_uniformly_connected,
    make_standard,
    path_graph,
    ring_directed,
    ring_undirected,
    undirected_components,
    vertex_interconnection,
)


def single_edge(n, j, k, w=1.0):
    a = np.zeros((n, n))
    a[j, k] = w
    return WeightedDigraph(a)


def random_digraph(rng, n, p=0.5, weighted=True):
    a = (rng.random((n, n)) < p).astype(float)
    if weighted:
        a *= rng.uniform(0.5, 2.0, size=(n, n))
    np.fill_diagonal(a, 0.0)
    return WeightedDigraph(a)


class TestConstruction:
    def test_rejects_self_loops(self):
        with pytest.raises(ValueError, match="self-loop"):
            WeightedDigraph([[1.0, 0.0], [0.0, 0.0]])

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError):
            WeightedDigraph([[0.0, -1.0], [0.0, 0.0]])

    def test_immutable(self):
        g = complete_graph(3)
        with pytest.raises(ValueError):
            g.weights[0, 1] = 5.0


class TestDegrees:
    def test_complete_in_degree(self):
        g = complete_graph(4)
        for k in range(4):
            assert g.in_degree(k) == 3.0

    def test_directed_ring_in_degree(self):
        g = ring_directed(5)
        for k in range(5):
            assert g.in_degree(k) == 1.0

    def test_empty_graph_in_degree(self):
        g = WeightedDigraph(np.zeros((3, 3)))
        assert g.in_degree(1) == 0.0

    def test_out_of_range_vertex(self):
        with pytest.raises(ValueError, match="out of range"):
            complete_graph(3).in_degree(3)


class TestBalance:
    def test_undirected_graphs_are_balanced(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = rng.uniform(0, 1, size=(5, 5))
            a = a + a.T
            np.fill_diagonal(a, 0.0)
            assert WeightedDigraph(a).is_balanced()

    def test_directed_ring_balanced(self):
        assert ring_directed(5).is_balanced()

    def test_single_edge_not_balanced(self):
        assert not single_edge(2, 0, 1).is_balanced()


class TestLaplacian:
    def test_complete_three(self):
        expected = np.array([[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]])
        np.testing.assert_array_equal(complete_graph(3).laplacian("in"), expected)

    def test_complete_three_eigenvalues(self):
        # brute-force eigensolve of the 3x3 matrix
        eigs = np.sort(np.linalg.eigvalsh(complete_graph(3).laplacian("in")))
        np.testing.assert_allclose(eigs, [0.0, 3.0, 3.0], atol=1e-12)

    def test_path_two(self):
        np.testing.assert_array_equal(path_graph(2).laplacian("in"),
                                      [[1.0, -1.0], [-1.0, 1.0]])

    def test_annihilation_directions(self):
        rng = np.random.default_rng(7)
        ones = np.ones(6)
        for _ in range(25):
            g = random_digraph(rng, 6)
            assert np.allclose(ones @ g.laplacian("in"), 0.0, atol=1e-12)
            assert np.allclose(g.laplacian("out") @ ones, 0.0, atol=1e-12)

    def test_eigenvalues_nonnegative_real_part(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            g = random_digraph(rng, 6, p=rng.uniform(0.2, 0.9))
            eigs = np.linalg.eigvals(g.laplacian("out"))
            assert eigs.real.min() >= -1e-9

    def test_strongly_connected_simple_zero(self):
        rng = np.random.default_rng(17)
        found = 0
        while found < 25:
            g = random_digraph(rng, 5, p=0.6)
            if classify_connectivity(g).kind is not ConnectivityKind.STRONGLY_CONNECTED:
                continue
            found += 1
            eigs = np.linalg.eigvals(g.laplacian("out"))
            assert np.sum(np.abs(eigs) < 1e-9) == 1

    def test_balanced_quadratic_form_psd(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            a = rng.uniform(0, 1, size=(5, 5)) * (rng.random((5, 5)) < 0.6)
            a = a + a.T  # undirected, hence balanced
            np.fill_diagonal(a, 0.0)
            g = WeightedDigraph(a)
            lap = g.laplacian("out")
            for _ in range(50):
                x = rng.normal(size=5)
                assert x @ lap @ x >= -1e-9 * (x @ x)

    def test_undirected_psd_and_zero_multiplicity(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            a = (rng.random((6, 6)) < 0.3).astype(float)
            a = np.maximum(a, a.T)
            np.fill_diagonal(a, 0.0)
            g = WeightedDigraph(a)
            lap = g.laplacian("in")
            np.testing.assert_allclose(lap, lap.T, atol=1e-12)
            eigs = np.sort(np.linalg.eigvalsh(lap))
            assert eigs[0] >= -1e-9
            n_zero = int(np.sum(np.abs(eigs) < 1e-9))
            assert n_zero == len(undirected_components(g))


class TestIncidence:
    def test_single_directed_edge(self):
        b = single_edge(2, 0, 1).incidence()
        np.testing.assert_array_equal(b, [[-1.0], [1.0]])

    def test_undirected_triangle_factorization(self):
        g = ring_undirected(3)
        b = g.incidence()
        np.testing.assert_allclose(b @ b.T, g.laplacian("in"), atol=1e-12)

    def test_edgeless_graph(self):
        b = WeightedDigraph(np.zeros((4, 4))).incidence()
        assert b.shape == (4, 0)

    def test_random_undirected_factorization(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            a = (rng.random((6, 6)) < 0.5).astype(float)
            a = np.maximum(a, a.T)
            np.fill_diagonal(a, 0.0)
            g = WeightedDigraph(a)
            np.testing.assert_allclose(g.incidence() @ g.incidence().T,
                                       g.laplacian("in"), atol=1e-12)


def closure_classify(adj):
    """Transitive-closure oracle for the connectivity class."""
    n = adj.shape[0]
    reach = adj | np.eye(n, dtype=bool)
    for _ in range(n):
        reach = reach | (reach @ reach)
    if reach.all():
        return ConnectivityKind.STRONGLY_CONNECTED
    if reach.all(axis=1).any():
        return ConnectivityKind.ROOT_CONNECTED
    sym = adj | adj.T
    reach = sym | np.eye(n, dtype=bool)
    for _ in range(n):
        reach = reach | (reach @ reach)
    if reach.all():
        return ConnectivityKind.WEAKLY_CONNECTED
    return ConnectivityKind.DISCONNECTED


class TestConnectivity:
    def test_directed_tree_is_root_connected(self):
        got = classify_connectivity(directed_tree(5, root=0))
        assert got == Connectivity(ConnectivityKind.ROOT_CONNECTED, root=0)

    def test_directed_ring_strongly_connected(self):
        got = classify_connectivity(ring_directed(6))
        assert got.kind is ConnectivityKind.STRONGLY_CONNECTED

    def test_two_disjoint_edges_disconnected(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[2, 3] = 1.0
        assert classify_connectivity(WeightedDigraph(a)).kind is ConnectivityKind.DISCONNECTED

    def test_agrees_with_closure_oracle_exhaustive_small(self):
        for n in (2, 3, 4):
            pairs = [(j, k) for j in range(n) for k in range(n) if j != k]
            for bits in itertools.product([0, 1], repeat=len(pairs)):
                a = np.zeros((n, n))
                for (j, k), b in zip(pairs, bits):
                    a[j, k] = float(b)
                got = classify_connectivity(WeightedDigraph(a)).kind
                assert got is closure_classify(a > 0)

    def test_agrees_with_closure_oracle_sampled_n5(self):
        rng = np.random.default_rng(31)
        for _ in range(2000):
            a = (rng.random((5, 5)) < rng.uniform(0.1, 0.7)).astype(float)
            np.fill_diagonal(a, 0.0)
            got = classify_connectivity(WeightedDigraph(a)).kind
            assert got is closure_classify(a > 0)


class TestStandardGraphs:
    def test_complete_edge_count(self):
        assert len(complete_graph(3).edges()) == 6

    def test_directed_ring_edges(self):
        g = make_standard("ring_directed", n=4)
        assert {(j, k) for j, k, _ in g.edges()} == {(0, 1), (1, 2), (2, 3), (3, 0)}

    def test_ring_needs_two_vertices(self):
        with pytest.raises(ValueError):
            ring_directed(1)

    def test_vertex_interconnection_size(self):
        g = vertex_interconnection(complete_graph(3), path_graph(2), shared=(0, 0))
        assert g.n == 4

    def test_vertex_interconnection_keeps_edges(self):
        g = vertex_interconnection(path_graph(2), path_graph(3), shared=(1, 0))
        # 1 + 2 undirected edges -> 6 directed entries
        assert len(g.edges()) == 6
        assert classify_connectivity(g).kind is ConnectivityKind.STRONGLY_CONNECTED

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown graph kind"):
            make_standard("torus", n=3)


class TestJson:
    def test_round_trip(self):
        rng = np.random.default_rng(37)
        g = random_digraph(rng, 5)
        back = graph_from_json(graph_to_json(g))
        np.testing.assert_allclose(back.weights, g.weights, atol=0)

    def test_kind_dispatch(self):
        g = graph_from_json({"kind": "complete", "params": {"n": 3}})
        assert len(g.edges()) == 6

    def test_one_indexed_vertices(self):
        g = graph_from_json({"n": 2, "edges": [[1, 2, 0.5]]})
        assert g.weights[0, 1] == 0.5

    def test_out_of_range_edge(self):
        with pytest.raises(ValueError, match="1-indexed"):
            graph_from_json({"n": 2, "edges": [[0, 1, 1.0]]})


class TestGraphSequence:
    def test_delta_enforced(self):
        with pytest.raises(ValueError, match="delta"):
            GraphSequence([single_edge(2, 0, 1, w=0.1)], delta=0.5)

    def test_shared_vertex_count(self):
        with pytest.raises(ValueError, match="vertex count"):
            GraphSequence([complete_graph(2), complete_graph(3)], delta=1.0)

    def test_discrete_aggregate_sums_weights(self):
        seq = GraphSequence([single_edge(2, 0, 1), single_edge(2, 1, 0)], delta=1.0)
        agg = seq.aggregate(0, 1)
        np.testing.assert_array_equal(agg.weights, [[0.0, 1.0], [1.0, 0.0]])

    def test_continuous_integration_exact(self):
        seq = GraphSequence([single_edge(2, 0, 1), single_edge(2, 1, 0)],
                            delta=0.25, durations=[1.0, 2.0])
        w = seq.integrated_weights(0.5, 3.0)  # covers 0.5 of g0, 2.0 of g1, 0.5 of g0
        np.testing.assert_allclose(w, [[0.0, 1.0], [2.0, 0.0]], atol=1e-12)

    def test_uniform_connectivity_constant_strong(self):
        seq = GraphSequence.constant(ring_directed(4))
        assert is_uniformly_connected(seq, 1)

    def test_uniform_connectivity_alternating_edges(self):
        # each graph alone is not root-connected; the window union is
        seq = GraphSequence([single_edge(2, 0, 1), single_edge(2, 1, 0)], delta=1.0)
        assert is_uniformly_connected(seq, 2)
        agg = seq.aggregate(0, 2)
        assert classify_connectivity(agg).kind is ConnectivityKind.STRONGLY_CONNECTED

    def test_uniform_connectivity_disconnected_constant(self):
        seq = GraphSequence.constant(WeightedDigraph(np.zeros((3, 3))), delta=1.0)
        assert not is_uniformly_connected(seq, 5)

    def test_uniform_connectivity_continuous_switching(self):
        g1, g2 = single_edge(2, 0, 1), single_edge(2, 1, 0)
        seq = GraphSequence([g1, g2], delta=0.25, durations=[1.0, 1.0])
        assert is_uniformly_connected(seq, 2.0)
        # a window much shorter than a whole switching period fails
        assert not is_uniformly_connected(seq, 0.2)

    def test_rejects_nonpositive_horizon(self):
        seq = GraphSequence.constant(complete_graph(2))
        with pytest.raises(ValueError):
            is_uniformly_connected(seq, 0)
