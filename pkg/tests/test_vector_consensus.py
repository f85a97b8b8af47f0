"""Linear consensus: coupling forms, convexity, mean preservation, decay."""

import numpy as np
import pytest

from swarmsync.graphs import (GraphSequence, WeightedDigraph, complete_graph,
                              directed_tree, path_graph)
from swarmsync.metrics import fit_log_linear, pairwise_euclidean_spread
from swarmsync import vector_consensus as vc


def random_undirected(rng, n, p=0.6):
    a = rng.uniform(0.2, 1.5, size=(n, n)) * (rng.random((n, n)) < p)
    a = (a + a.T) / 2
    np.fill_diagonal(a, 0.0)
    return WeightedDigraph(a)


class TestContinuousCoupling:
    def test_coincident_swarm_is_still(self):
        x = np.ones((4, 3)) * 2.5
        np.testing.assert_array_equal(vc.ct_rhs(x, complete_graph(4)), np.zeros((4, 3)))

    def test_two_agents_scalar(self):
        x = np.array([[0.0], [1.0]])
        np.testing.assert_allclose(vc.ct_rhs(x, complete_graph(2), alpha=1.0),
                                   [[1.0], [-1.0]])

    def test_matches_kron_laplacian_product(self):
        rng = np.random.default_rng(101)
        for _ in range(20):
            g = random_undirected(rng, 5)
            x = rng.normal(size=(5, 3))
            # explicit matrix-product oracle
            lap = np.kron(g.laplacian("in"), np.eye(3))
            expected = (-0.7 * lap @ x.reshape(-1)).reshape(5, 3)
            np.testing.assert_allclose(vc.ct_rhs(x, g, alpha=0.7), expected, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="agents"):
            vc.ct_rhs(np.zeros((3, 2)), complete_graph(4))


class TestDiscreteStep:
    def test_two_agents_quarter_gain(self):
        x = np.array([[0.0], [1.0]])
        np.testing.assert_allclose(vc.dt_step(x, complete_graph(2), alpha=0.25),
                                   [[0.25], [0.75]])

    def test_coincident_swarm_unchanged(self):
        x = np.full((5, 2), -1.3)
        np.testing.assert_array_equal(vc.dt_step(x, complete_graph(5), alpha=0.1), x)

    def test_gain_violation_names_vertex(self):
        with pytest.raises(ValueError, match="vertex 0"):
            vc.dt_step(np.zeros((4, 1)), complete_graph(4), alpha=0.5)  # load 1.5

    def test_explicit_bound_enforced(self):
        with pytest.raises(ValueError, match="exceeds the bound"):
            vc.dt_step(np.zeros((3, 1)), complete_graph(3), alpha=0.3, b=0.5)

    def test_convex_hull_per_coordinate(self):
        rng = np.random.default_rng(103)
        for _ in range(30):
            g = random_undirected(rng, 6)
            alpha = 0.9 / max(g.in_degrees().max(), 1.0)
            x = rng.normal(size=(6, 2))
            y = vc.dt_step(x, g, alpha)
            for d in range(2):
                assert y[:, d].min() >= x[:, d].min() - 1e-12
                assert y[:, d].max() <= x[:, d].max() + 1e-12

    def test_complete_graph_weighted_average_oracle(self):
        rng = np.random.default_rng(105)
        n = 6
        g = complete_graph(n)
        b = 0.8
        alpha = b / (n - 1)
        for _ in range(20):
            x = rng.normal(size=(n, 1))
            y = vc.dt_step(x, g, alpha, b=b)
            for k in range(n):
                others = np.delete(x[:, 0], k)
                expected = (1 - b) * x[k, 0] + alpha * others.sum()
                assert abs(y[k, 0] - expected) <= 1e-12


class TestDisagreementCost:
    def test_consensus_state_zero(self):
        x = np.full((4, 2), 0.3)
        assert vc.disagreement_cost(x, complete_graph(4)) == 0.0

    def test_two_agents_single_edge(self):
        a = np.zeros((2, 2))
        a[0, 1] = a[1, 0] = 1.0
        x = np.array([[0.0], [2.0]])
        assert vc.disagreement_cost(x, WeightedDigraph(a)) == pytest.approx(4.0)

    def test_matches_quadratic_form(self):
        rng = np.random.default_rng(107)
        for _ in range(20):
            g = random_undirected(rng, 5)
            x = rng.normal(size=(5, 2))
            lap = np.kron(g.laplacian("in"), np.eye(2))
            expected = x.reshape(-1) @ lap @ x.reshape(-1)
            got = vc.disagreement_cost(x, g)
            assert abs(got - expected) <= 1e-9 * max(1.0, abs(expected))

    def test_warns_on_directed_graph(self):
        a = np.zeros((2, 2))
        a[0, 1] = 1.0
        with pytest.warns(UserWarning, match="undirected"):
            vc.disagreement_cost(np.zeros((2, 1)), WeightedDigraph(a))


class TestSimulate:
    def test_balanced_switching_preserves_mean(self):
        rng = np.random.default_rng(109)
        graphs = []
        for _ in range(3):
            a = rng.uniform(0.5, 1.0, size=(5, 5)) * (rng.random((5, 5)) < 0.6)
            a = a + a.T  # undirected, hence balanced
            np.fill_diagonal(a, 0.0)
            graphs.append(WeightedDigraph(a))
        seq = GraphSequence(graphs, delta=0.1, durations=[1.0, 1.0, 1.0])
        x0 = rng.normal(size=(5, 1))
        traj = vc.simulate(x0, seq, alpha=0.8, t_end=12.0, h=0.01)
        assert traj.mean_drift() < 1e-9

    def test_root_connected_exponential_decay(self):
        rng = np.random.default_rng(111)
        g = directed_tree(6, root=0)
        x0 = rng.normal(size=(6, 1))
        traj = vc.simulate(x0, g, alpha=1.0, t_end=10.0, h=0.01, sample_every=10)
        spreads = np.array([pairwise_euclidean_spread(s) for s in traj.states])
        half = len(spreads) // 2
        slope, _, _ = fit_log_linear(traj.times[half:], spreads[half:])
        assert slope < 0

    def test_disconnected_components_settle_apart(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[1, 0] = 1.0
        a[2, 3] = a[3, 2] = 1.0
        g = WeightedDigraph(a)
        x0 = np.array([[0.0], [1.0], [10.0], [12.0]])
        traj = vc.simulate(x0, g, alpha=1.0, t_end=20.0, h=0.01, sample_every=100)
        final = traj.states[-1][:, 0]
        assert abs(final[0] - final[1]) < 1e-6
        assert abs(final[2] - final[3]) < 1e-6
        assert abs(final[0] - final[2]) > 5.0

    def test_translation_equivariance_discrete_bitwise(self):
        # dyadic data keeps every float op exact, so equality is bitwise
        rng = np.random.default_rng(113)
        g = complete_graph(4)
        x0 = rng.integers(-8, 8, size=(4, 2)).astype(float) / 16.0
        shift = np.array([2.0, -0.5])
        t1 = vc.simulate(x0, g, alpha=0.25, mode="dt", steps=12)
        t2 = vc.simulate(x0 + shift, g, alpha=0.25, mode="dt", steps=12)
        assert np.array_equal(t2.states, t1.states + shift)

    def test_translation_equivariance_continuous(self):
        rng = np.random.default_rng(115)
        g = random_undirected(rng, 5)
        x0 = rng.normal(size=(5, 2))
        shift = np.array([3.0, -1.0])
        t1 = vc.simulate(x0, g, alpha=1.0, t_end=5.0, h=0.01, sample_every=50)
        t2 = vc.simulate(x0 + shift, g, alpha=1.0, t_end=5.0, h=0.01, sample_every=50)
        np.testing.assert_allclose(t2.states, t1.states + shift, atol=1e-12)

    def test_cost_monotone_on_fixed_undirected_graph(self):
        rng = np.random.default_rng(117)
        g = random_undirected(rng, 6)
        x0 = rng.normal(size=(6, 2))
        traj = vc.simulate(x0, g, alpha=1.0, t_end=5.0, h=0.01, sample_every=5)
        costs = np.array([vc.disagreement_cost(s, g) for s in traj.states])
        assert np.all(np.diff(costs) <= 1e-9 * (1.0 + costs[:-1]))

    def test_discrete_step_propagates_gain_violation(self):
        with pytest.raises(ValueError, match="gain condition"):
            vc.simulate(np.zeros((4, 1)), complete_graph(4), alpha=0.5,
                        mode="dt", steps=3)

    def test_csv_header_and_determinism(self, tmp_path):
        g = path_graph(2)
        traj = vc.simulate(np.array([[0.0], [1.0]]), g, alpha=1.0, t_end=1.0, h=0.1)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        traj.to_csv(p1)
        traj.to_csv(p2)
        text = p1.read_text()
        assert text.splitlines()[0] == "t,x_1_1,x_2_1"
        assert p1.read_bytes() == p2.read_bytes()
