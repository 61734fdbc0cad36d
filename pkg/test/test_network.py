import itertools

import numpy as np
import pytest

from decentral_apm.errors import DegenerateGap, NotConnected
from network.graph import Network, build_erdos_renyi
from network.weights import (
    WeightMatrix,
    average,
    disagreement,
    invariant_errors,
    lazy_metropolis_weights,
    metropolis_weights,
    spectral_gap,
    u_quadratic_norm,
)


def test_from_edges_normalizes_orientation_and_degrees():
    net = Network.from_edges(3, [(1, 0), (0, 1), (2, 1)])
    assert net.edges == frozenset({(0, 1), (1, 2)})
    assert net.degrees == (1, 2, 1)
    assert net.neighbors(1) == [0, 2]


def test_from_edges_rejects_self_loop_and_out_of_range():
    with pytest.raises(ValueError):
        Network.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        Network.from_edges(3, [(0, 3)])


def test_erdos_renyi_is_deterministic_and_connected():
    a = build_erdos_renyi(20, 0.3, seed=11)
    b = build_erdos_renyi(20, 0.3, seed=11)
    assert a == b
    assert a.is_connected()


def test_erdos_renyi_gives_up_on_empty_graphs():
    with pytest.raises(NotConnected):
        build_erdos_renyi(5, 0.0, seed=0, max_retries=3)


def test_erdos_renyi_rejects_bad_probability():
    with pytest.raises(ValueError):
        build_erdos_renyi(5, 1.5, seed=0)


def test_single_agent_graph():
    net = build_erdos_renyi(1, 0.0, seed=0)
    W = lazy_metropolis_weights(net)
    assert W.entries.tolist() == [[1.0]]
    assert (W.sigma2, W.gap) == (0.0, 1.0)


def test_complete_graph_weights():
    W = lazy_metropolis_weights(Network.from_edges(4, itertools.combinations(range(4), 2)))
    np.testing.assert_allclose(W.entries, 0.5 * (np.eye(4) + np.full((4, 4), 0.25)), atol=1e-15)
    assert W.sigma2 == pytest.approx(0.5, abs=1e-12)
    assert W.gap == pytest.approx(0.5, abs=1e-12)


def test_two_agent_weights():
    W = lazy_metropolis_weights(Network.from_edges(2, [(0, 1)]))
    np.testing.assert_allclose(W.entries, [[0.75, 0.25], [0.25, 0.75]])
    assert W.gap == pytest.approx(0.5)


def test_metropolis_matrix_is_stochastic():
    M = metropolis_weights(build_erdos_renyi(12, 0.4, seed=2))
    np.testing.assert_allclose(M.sum(axis=1), 1.0, atol=1e-14)
    np.testing.assert_allclose(M, M.T)
    assert np.all(M >= 0)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_lazy_weights_mixing_invariants(seed):
    W = lazy_metropolis_weights(build_erdos_renyi(15, 0.3, seed=seed))
    errors = invariant_errors(W)
    assert errors["symmetry"] == 0.0
    assert errors["row_sum"] < 1e-12
    assert errors["negative_eigenvalue"] < 1e-12
    assert errors["max_eigenvalue_excess"] < 1e-12
    assert 0.0 < W.gap <= 1.0


def test_identity_has_no_gap():
    with pytest.raises(DegenerateGap):
        spectral_gap(np.eye(3))


def test_spectral_gap_rejects_non_square():
    with pytest.raises(ValueError):
        spectral_gap(np.ones((2, 3)))


def test_from_entries_copies_and_freezes():
    raw = np.array([[0.75, 0.25], [0.25, 0.75]])
    W = WeightMatrix.from_entries(raw)
    raw[0, 0] = 0.0
    assert W.entries[0, 0] == 0.75
    with pytest.raises(ValueError):
        W.entries[0, 0] = 1.0


def test_mix_preserves_average(er_weights, random_agent_matrix):
    x = random_agent_matrix(er_weights.m, 3)
    np.testing.assert_allclose(average(er_weights.mix(x)), average(x), atol=1e-14)


def test_disagreement_and_u_norm(er_weights, random_agent_matrix):
    x = random_agent_matrix(er_weights.m, 3, seed=5)
    np.testing.assert_allclose(disagreement(x).sum(axis=0), 0.0, atol=1e-13)
    assert u_quadratic_norm(er_weights, x) >= 0.0
    consensual = np.tile(np.arange(3.0), (er_weights.m, 1))
    assert u_quadratic_norm(er_weights, consensual) == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(er_weights.laplacian_apply(consensual), 0.0, atol=1e-14)


def test_star_graph_metropolis_entries():
    net = Network.from_edges(3, [(0, 1), (0, 2)])
    M = metropolis_weights(net)
    third = 1.0 / 3.0
    np.testing.assert_allclose(M, [[third, third, third], [third, 2 * third, 0.0], [third, 0.0, 2 * third]])
    W = lazy_metropolis_weights(net)
    # eig(M) = {1, 2/3, 0}
    assert W.sigma2 == pytest.approx(5.0 / 6.0, abs=1e-12)
    assert W.gap == pytest.approx(1.0 / 6.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_weights_live_on_edges_and_diagonal(seed):
    net = build_erdos_renyi(25, 0.2, seed=seed)
    W = lazy_metropolis_weights(net)
    pattern = np.eye(net.m, dtype=bool)
    for i, j in net.edges:
        pattern[i, j] = pattern[j, i] = True
    np.testing.assert_array_equal(W.entries != 0.0, pattern)


@pytest.mark.parametrize("seed", range(5))
def test_gap_does_not_depend_on_agent_labels(seed):
    net = build_erdos_renyi(18, 0.3, seed=seed)
    perm = np.random.default_rng(seed).permutation(net.m)
    relabeled = Network.from_edges(net.m, [(int(perm[i]), int(perm[j])) for i, j in net.edges])
    W, V = lazy_metropolis_weights(net), lazy_metropolis_weights(relabeled)
    assert V.gap == pytest.approx(W.gap, abs=1e-12)
    P = np.eye(net.m)[perm]
    np.testing.assert_allclose(V.entries, P.T @ W.entries @ P, atol=1e-15)


def test_u_norm_matches_matrix_square_root():
    rng = np.random.default_rng(8)
    for trial in range(20):
        m = int(rng.integers(2, 9))
        W = lazy_metropolis_weights(build_erdos_renyi(m, 0.6, seed=trial))
        lam, vecs = np.linalg.eigh(np.eye(m) - W.entries)
        U = vecs @ np.diag(np.sqrt(np.clip(lam, 0.0, None))) @ vecs.T
        x = rng.standard_normal((m, 3))
        assert u_quadratic_norm(W, x) == pytest.approx(np.linalg.norm(U @ x) ** 2, rel=1e-10, abs=1e-10)


def test_gap_bounds_disagreement_by_u_norm():
    rng = np.random.default_rng(9)
    pairs = 0
    for trial in range(200):
        m = int(rng.integers(3, 31))
        W = lazy_metropolis_weights(build_erdos_renyi(m, float(rng.uniform(0.3, 1.0)), seed=trial))
        for _ in range(5):
            x = rng.standard_normal((m, int(rng.integers(1, 5)))) * rng.uniform(0.1, 10.0)
            assert W.gap * np.linalg.norm(disagreement(x)) ** 2 <= u_quadratic_norm(W, x) + 1e-9
            pairs += 1
    assert pairs == 1000
