import decimal
import math
from decimal import Decimal

import numpy as np
import pytest

from consensus.accelerated import (
    ConsensusParams,
    accelerated_consensus,
    contraction_factor,
    disagreement_envelope,
    extrapolation_coefficient,
    required_inner_iters,
)
from decentral_apm.errors import InvalidGap
from network.graph import Network, build_erdos_renyi
from network.weights import average, disagreement, lazy_metropolis_weights


def test_extrapolation_coefficient_values():
    assert extrapolation_coefficient(0.0) == 0.0
    r = math.sqrt(0.75)
    assert extrapolation_coefficient(0.5) == pytest.approx((1 - r) / (1 + r))


def test_contraction_is_square_root_of_eta():
    for sigma2 in (0.1, 0.5, 0.9, 0.999):
        assert contraction_factor(sigma2) == pytest.approx(math.sqrt(extrapolation_coefficient(sigma2)))


def test_zero_rounds_is_identity(er_weights, random_agent_matrix, counters):
    z = random_agent_matrix(er_weights.m, 4)
    out = accelerated_consensus(ConsensusParams.for_weights(er_weights), z, 0, counters)
    np.testing.assert_array_equal(out, z)
    assert out is not z
    assert counters.communications == 0


def test_negative_rounds_rejected(er_weights, random_agent_matrix):
    with pytest.raises(ValueError):
        accelerated_consensus(ConsensusParams.for_weights(er_weights), random_agent_matrix(er_weights.m, 2), -1)


def test_rounds_are_counted_and_average_kept(er_weights, random_agent_matrix, counters):
    z = random_agent_matrix(er_weights.m, 4, seed=1)
    out = accelerated_consensus(ConsensusParams.for_weights(er_weights), z, 17, counters)
    assert counters.communications == 17
    np.testing.assert_allclose(average(out), average(z), atol=1e-12)


def test_complete_graph_matches_closed_form(complete_weights, random_agent_matrix):
    # on K_4 every disagreement direction has eigenvalue sigma2 = 1/2 and the
    # recursion has the double root rho = sqrt(eta): c_t = rho^t (1 + (1 - rho) t)
    params = ConsensusParams.for_weights(complete_weights)
    rho = math.sqrt(params.eta)
    z = random_agent_matrix(4, 3, seed=2)
    for T in (1, 2, 5, 10):
        out = accelerated_consensus(params, z, T)
        expected = rho**T * (1 + (1 - rho) * T)
        np.testing.assert_allclose(disagreement(out), expected * disagreement(z), atol=1e-13)


@pytest.mark.parametrize("T", [1, 5, 20, 60])
def test_disagreement_contracts_at_accelerated_rate(er_weights, random_agent_matrix, T):
    params = ConsensusParams.for_weights(er_weights)
    z = random_agent_matrix(er_weights.m, 3, seed=T)
    before = np.linalg.norm(disagreement(z))
    after = np.linalg.norm(disagreement(accelerated_consensus(params, z, T)))
    assert after <= disagreement_envelope(er_weights.sigma2, T) * before * (1 + 1e-9) + 1e-14


def test_two_agents_decay_with_the_double_root():
    W = lazy_metropolis_weights(Network.from_edges(2, [(0, 1)]))
    params = ConsensusParams.for_weights(W)
    rho = contraction_factor(W.sigma2)
    z = np.array([[1.0], [0.0]])
    T = 20
    after = np.linalg.norm(disagreement(accelerated_consensus(params, z, T)))
    before = np.linalg.norm(disagreement(z))
    expected = rho**T * (1 + (1 - rho) * T) * before
    assert after == pytest.approx(expected, rel=1e-10)
    # the plain rho^T bound is exceeded here; the envelope is attained
    assert after > rho**T * before
    assert after == pytest.approx(disagreement_envelope(W.sigma2, T) * before, rel=1e-10)


def test_envelope_holds_on_random_graphs():
    rng = np.random.default_rng(2024)
    for trial in range(500):
        m = int(rng.integers(3, 31))
        p = float(rng.uniform(0.3, 1.0))
        T = int(rng.choice([1, 5, 20]))
        W = lazy_metropolis_weights(build_erdos_renyi(m, p, seed=trial))
        z = rng.standard_normal((m, 3))
        out = accelerated_consensus(ConsensusParams.for_weights(W), z, T)
        before = np.linalg.norm(disagreement(z))
        after = np.linalg.norm(disagreement(out))
        assert after <= disagreement_envelope(W.sigma2, T) * before + 1e-12
        np.testing.assert_allclose(average(out), average(z), atol=1e-12)


def test_envelope_values():
    assert disagreement_envelope(0.5, 0) == 1.0 + contraction_factor(0.5)
    assert disagreement_envelope(0.0, 3) == 0.0
    with pytest.raises(ValueError):
        disagreement_envelope(0.5, -1)


def test_required_inner_iters_formula():
    # ratio = 100 * 1 / (2 * 0.5 * 0.01) = 1e4, rate = 1 - sqrt(0.25) = 0.5
    T = required_inner_iters(100.0, 0.5, 0.01, 1.0, 0.75)
    assert T == math.ceil(math.log(1e4) / (2 * math.log(2)))
    assert T == 7


def test_required_inner_iters_edge_cases():
    assert required_inner_iters(1.0, 1.0, 1.0, 1.0, 0.5) == 0
    assert required_inner_iters(100.0, 0.5, 0.01, 0.0, 0.5) == 0
    assert required_inner_iters(100.0, 0.5, 0.01, 1.0, 0.0) == 0
    with pytest.raises(InvalidGap):
        required_inner_iters(100.0, 0.5, 0.01, 1.0, 1.0)
    with pytest.raises(ValueError):
        required_inner_iters(0.0, 0.5, 0.01, 1.0, 0.5)


def test_required_inner_iters_matches_high_precision_evaluation():
    rng = np.random.default_rng(5)
    checked = 0
    with decimal.localcontext() as ctx:
        ctx.prec = 50
        for _ in range(300):
            args = (
                float(rng.uniform(1.0, 1000.0)),
                float(rng.uniform(0.01, 1.0)),
                float(10.0 ** rng.uniform(-8, -2)),
                float(10.0 ** rng.uniform(-1, 2)),
                float(rng.uniform(0.01, 0.999)),
            )
            beta0, theta_pen, eps_k, pi_norm_sq, sigma2 = (Decimal(a) for a in args)
            ratio = beta0 * pi_norm_sq / (2 * theta_pen * eps_k)
            rate = 1 - (1 - sigma2).sqrt()
            value = ratio.ln() / (-2 * rate.ln())
            if abs(value - value.to_integral_value()) < Decimal("1e-9"):
                continue
            expected = max(0, int(value.to_integral_value(rounding=decimal.ROUND_CEILING)))
            assert required_inner_iters(*args) == expected
            checked += 1
    assert checked > 250
