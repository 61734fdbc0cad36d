import itertools

import numpy as np
import pytest

from harness.counters import Counters
from network.graph import Network, build_erdos_renyi
from network.weights import lazy_metropolis_weights
from problems.generators import gen_hinge_svm, gen_lasso, gen_least_squares


@pytest.fixture
def counters():
    return Counters()


@pytest.fixture
def complete_weights():
    """Lazy Metropolis matrix of K_4: (I + J/4) / 2, sigma2 = 1/2."""
    return lazy_metropolis_weights(Network.from_edges(4, itertools.combinations(range(4), 2)))


@pytest.fixture
def er_weights():
    return lazy_metropolis_weights(build_erdos_renyi(8, 0.5, seed=3))


@pytest.fixture
def ls_instance():
    """Strongly convex least squares on 4 agents: (problem, reference)."""
    return gen_least_squares(N=40, n=5, m=4, mu=0.1, seed=7)


@pytest.fixture
def lasso_instance():
    return gen_lasso(N=40, n=5, m=4, mu=0.0, lam=0.05, seed=7)


@pytest.fixture
def hinge_instance():
    return gen_hinge_svm(N=40, n=5, m=4, seed=7, iterations=300)


@pytest.fixture
def random_agent_matrix():
    def _make(m: int, n: int, seed: int = 0):
        return np.random.default_rng(seed).standard_normal((m, n))
    return _make
