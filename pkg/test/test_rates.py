"""Desk-sized convergence runs. Minutes, not seconds: `pytest -m "not slow"` skips them."""
import numpy as np
import pytest

from algorithms.apm import run_apm
from algorithms.apm_c import run_apm_c
from algorithms.baselines import run_extra
from algorithms.schedules import ApmcScheduleNSC, ApmcScheduleSC, ApmSchedule
from decentral_apm.errors import NotConnected
from network.graph import build_erdos_renyi
from network.weights import invariant_errors, lazy_metropolis_weights
from problems.generators import gen_hinge_svm, gen_least_squares

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def desk_graph():
    return lazy_metropolis_weights(build_erdos_renyi(20, 0.5, seed=0))


@pytest.mark.parametrize(
    "p, low, high",
    [(0.5, 0.33 / 2, 0.33 * 2), (0.1, 0.13 / 2, 0.13 * 2), (0.05, 0.04 / 2, 0.04 * 2)],
)
def test_hundred_agent_gaps(p, low, high):
    hits = 0
    for seed in range(20):
        W = lazy_metropolis_weights(build_erdos_renyi(100, p, seed=seed))
        assert max(invariant_errors(W).values()) < 1e-10
        hits += low <= W.gap <= high
    assert hits >= 18


def test_weight_invariants_across_random_graphs():
    rng = np.random.default_rng(0)
    built = 0
    for trial in range(200):
        m = int(rng.integers(10, 101))
        p = float(rng.choice([0.05, 0.1, 0.5]))
        try:
            net = build_erdos_renyi(m, p, seed=1000 * trial)
        except NotConnected:
            # G(m, 0.05) almost never connects for small m
            continue
        W = lazy_metropolis_weights(net)
        assert max(invariant_errors(W).values()) < 1e-10
        np.testing.assert_allclose(W.entries, W.entries.T, atol=0.0)
        assert 0.0 < W.gap <= 1.0
        built += 1
    assert built >= 150


def test_strongly_convex_desk_run(desk_graph):
    problem, reference = gen_least_squares(N=200, n=30, m=20, mu=1e-2, seed=0)
    K = 1500
    apmc = run_apm_c(problem, desk_graph, ApmcScheduleSC.for_problem(problem), K, reference=reference, record_wall_time=False)
    assert apmc.last.obj_gap <= 1e-8
    assert apmc.last.consensus_violation <= 1e-10

    extra = run_extra(problem, desk_graph, 1.0 / problem.L, K, reference=reference, record_wall_time=False)
    apmc_cost = apmc.cost_to_reach(1e-6)
    extra_cost = extra.cost_to_reach(1e-6)
    assert apmc_cost is not None
    assert extra_cost is None or apmc_cost < extra_cost


def test_nonstrongly_convex_slope(desk_graph):
    problem, reference = gen_least_squares(N=200, n=30, m=20, mu=0.0, seed=0)
    trace = run_apm_c(problem, desk_graph, ApmcScheduleNSC(), 400, reference=reference, record_wall_time=False)
    ks = np.array([50, 100, 200, 400])
    gaps = np.array([trace.rows[k - 1].obj_gap for k in ks])
    assert np.all(gaps > 0)
    slope = np.polyfit(np.log(ks), np.log(gaps), 1)[0]
    assert slope <= -1.5


def test_hinge_desk_rates(desk_graph):
    problem, reference = gen_hinge_svm(N=200, n=50, m=20, seed=0)
    ks = [50, 100, 200, 400, 800]
    gaps, violations = [], []
    for K in ks:
        trace = run_apm(
            problem, desk_graph, ApmSchedule.tuned(desk_graph, "fixed", K), K,
            reference=reference, metric_every=K, record_wall_time=False,
        )
        assert trace.metadata["path"] == "sliding"
        gaps.append(max(trace.last.obj_gap, 0.0))
        violations.append(trace.last.consensus_violation)

    slope = np.polyfit(np.log(ks), np.log(np.maximum(gaps, 1e-16)), 1)[0]
    assert slope <= -0.7
    # doubling the horizon cuts the violation at least threefold
    for before, after in zip(violations, violations[1:]):
        assert before >= 3.0 * after

    # horizon-free schedule: within a log factor of the fixed-horizon 1/K envelope
    rate = max(K * g for K, g in zip(ks, gaps))
    adaptive = run_apm(
        problem, desk_graph, ApmSchedule.tuned(desk_graph, "adaptive", ks[-1]), ks[-1],
        reference=reference, record_wall_time=False,
    )
    best = np.minimum.accumulate(np.maximum(adaptive.column("obj_gap"), 0.0))
    for K in (400, 800):
        assert best[K - 1] <= 3.0 * np.log(K) * rate / K + 1e-12
