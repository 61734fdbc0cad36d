from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from algorithms.schedules import ApmcSchedule
from consensus.accelerated import ConsensusParams, accelerated_consensus
from harness.counters import Counters
from harness.evaluation import measure_radii
from harness.trace import RunTrace, TraceRecorder
from network.weights import AgentMatrix, WeightMatrix, disagreement
from problems.base import Problem
from problems.reference import Reference, centralized_reference

logger = logging.getLogger(__name__)


@dataclass
class ApmcState:
    x_cur: AgentMatrix
    x_prev: AgentMatrix
    k: int = 0
    counters: Counters = field(default_factory=Counters)
    inner_total: int = 0

    @classmethod
    def initial(cls, x0: AgentMatrix, counters: Optional[Counters] = None) -> "ApmcState":
        x0 = np.array(x0, dtype=float, copy=True)
        return cls(x_cur=x0, x_prev=x0.copy(), counters=counters or Counters())


def penalty_prox_combination(
    z: AgentMatrix, z_mixed: AgentMatrix, L: float, vartheta: float, beta0: float
) -> AgentMatrix:
    """(L vartheta z + beta0 z_mixed) / (L vartheta + beta0)."""
    weight = L * vartheta
    return (weight * z + beta0 * z_mixed) / (weight + beta0)


def exact_penalty_prox(z: AgentMatrix, L: float, vartheta: float, beta0: float) -> AgentMatrix:
    """
    argmin_x beta0 / (2 vartheta) ||Pi x||^2 + L/2 ||x - z||^2, i.e. the
    combination with the exact average 1 alpha(z)^T.
    """
    consensual = np.broadcast_to(np.mean(z, axis=0), np.shape(z))
    return penalty_prox_combination(z, consensual, L, vartheta, beta0)


def apm_c_step(
    state: ApmcState,
    problem: Problem,
    W: WeightMatrix,
    schedule: ApmcSchedule,
    k: Optional[int] = None,
    consensus: Optional[ConsensusParams] = None,
) -> ApmcState:
    """
    One outer iteration: extrapolate, one gradient step, T_k accelerated
    consensus rounds on z^k, then the convex combination that solves the
    penalty prox with the mixed z^{k,T_k} in place of 1 alpha(z^k)^T.
    """
    k = state.k if k is None else k
    L = problem.L
    consensus = consensus or ConsensusParams.for_weights(W)

    y = state.x_cur + schedule.extrapolation(k, L) * (state.x_cur - state.x_prev)
    z = y - problem.gradient(y, state.counters) / L

    if W.m == 1:
        T = 0
    elif schedule.theory_mode:
        pi_z = disagreement(z)
        T = schedule.inner_iters(k, W, pi_norm_sq=float(np.sum(pi_z * pi_z)))
    else:
        T = schedule.inner_iters(k, W)
    logger.debug("APM-C k=%d T_k=%d", k, T)
    z_mixed = accelerated_consensus(consensus, z, T, state.counters)

    x_next = penalty_prox_combination(z, z_mixed, L, schedule.vartheta(k), schedule.beta0)
    return ApmcState(
        x_cur=x_next,
        x_prev=state.x_cur,
        k=k + 1,
        counters=state.counters,
        inner_total=state.inner_total + T,
    )


def run_apm_c(
    problem: Problem,
    W: WeightMatrix,
    schedule: ApmcSchedule,
    K: int,
    *,
    reference: Optional[Reference] = None,
    x0: Optional[AgentMatrix] = None,
    counters: Optional[Counters] = None,
    metric_every: int = 1,
    record_wall_time: bool = True,
) -> RunTrace:
    if K < 1:
        raise ValueError("K must be >= 1")
    if not problem.has_smooth:
        raise ValueError("APM-C needs a smooth problem (L > 0)")

    reference = reference or centralized_reference(problem)
    x0 = np.zeros((problem.m, problem.n)) if x0 is None else np.asarray(x0, dtype=float)
    state = ApmcState.initial(x0, counters)
    _check_penalty_condition(problem, schedule, reference)

    r1, r2 = measure_radii(x0, problem, reference)
    recorder = TraceRecorder(
        problem,
        reference,
        state.counters,
        horizon=K,
        metric_every=metric_every,
        record_wall_time=record_wall_time,
        metadata={
            "algorithm": "apm-c",
            "schedule": schedule.name,
            "theory_mode": schedule.theory_mode,
            "K": K,
            "beta0": schedule.beta0,
            "inner_divisor": schedule.inner_divisor,
            "sigma2": W.sigma2,
            "gap": W.gap,
            "L": problem.L,
            "mu": problem.mu,
            "M": problem.M,
            "R1": r1,
            "R2": r2,
        },
    )

    logger.info("APM-C (%s) start: K=%d m=%d n=%d gap=%.4f", schedule.name, K, problem.m, problem.n, W.gap)
    consensus = ConsensusParams.for_weights(W)
    for k in range(K):
        state = apm_c_step(state, problem, W, schedule, k, consensus)
        recorder.record(k + 1, state.x_cur)

    trace = recorder.trace
    trace.metadata["inner_total"] = state.inner_total
    logger.info(
        "APM-C done: grads=%d comms=%d gap=%.3e violation=%.3e",
        state.counters.grad_evals,
        state.counters.communications,
        trace.last.obj_gap,
        trace.last.consensus_violation,
    )
    return trace


def _check_penalty_condition(problem: Problem, schedule: ApmcSchedule, reference: Reference) -> None:
    """beta0 >= L ||grad f(x*)||_F^2 is assumed by the nonstrongly convex rate; warn only."""
    if schedule.name != "nsc":
        return
    x_star_rows = np.repeat(reference.x_star.reshape(1, -1), problem.m, axis=0)
    grad_sq = float(np.sum(problem.gradient(x_star_rows) ** 2))
    bound = problem.L * grad_sq
    if schedule.beta0 < bound:
        logger.warning("beta0=%g is below L ||grad f(x*)||_F^2 = %.4g; the O(1/K^2) rate is not guaranteed", schedule.beta0, bound)
