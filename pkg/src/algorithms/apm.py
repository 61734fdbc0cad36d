from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from algorithms.schedules import ApmSchedule
from decentral_apm.errors import NoCheapProx
from harness.counters import Counters
from harness.evaluation import measure_radii
from harness.trace import RunTrace, TraceRecorder
from network.weights import AgentMatrix, WeightMatrix
from problems.base import Problem
from problems.reference import Reference, centralized_reference

logger = logging.getLogger(__name__)


@dataclass
class ApmState:
    x_cur: AgentMatrix
    x_prev: AgentMatrix
    z_carry: AgentMatrix
    k: int = 0
    counters: Counters = field(default_factory=Counters)
    inner_total: int = 0

    @classmethod
    def initial(cls, x0: AgentMatrix, counters: Optional[Counters] = None) -> "ApmState":
        x0 = np.array(x0, dtype=float, copy=True)
        return cls(x_cur=x0, x_prev=x0.copy(), z_carry=x0.copy(), counters=counters or Counters())


def penalized_gradient(
    y: AgentMatrix,
    problem: Problem,
    W: WeightMatrix,
    pen: float,
    counters: Optional[Counters] = None,
) -> AgentMatrix:
    """s = grad f(y) + pen (I - W) y; one neighbor exchange, one gradient when f is present."""
    if pen <= 0:
        raise ValueError("pen must be > 0")
    s = pen * W.laplacian_apply(y)
    if problem.has_smooth:
        s = s + problem.gradient(y, counters)
    if counters is not None:
        counters.add_communications(1)
    return s


def sliding_inner_step(
    z: AgentMatrix,
    y: AgentMatrix,
    s: AgentMatrix,
    problem: Problem,
    L: float,
    pen: float,
    eta: float,
    counters: Optional[Counters] = None,
) -> AgentMatrix:
    """
    Row-wise minimizer of
        <g(z) + s, u> + (L + pen)/2 ||u - y||^2 + 1/(2 eta) ||u - z||^2
    with g(z) a subgradient of h at z:
        u = ((L + pen) y + z / eta - g(z) - s) / (L + pen + 1 / eta).
    Purely local, no communication.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    g = problem.subgradient(z, counters)
    inv_eta = 1.0 / eta
    return ((L + pen) * y + inv_eta * z - g - s) / (L + pen + inv_eta)


def direct_prox_step(
    y: AgentMatrix,
    problem: Problem,
    W: WeightMatrix,
    L: float,
    pen: float,
    counters: Optional[Counters] = None,
) -> AgentMatrix:
    """Prox_h(y - (grad f(y) + pen U^2 y) / (L + pen)) with step 1 / (L + pen)."""
    if not problem.has_cheap_prox:
        raise NoCheapProx(f"{problem.kind} has no closed-form prox; use the sliding inner loop")
    s = penalized_gradient(y, problem, W, pen, counters)
    step = 1.0 / (L + pen)
    return problem.prox(y - step * s, step)


def apm_step(
    state: ApmState,
    problem: Problem,
    W: WeightMatrix,
    schedule: ApmSchedule,
    *,
    use_prox: bool,
) -> ApmState:
    k = state.k
    L = problem.L
    pen = schedule.penalty(k)
    y = state.x_cur + schedule.extrapolation(k) * (state.x_cur - state.x_prev)

    if use_prox:
        x_next = direct_prox_step(y, problem, W, L, pen, state.counters)
        return ApmState(
            x_cur=x_next,
            x_prev=state.x_cur,
            z_carry=state.z_carry,
            k=k + 1,
            counters=state.counters,
            inner_total=state.inner_total,
        )

    s = penalized_gradient(y, problem, W, pen, state.counters)
    T = schedule.inner_iters(k)
    eta = schedule.eta(k)
    z = state.z_carry
    acc = np.zeros_like(y)
    for _ in range(T):
        z = sliding_inner_step(z, y, s, problem, L, pen, eta, state.counters)
        acc += z
    logger.debug("APM k=%d T_k=%d eta_k=%.3e pen=%.3e", k, T, eta, pen)
    return ApmState(
        x_cur=acc / T,
        x_prev=state.x_cur,
        z_carry=z,
        k=k + 1,
        counters=state.counters,
        inner_total=state.inner_total + T,
    )


def run_apm(
    problem: Problem,
    W: WeightMatrix,
    schedule: ApmSchedule,
    K: int,
    *,
    reference: Optional[Reference] = None,
    prefer_prox: bool = True,
    x0: Optional[AgentMatrix] = None,
    counters: Optional[Counters] = None,
    metric_every: int = 1,
    record_wall_time: bool = True,
) -> RunTrace:
    if K < 1:
        raise ValueError("K must be >= 1")
    if schedule.mode == "fixed" and schedule.K != K:
        logger.warning("fixed-horizon schedule tuned for K=%d but running K=%d", schedule.K, K)

    use_prox = prefer_prox and problem.has_cheap_prox
    reference = reference or centralized_reference(problem)
    x0 = np.zeros((problem.m, problem.n)) if x0 is None else np.asarray(x0, dtype=float)
    state = ApmState.initial(x0, counters)

    r1, r2 = measure_radii(x0, problem, reference)
    recorder = TraceRecorder(
        problem,
        reference,
        state.counters,
        horizon=K,
        metric_every=metric_every,
        record_wall_time=record_wall_time,
        metadata={
            "algorithm": "apm",
            "schedule": schedule.name,
            "path": "prox" if use_prox else "sliding",
            "K": K,
            "beta0": schedule.beta0,
            "eta_scale": schedule.eta_scale,
            "gap": W.gap,
            "sigma2": W.sigma2,
            "L": problem.L,
            "mu": problem.mu,
            "M": problem.M,
            "R1": r1,
            "R2": r2,
        },
    )

    logger.info("APM (%s, %s path) start: K=%d gap=%.4f", schedule.name, "prox" if use_prox else "sliding", K, W.gap)
    for k in range(K):
        state = apm_step(state, problem, W, schedule, use_prox=use_prox)
        recorder.record(k + 1, state.x_cur)

    trace = recorder.trace
    trace.metadata["inner_total"] = state.inner_total
    logger.info(
        "APM done: subgrads=%d comms=%d gap=%.3e violation=%.3e",
        state.counters.subgrad_evals,
        state.counters.communications,
        trace.last.obj_gap,
        trace.last.consensus_violation,
    )
    return trace
