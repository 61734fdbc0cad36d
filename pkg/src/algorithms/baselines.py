"""
Comparison methods run through the same counters and traces as APM-C/APM.

EXTRA     x^1 = W x^0 - a grad f(x^0)
          x^{k+2} = (I + W) x^{k+1} - W~ x^k - a (grad f(x^{k+1}) - grad f(x^k)),  W~ = (I + W) / 2

DNGD      accelerated distributed Nesterov gradient descent with gradient
          tracking; strongly convex recursion when mu > 0, the vanishing
          momentum recursion otherwise.

Both exchange once per iteration (DNGD ships y, v and s in the same round).
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from algorithms.schedules import next_theta_nsc
from harness.counters import Counters
from harness.evaluation import measure_radii
from harness.trace import RunTrace, TraceRecorder
from network.weights import AgentMatrix, WeightMatrix
from problems.base import Problem
from problems.reference import Reference, centralized_reference

logger = logging.getLogger(__name__)


def _recorder(
    name: str,
    problem: Problem,
    W: WeightMatrix,
    stepsize: float,
    K: int,
    reference: Reference,
    x0: AgentMatrix,
    counters: Counters,
    metric_every: int,
    record_wall_time: bool,
) -> TraceRecorder:
    r1, r2 = measure_radii(x0, problem, reference)
    return TraceRecorder(
        problem,
        reference,
        counters,
        horizon=K,
        metric_every=metric_every,
        record_wall_time=record_wall_time,
        metadata={
            "algorithm": name,
            "stepsize": stepsize,
            "K": K,
            "gap": W.gap,
            "sigma2": W.sigma2,
            "L": problem.L,
            "mu": problem.mu,
            "M": problem.M,
            "R1": r1,
            "R2": r2,
        },
    )


def _prepare(problem: Problem, K: int, stepsize: float, reference: Optional[Reference], x0: Optional[AgentMatrix]):
    if K < 1:
        raise ValueError("K must be >= 1")
    if stepsize < 0:
        raise ValueError("stepsize must be >= 0")
    if not problem.has_smooth:
        raise ValueError("baselines need a smooth problem (L > 0)")
    reference = reference or centralized_reference(problem)
    x0 = np.zeros((problem.m, problem.n)) if x0 is None else np.array(x0, dtype=float, copy=True)
    return reference, x0


def run_extra(
    problem: Problem,
    W: WeightMatrix,
    stepsize: float,
    K: int,
    *,
    reference: Optional[Reference] = None,
    x0: Optional[AgentMatrix] = None,
    counters: Optional[Counters] = None,
    metric_every: int = 1,
    record_wall_time: bool = True,
) -> RunTrace:
    reference, x_prev = _prepare(problem, K, stepsize, reference, x0)
    counters = counters or Counters()
    recorder = _recorder("extra", problem, W, stepsize, K, reference, x_prev, counters, metric_every, record_wall_time)

    g_prev = problem.gradient(x_prev, counters)
    w_prev = W.mix(x_prev)
    counters.add_communications(1)
    x_cur = w_prev - stepsize * g_prev
    recorder.record(1, x_cur)

    for k in range(2, K + 1):
        g_cur = problem.gradient(x_cur, counters)
        w_cur = W.mix(x_cur)
        counters.add_communications(1)
        # W~ x^k = (x^k + W x^k) / 2, with W x^k kept from the previous round
        x_next = x_cur + w_cur - 0.5 * (x_prev + w_prev) - stepsize * (g_cur - g_prev)
        x_prev, x_cur = x_cur, x_next
        w_prev, g_prev = w_cur, g_cur
        recorder.record(k, x_cur)

    logger.info("EXTRA done: grads=%d comms=%d gap=%.3e", counters.grad_evals, counters.communications, recorder.trace.last.obj_gap)
    return recorder.trace


def run_dngd(
    problem: Problem,
    W: WeightMatrix,
    stepsize: float,
    K: int,
    *,
    reference: Optional[Reference] = None,
    x0: Optional[AgentMatrix] = None,
    counters: Optional[Counters] = None,
    metric_every: int = 1,
    record_wall_time: bool = True,
) -> RunTrace:
    reference, x = _prepare(problem, K, stepsize, reference, x0)
    counters = counters or Counters()
    recorder = _recorder("dngd", problem, W, stepsize, K, reference, x, counters, metric_every, record_wall_time)

    strongly_convex = problem.mu > 0
    v = x.copy()
    y = x.copy()
    g = problem.gradient(y, counters)
    s = g.copy()

    if strongly_convex:
        alpha = math.sqrt(problem.mu * stepsize)
        # eta / alpha, written so that a zero step stays finite
        grad_weight = math.sqrt(stepsize / problem.mu)
    else:
        alpha = min(1.0, math.sqrt(stepsize * problem.L))

    for k in range(1, K + 1):
        wy, wv, ws = W.mix(y), W.mix(v), W.mix(s)
        counters.add_communications(1)

        x = wy - stepsize * s
        if strongly_convex:
            v = (1.0 - alpha) * wv + alpha * wy - grad_weight * s
            y = (x + alpha * v) / (1.0 + alpha)
        else:
            v = wv - (stepsize / alpha if alpha > 0 else 0.0) * s
            alpha = next_theta_nsc(alpha) if alpha > 0 else 0.0
            y = (1.0 - alpha) * x + alpha * v

        g_next = problem.gradient(y, counters)
        s = ws + g_next - g
        g = g_next
        recorder.record(k, x)

    logger.info("DNGD done: grads=%d comms=%d gap=%.3e", counters.grad_evals, counters.communications, recorder.trace.last.obj_gap)
    return recorder.trace
