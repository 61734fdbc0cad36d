from __future__ import annotations

import numpy as np

from network.weights import AgentMatrix, average, disagreement
from problems.base import Problem
from problems.reference import Reference


def evaluate_metrics(x: AgentMatrix, problem: Problem, reference: Reference) -> tuple[float, float]:
    """
    Objective gap at the average, (1/m) sum_i F_i(alpha(x)) - f*, and the
    consensus violation (1/m) sum_i ||x_(i) - alpha(x)||^2. Counters are not
    touched.
    """
    x = np.asarray(x, dtype=float)
    obj_gap = problem.objective(average(x)) - reference.f_star
    pi_x = disagreement(x)
    consensus_violation = float(np.sum(pi_x * pi_x)) / x.shape[0]
    return float(obj_gap), consensus_violation


def measure_radii(x0: AgentMatrix, problem: Problem, reference: Reference) -> tuple[float, float]:
    """R1 = max_i ||x0_(i) - x*||, R2 = max_i ||grad f_i(x*)||, recorded for the rate bounds."""
    x_star_rows = np.repeat(reference.x_star.reshape(1, -1), problem.m, axis=0)
    r1 = float(np.max(np.linalg.norm(np.asarray(x0) - x_star_rows, axis=1)))
    r2 = float(np.max(np.linalg.norm(problem.gradient(x_star_rows), axis=1)))
    return r1, r2
