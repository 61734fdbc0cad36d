from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from decentral_apm.errors import SingularSystem
from problems.base import Problem
from problems.hinge import HingeSvmProblem
from problems.least_squares import LassoProblem, LeastSquaresProblem, soft_threshold

logger = logging.getLogger(__name__)

STEP_CANDIDATES = (1e-3, 1e-2, 1e-1, 1.0, 10.0)
# hinge value below which the rescaled planted direction counts as an exact minimizer
PLANTED_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Reference:
    x_star: np.ndarray
    f_star: float
    method: str = ""


def centralized_reference(
    problem: Problem,
    *,
    iterations: int = 1_000_000,
    step_scale: Optional[float] = None,
    start: Optional[np.ndarray] = None,
    tol: float = 1e-12,
) -> Reference:
    """
    Minimizer of (1/m) sum_i F_i over a single shared vector.

    least squares: dense symmetric solve of the normal equations
    lasso: FISTA until the iterate stalls (at most `iterations` steps)
    hinge: subgradient descent with step c / sqrt(t), best iterate kept
    """
    if isinstance(problem, LassoProblem):
        return _lasso_reference(problem, iterations=iterations, tol=tol)
    if isinstance(problem, LeastSquaresProblem):
        return _least_squares_reference(problem)
    if isinstance(problem, HingeSvmProblem):
        return _hinge_reference(problem, iterations=iterations, step_scale=step_scale, start=start)
    raise TypeError(f"no centralized reference for {type(problem).__name__}")


def _least_squares_reference(problem: LeastSquaresProblem) -> Reference:
    H, rhs = problem.normal_equations()
    if problem.mu > 0:
        x_star = scipy.linalg.solve(H, rhs, assume_a="pos")
        method = "cholesky"
    else:
        x_star, _, rank, _ = scipy.linalg.lstsq(H, rhs)
        residual = float(np.linalg.norm(H @ x_star - rhs))
        if residual > 1e-8 * max(1.0, float(np.linalg.norm(rhs))):
            raise SingularSystem(
                f"normal matrix has rank {rank} < {problem.n} and the system is inconsistent (residual {residual:.3e})"
            )
        method = "lstsq"
    f_star = problem.objective(x_star)
    logger.info("Least-squares reference via %s: f* = %.6e", method, f_star)
    return Reference(x_star=x_star, f_star=f_star, method=method)


def _lasso_reference(problem: LassoProblem, *, iterations: int, tol: float) -> Reference:
    H, rhs = problem.normal_equations()
    H = H / problem.m
    rhs = rhs / problem.m
    step = 1.0 / float(scipy.linalg.eigvalsh(H)[-1])

    x = np.zeros(problem.n)
    y = x.copy()
    t = 1.0
    for it in range(iterations):
        x_next = soft_threshold(y - step * (H @ y - rhs), problem.lam * step)
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_next + ((t - 1.0) / t_next) * (x_next - x)
        moved = float(np.linalg.norm(x_next - x))
        x, t = x_next, t_next
        if moved <= tol * max(1.0, float(np.linalg.norm(x))):
            break

    f_star = problem.objective(x)
    logger.info("Lasso reference via FISTA after %d iterations: f* = %.6e", it + 1, f_star)
    return Reference(x_star=x, f_star=f_star, method="fista")


def _hinge_reference(
    problem: HingeSvmProblem,
    *,
    iterations: int,
    step_scale: Optional[float],
    start: Optional[np.ndarray],
) -> Reference:
    A_full, labels = problem.stacked()

    # separable data: the planted direction scaled to unit margins reaches f = 0
    planted = _planted_candidate(problem, A_full, labels)
    if planted is not None and planted.f_star <= PLANTED_TOLERANCE:
        logger.info("Hinge reference via planted direction: f* = %.3e", planted.f_star)
        return planted

    x0 = np.zeros(problem.n) if start is None else np.asarray(start, dtype=float)
    if step_scale is None:
        trial = max(1, min(iterations, 2000))
        scored = [(_subgradient_descent(A_full, labels, problem.m, x0, c, trial)[1], c) for c in STEP_CANDIDATES]
        step_scale = min(scored)[1]
        logger.info("Hinge reference step bracket picked c = %g", step_scale)

    x_best, f_best = _subgradient_descent(A_full, labels, problem.m, x0, step_scale, iterations)
    reference = Reference(x_star=x_best, f_star=float(f_best), method="subgradient")
    if planted is not None and planted.f_star < reference.f_star:
        reference = planted

    logger.info("Hinge reference via %s: f* = %.6e", reference.method, reference.f_star)
    return reference


def _planted_candidate(problem: HingeSvmProblem, A_full: np.ndarray, labels: np.ndarray) -> Optional[Reference]:
    if problem.planted is None:
        return None
    scores = labels * (A_full.T @ problem.planted)
    if not np.all(scores > 0):
        return None
    candidate = problem.planted / float(np.min(scores))
    return Reference(x_star=candidate, f_star=problem.objective(candidate), method="planted")


def _subgradient_descent(
    A_full: np.ndarray,
    labels: np.ndarray,
    m: int,
    x0: np.ndarray,
    step_scale: float,
    iterations: int,
) -> tuple[np.ndarray, float]:
    x = np.array(x0, dtype=float, copy=True)
    best_x, best_f = x.copy(), math.inf
    for t in range(1, iterations + 1):
        margins = labels * (A_full.T @ x)
        value = float(np.sum(np.maximum(0.0, 1.0 - margins))) / m
        if value < best_f:
            best_x, best_f = x.copy(), value
        active = margins < 1.0
        if not np.any(active):
            break
        g = -(A_full[:, active] @ labels[active]) / m
        x -= (step_scale / math.sqrt(t)) * g
    return best_x, best_f
