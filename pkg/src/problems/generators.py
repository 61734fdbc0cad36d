from __future__ import annotations

import logging

import numpy as np

from decentral_apm.errors import IndivisibleData
from problems.hinge import HingeSvmProblem, sign_labels
from problems.least_squares import LassoProblem, LeastSquaresProblem
from problems.reference import Reference, centralized_reference

logger = logging.getLogger(__name__)


def _check_split(N: int, n: int, m: int) -> int:
    if N < 1 or n < 1 or m < 1:
        raise ValueError("N, n and m must be positive")
    if N % m:
        raise IndivisibleData(f"m={m} does not divide N={N}")
    return N // m


def _sample_data(N: int, n: int, m: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Uniform [0, 1] samples with unit-norm columns, split into m blocks of
    N/m columns, and a standard Gaussian planted vector.
    Returns (A of shape (m, n, N/m), all scores A_i^T x of shape (m, N/m), x).
    """
    s = N // m
    rng = np.random.default_rng(seed)
    A_full = rng.uniform(0.0, 1.0, size=(n, N))
    A_full /= np.linalg.norm(A_full, axis=0, keepdims=True)
    planted = rng.standard_normal(n)

    A = A_full.reshape(n, m, s).transpose(1, 0, 2).copy()
    scores = np.einsum("ins,n->is", A, planted)
    return A, scores, planted


def gen_least_squares(N: int, n: int, m: int, mu: float, seed: int) -> tuple[LeastSquaresProblem, Reference]:
    _check_split(N, n, m)
    if mu < 0:
        raise ValueError("mu must be >= 0")

    A, b, planted = _sample_data(N, n, m, seed)
    problem = LeastSquaresProblem(
        A,
        b,
        mu,
        planted=planted,
        provenance={"problem": "least_squares", "N": N, "n": n, "m": m, "mu": mu, "seed": seed},
    )
    logger.info("Generated least squares N=%d n=%d m=%d mu=%g: L=%.6g", N, n, m, mu, problem.L)
    return problem, centralized_reference(problem)


def gen_lasso(
    N: int, n: int, m: int, mu: float, lam: float, seed: int, *, iterations: int = 100_000
) -> tuple[LassoProblem, Reference]:
    _check_split(N, n, m)
    A, b, planted = _sample_data(N, n, m, seed)
    problem = LassoProblem(
        A,
        b,
        mu,
        lam,
        planted=planted,
        provenance={"problem": "lasso", "N": N, "n": n, "m": m, "mu": mu, "lam": lam, "seed": seed},
    )
    logger.info("Generated lasso N=%d n=%d m=%d mu=%g lam=%g: L=%.6g", N, n, m, mu, lam, problem.L)
    return problem, centralized_reference(problem, iterations=iterations)


def gen_hinge_svm(
    N: int, n: int, m: int, seed: int, *, iterations: int = 1_000_000
) -> tuple[HingeSvmProblem, Reference]:
    _check_split(N, n, m)
    A, scores, planted = _sample_data(N, n, m, seed)
    problem = HingeSvmProblem(
        A,
        sign_labels(scores),
        planted=planted,
        provenance={"problem": "hinge", "N": N, "n": n, "m": m, "seed": seed},
    )
    logger.info("Generated hinge SVM N=%d n=%d m=%d: M=%.6g", N, n, m, problem.M)
    return problem, centralized_reference(problem, iterations=iterations)
