from __future__ import annotations

import math
from typing import Any, Optional

import numpy as np

from harness.counters import Counters
from network.weights import AgentMatrix
from problems.base import Problem


def local_smoothness(A: np.ndarray) -> np.ndarray:
    """lambda_max(A_i A_i^T) per agent, read off the smaller Gram A_i^T A_i."""
    gram = np.einsum("ins,int->ist", A, A)
    return np.linalg.eigvalsh(gram)[:, -1]


class LeastSquaresProblem(Problem):
    """f_i(x) = 1/2 ||A_i^T x - b_i||^2 + mu/2 ||x||^2, h_i = 0."""

    kind = "least_squares"

    def __init__(
        self,
        A: np.ndarray,
        b: np.ndarray,
        mu: float,
        *,
        L: Optional[float] = None,
        planted: Optional[np.ndarray] = None,
        provenance: Optional[dict[str, Any]] = None,
        M: float = 0.0,
    ):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 3 or b.shape != (A.shape[0], A.shape[2]):
            raise ValueError(f"A must be (m, n, s) and b (m, s); got {A.shape} and {b.shape}")
        if mu < 0:
            raise ValueError("mu must be >= 0")

        if L is None:
            L = float(np.max(local_smoothness(A))) + mu
        super().__init__(A.shape[0], A.shape[1], L=L, mu=mu, M=M, provenance=provenance)
        self.A = A
        self.b = b
        self.planted = None if planted is None else np.asarray(planted, dtype=float)

    @property
    def has_cheap_prox(self) -> bool:
        return True

    def residuals(self, x: AgentMatrix) -> np.ndarray:
        return np.einsum("ins,in->is", self.A, x) - self.b

    def local_objectives(self, x: AgentMatrix) -> np.ndarray:
        self._check_shape(x)
        r = self.residuals(x)
        return 0.5 * np.sum(r * r, axis=1) + 0.5 * self.mu * np.sum(x * x, axis=1)

    def gradient(self, x: AgentMatrix, counters: Optional[Counters] = None) -> AgentMatrix:
        self._check_shape(x)
        g = np.einsum("ins,is->in", self.A, self.residuals(x)) + self.mu * x
        if counters is not None:
            counters.add_grad_evals(1)
        return g

    def prox(self, v: AgentMatrix, step: float) -> AgentMatrix:
        # h = 0
        return np.array(v, dtype=float, copy=True)

    def normal_equations(self) -> tuple[np.ndarray, np.ndarray]:
        """(sum_i A_i A_i^T + m mu I, sum_i A_i b_i)."""
        H = np.einsum("kis,kjs->ij", self.A, self.A) + self.m * self.mu * np.eye(self.n)
        rhs = np.einsum("kis,ks->i", self.A, self.b)
        return H, rhs


class LassoProblem(LeastSquaresProblem):
    """Least squares plus h_i(x) = lam ||x||_1 on every agent."""

    kind = "lasso"

    def __init__(self, A: np.ndarray, b: np.ndarray, mu: float, lam: float, **kwargs: Any):
        if lam <= 0:
            raise ValueError("lam must be > 0")
        n = np.shape(A)[1]
        super().__init__(A, b, mu, M=lam * math.sqrt(n), **kwargs)
        self.lam = float(lam)

    def local_objectives(self, x: AgentMatrix) -> np.ndarray:
        return super().local_objectives(x) + self.lam * np.sum(np.abs(x), axis=1)

    def subgradient(self, x: AgentMatrix, counters: Optional[Counters] = None) -> AgentMatrix:
        self._check_shape(x)
        if counters is not None:
            counters.add_subgrad_evals(1)
        return self.lam * np.sign(x)

    def prox(self, v: AgentMatrix, step: float) -> AgentMatrix:
        v = np.asarray(v, dtype=float)
        return soft_threshold(v, self.lam * step)


def soft_threshold(v: np.ndarray, tau: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def smooth_gradient(problem: LeastSquaresProblem, x: AgentMatrix, counters: Optional[Counters] = None) -> AgentMatrix:
    """Row i: A_i (A_i^T x_(i) - b_i) + mu x_(i). One gradient evaluation."""
    return problem.gradient(x, counters)
