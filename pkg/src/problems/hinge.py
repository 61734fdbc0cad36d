from __future__ import annotations

from typing import Any, Optional

import numpy as np

from harness.counters import Counters
from network.weights import AgentMatrix
from problems.base import Problem


def sign_labels(scores: np.ndarray) -> np.ndarray:
    """Sign with the tie-break sign(0) = +1."""
    return np.where(scores >= 0.0, 1.0, -1.0)


class HingeSvmProblem(Problem):
    """
    h_i(x) = sum_j max(0, 1 - b_ij a_ij^T x) over agent i's local samples,
    f_i = 0. M is the sum of the local sample norms (worst agent).
    """

    kind = "hinge"

    def __init__(
        self,
        A: np.ndarray,
        labels: np.ndarray,
        *,
        M: Optional[float] = None,
        planted: Optional[np.ndarray] = None,
        provenance: Optional[dict[str, Any]] = None,
    ):
        A = np.asarray(A, dtype=float)
        labels = np.asarray(labels, dtype=float)
        if A.ndim != 3 or labels.shape != (A.shape[0], A.shape[2]):
            raise ValueError(f"A must be (m, n, s) and labels (m, s); got {A.shape} and {labels.shape}")
        if not np.all(np.abs(labels) == 1.0):
            raise ValueError("labels must be +1 or -1")

        if M is None:
            M = float(np.max(np.sum(np.linalg.norm(A, axis=1), axis=1)))
        super().__init__(A.shape[0], A.shape[1], L=0.0, mu=0.0, M=M, provenance=provenance)
        self.A = A
        self.labels = labels
        self.planted = None if planted is None else np.asarray(planted, dtype=float)

    def margins(self, x: AgentMatrix) -> np.ndarray:
        return self.labels * np.einsum("ins,in->is", self.A, x)

    def local_objectives(self, x: AgentMatrix) -> np.ndarray:
        self._check_shape(x)
        return np.sum(np.maximum(0.0, 1.0 - self.margins(x)), axis=1)

    def subgradient(self, x: AgentMatrix, counters: Optional[Counters] = None) -> AgentMatrix:
        self._check_shape(x)
        # a sample at the kink (margin exactly 1) contributes 0
        active = (self.margins(x) < 1.0).astype(float)
        g = -np.einsum("ins,is->in", self.A, self.labels * active)
        if counters is not None:
            counters.add_subgrad_evals(1)
        return g

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        """All samples as one (n, N) matrix and the matching label vector."""
        A_full = self.A.transpose(1, 0, 2).reshape(self.n, -1)
        return A_full, self.labels.reshape(-1)


def hinge_subgradient(problem: HingeSvmProblem, x: AgentMatrix, counters: Optional[Counters] = None) -> AgentMatrix:
    """Row i: sum over active samples of -b_ij a_ij. One subgradient evaluation."""
    return problem.subgradient(x, counters)
