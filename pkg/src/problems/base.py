from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Optional

import numpy as np

from decentral_apm.errors import NoCheapProx
from harness.counters import Counters
from network.weights import AgentMatrix


class Problem(ABC):
    """
    Decentralized objective (1/m) sum_i F_i(x) with F_i = f_i + h_i.
    f_i is L-smooth and mu-strongly convex (absent when L = 0), h_i is
    M-Lipschitz (absent when M = 0).
    """

    kind: str = "problem"

    def __init__(self, m: int, n: int, *, L: float, mu: float, M: float, provenance: Optional[dict[str, Any]] = None):
        self.m = int(m)
        self.n = int(n)
        self.L = float(L)
        self.mu = float(mu)
        self.M = float(M)
        self.provenance: dict[str, Any] = dict(provenance or {})

    @property
    def has_smooth(self) -> bool:
        return self.L > 0.0

    @property
    def has_nonsmooth(self) -> bool:
        return self.M > 0.0

    @property
    def has_cheap_prox(self) -> bool:
        return False

    @abstractmethod
    def local_objectives(self, x: AgentMatrix) -> np.ndarray:
        """F_i(x_(i)) for every agent row. Never touches counters."""
        raise NotImplementedError

    def objective(self, v: np.ndarray) -> float:
        """(1/m) sum_i F_i(v) at a single vector v."""
        v = np.asarray(v, dtype=float).reshape(1, self.n)
        return float(np.mean(self.local_objectives(np.repeat(v, self.m, axis=0))))

    def gradient(self, x: AgentMatrix, counters: Optional[Counters] = None) -> AgentMatrix:
        """Rows grad f_i(x_(i)); zero and uncounted when f is absent."""
        self._check_shape(x)
        return np.zeros((self.m, self.n))

    def subgradient(self, x: AgentMatrix, counters: Optional[Counters] = None) -> AgentMatrix:
        """Rows of one subgradient of h_i at x_(i); zero and uncounted when h is absent."""
        self._check_shape(x)
        return np.zeros((self.m, self.n))

    def prox(self, v: AgentMatrix, step: float) -> AgentMatrix:
        """argmin_x h(x) + ||x - v||^2 / (2 step), row-wise."""
        raise NoCheapProx(f"{self.kind} does not declare a closed-form proximal mapping")

    def _check_shape(self, x: AgentMatrix) -> None:
        if np.shape(x) != (self.m, self.n):
            raise ValueError(f"expected an agent matrix of shape {(self.m, self.n)}, got {np.shape(x)}")
