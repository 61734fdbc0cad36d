from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Literal, Optional

from consensus.accelerated import required_inner_iters
from network.weights import WeightMatrix
from problems.base import Problem

logger = logging.getLogger(__name__)

# absorbs round-off such as 300 * 0.04 = 12.000000000000002
_CEIL_SLACK = 1e-9


def ceil_count(value: float, floor: int = 1) -> int:
    return max(floor, math.ceil(value - _CEIL_SLACK))


def next_theta_nsc(theta_prev: float) -> float:
    """Positive root of theta^2 + theta_prev^2 theta - theta_prev^2 = 0."""
    if not 0.0 < theta_prev <= 1.0:
        raise ValueError(f"theta_prev must lie in (0, 1], got {theta_prev}")
    return theta_prev * (math.sqrt(theta_prev * theta_prev + 4.0) - theta_prev) / 2.0


class ApmcSchedule(ABC):
    """Outer-loop parameters of the smooth method: theta_k, vartheta_k and T_k."""

    name: str
    beta0: float
    inner_divisor: float
    theory_mode: bool
    mu: float

    @abstractmethod
    def theta(self, k: int) -> float: ...

    @abstractmethod
    def vartheta(self, k: int) -> float: ...

    @abstractmethod
    def tuned_inner_iters(self, k: int, gap: float) -> int: ...

    @abstractmethod
    def eps(self, k: int) -> float: ...

    def penalty(self, k: int) -> float:
        return self.beta0 / self.vartheta(k)

    def extrapolation(self, k: int, L: float) -> float:
        """((L theta_k - mu) / (L - mu)) ((1 - theta_{k-1}) / theta_{k-1}); zero at k = 0 and when L = mu."""
        if k == 0:
            return 0.0
        if L - self.mu <= 0.0:
            return 0.0
        prev = self.theta(k - 1)
        return (L * self.theta(k) - self.mu) / (L - self.mu) * (1.0 - prev) / prev

    def inner_iters(self, k: int, W: WeightMatrix, pi_norm_sq: Optional[float] = None) -> int:
        if not self.theory_mode:
            return self.tuned_inner_iters(k, W.gap)
        if pi_norm_sq is None:
            raise ValueError("theory mode needs ||Pi z^k||^2")
        eps_k = max(self.eps(k), 1e-300)
        return required_inner_iters(self.beta0, self.vartheta(k), eps_k, pi_norm_sq, W.sigma2)


@dataclass(frozen=True)
class ApmcScheduleSC(ApmcSchedule):
    """theta_k = sqrt(mu / L), vartheta_k = (1 - theta)^(k + 1)."""

    theta_value: float
    beta0: float = 100.0
    inner_divisor: float = 3.0
    theory_mode: bool = False
    tau: float = 0.5
    mu: float = 0.0
    name: str = "sc"

    def __post_init__(self) -> None:
        if not 0.0 < self.theta_value <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta_value}")
        if self.beta0 <= 0:
            raise ValueError("beta0 must be > 0")
        if self.inner_divisor <= 0:
            raise ValueError("inner_divisor must be > 0")

    @classmethod
    def for_problem(cls, problem: Problem, **kwargs) -> "ApmcScheduleSC":
        if problem.mu <= 0:
            raise ValueError("the strongly convex schedule needs mu > 0")
        if problem.L <= problem.mu:
            logger.warning("L = mu = %g: extrapolation disabled", problem.L)
        return cls(theta_value=math.sqrt(problem.mu / problem.L), mu=problem.mu, **kwargs)

    def theta(self, k: int) -> float:
        return self.theta_value

    def vartheta(self, k: int) -> float:
        return (1.0 - self.theta_value) ** (k + 1)

    def tuned_inner_iters(self, k: int, gap: float) -> int:
        return ceil_count(k * self.theta_value / (self.inner_divisor * math.sqrt(gap)))

    def eps(self, k: int) -> float:
        base = max(1.0 - (1.0 + self.tau) * self.theta_value, 0.0)
        return base ** (k + 1)


@dataclass(frozen=True)
class ApmcScheduleNSC(ApmcSchedule):
    """theta_0 = 1, (1 - theta_k) / theta_k^2 = 1 / theta_{k-1}^2, vartheta_k = theta_k^2."""

    beta0: float = 100.0
    inner_divisor: float = 5.0
    theory_mode: bool = False
    mu: float = 0.0
    name: str = "nsc"
    _thetas: list[float] = field(default_factory=lambda: [1.0], repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.beta0 <= 0:
            raise ValueError("beta0 must be > 0")
        if self.inner_divisor <= 0:
            raise ValueError("inner_divisor must be > 0")

    def theta(self, k: int) -> float:
        while len(self._thetas) <= k:
            self._thetas.append(next_theta_nsc(self._thetas[-1]))
        return self._thetas[k]

    def vartheta(self, k: int) -> float:
        return self.theta(k) ** 2

    def tuned_inner_iters(self, k: int, gap: float) -> int:
        return ceil_count(math.log(k + 1) / (self.inner_divisor * math.sqrt(gap)))

    def eps(self, k: int) -> float:
        return 1.0 / (k + 1) ** 6


@dataclass(frozen=True)
class ApmSchedule:
    """
    Nonsmooth schedule: theta_k = vartheta_k = 1 / (k + 1).

    fixed    T_k = ceil(K gap),          eta_k = eta_scale theta_k / (K sqrt(gap))
    adaptive T_k = ceil(gap / theta_k),  eta_k = eta_scale theta_k^2 / sqrt(gap)

    eta_scale = 1/M gives the theoretical step; beta0 defaults to max(M, L)/sqrt(gap).
    """

    mode: Literal["fixed", "adaptive"]
    K: int
    beta0: float
    eta_scale: float
    gap: float

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError(f"unknown APM mode {self.mode!r}")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.beta0 <= 0 or self.eta_scale <= 0:
            raise ValueError("beta0 and eta_scale must be > 0")
        if not 0.0 < self.gap <= 1.0:
            raise ValueError(f"gap must lie in (0, 1], got {self.gap}")

    @property
    def name(self) -> str:
        return "thm3" if self.mode == "fixed" else "cor1"

    @classmethod
    def theoretical(cls, problem: Problem, W: WeightMatrix, mode: str, K: int) -> "ApmSchedule":
        scale = max(problem.M, problem.L)
        return cls(
            mode=mode,
            K=K,
            beta0=scale / math.sqrt(W.gap),
            eta_scale=1.0 / scale,
            gap=W.gap,
        )

    @classmethod
    def tuned(
        cls,
        W: WeightMatrix,
        mode: str,
        K: int,
        *,
        beta0_scale: float = 0.01,
        eta_scale: float = 5000.0,
    ) -> "ApmSchedule":
        return cls(mode=mode, K=K, beta0=beta0_scale / math.sqrt(W.gap), eta_scale=eta_scale, gap=W.gap)

    def theta(self, k: int) -> float:
        return 1.0 / (k + 1)

    def vartheta(self, k: int) -> float:
        return self.theta(k)

    def penalty(self, k: int) -> float:
        return self.beta0 / self.vartheta(k)

    def extrapolation(self, k: int) -> float:
        """theta_k (1 - theta_{k-1}) / theta_{k-1} = (k - 1) / (k + 1)."""
        if k == 0:
            return 0.0
        prev = self.theta(k - 1)
        return self.theta(k) * (1.0 - prev) / prev

    def inner_iters(self, k: int) -> int:
        if self.mode == "fixed":
            return ceil_count(self.K * self.gap)
        return ceil_count(self.gap / self.theta(k))

    def eta(self, k: int) -> float:
        root_gap = math.sqrt(self.gap)
        if self.mode == "fixed":
            return self.eta_scale * self.theta(k) / (self.K * root_gap)
        return self.eta_scale * self.theta(k) ** 2 / root_gap
