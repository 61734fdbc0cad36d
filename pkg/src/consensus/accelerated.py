from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from decentral_apm.errors import InvalidGap
from harness.counters import Counters
from network.weights import AgentMatrix, WeightMatrix


def extrapolation_coefficient(sigma2: float) -> float:
    """eta = (1 - sqrt(1 - sigma2^2)) / (1 + sqrt(1 - sigma2^2))."""
    root = math.sqrt(max(0.0, 1.0 - sigma2 * sigma2))
    return (1.0 - root) / (1.0 + root)


def contraction_factor(sigma2: float) -> float:
    """Per-iteration contraction of the disagreement: sigma2 / (1 + sqrt(1 - sigma2^2))."""
    return sigma2 / (1.0 + math.sqrt(max(0.0, 1.0 - sigma2 * sigma2)))


def disagreement_envelope(sigma2: float, T: int) -> float:
    """
    Bound on ||Pi z^T|| / ||Pi z|| after T rounds for a PSD W.

    With z^{-1} = z the slowest direction (eigenvalue sigma2) hits the double
    root rho and decays as rho^T (1 + (1 - rho) T), so rho^T alone does not
    bound it. Directions with smaller eigenvalues oscillate inside
    rho^T (1 + max((1 - rho) T, rho)).
    """
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    rho = contraction_factor(sigma2)
    return rho**T * (1.0 + max((1.0 - rho) * T, rho))


@dataclass(frozen=True)
class ConsensusParams:
    W: WeightMatrix
    eta: float

    @classmethod
    def for_weights(cls, W: WeightMatrix) -> "ConsensusParams":
        return cls(W=W, eta=extrapolation_coefficient(W.sigma2))


def accelerated_consensus(
    params: ConsensusParams,
    z: AgentMatrix,
    T: int,
    counters: Optional[Counters] = None,
) -> AgentMatrix:
    """
    T rounds of z^{t+1} = (1 + eta) W z^t - eta z^{t-1}, started from
    z^0 = z^{-1} = z. Each round is one communication.
    """
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")

    current = np.array(z, dtype=float, copy=True)
    previous = current
    eta = params.eta
    for _ in range(T):
        current, previous = (1.0 + eta) * params.W.mix(current) - eta * previous, current

    if counters is not None and T:
        counters.add_communications(T)
    return current


def required_inner_iters(
    beta0: float,
    theta_pen: float,
    eps_k: float,
    pi_norm_sq: float,
    sigma2: float,
) -> int:
    """
    Inner consensus rounds that bring ||z^{k,T} - 1 alpha(z^k)^T||^2 under
    2 vartheta_k eps_k / beta0:

        T_k = log(beta0 ||Pi z^k||^2 / (2 vartheta_k eps_k)) / (-2 log(1 - sqrt(1 - sigma2)))

    rounded up and clamped below at zero.
    """
    if beta0 <= 0 or theta_pen <= 0 or eps_k <= 0:
        raise ValueError("beta0, theta_pen and eps_k must be positive")
    if sigma2 >= 1.0:
        raise InvalidGap(f"sigma2 must be < 1, got {sigma2}")
    if sigma2 < 0.0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")

    ratio = beta0 * pi_norm_sq / (2.0 * theta_pen * eps_k)
    if ratio <= 1.0:
        return 0
    rate = 1.0 - math.sqrt(1.0 - sigma2)
    if rate <= 0.0:
        # sigma2 = 0: the denominator is +inf
        return 0
    value = math.log(ratio) / (-2.0 * math.log(rate))
    return max(0, math.ceil(value))
