from network.graph import Network, build_erdos_renyi
from network.weights import (
    AgentMatrix,
    WeightMatrix,
    average,
    disagreement,
    lazy_metropolis_weights,
    metropolis_weights,
    spectral_gap,
    u_quadratic_norm,
)

__all__ = [
    "AgentMatrix",
    "Network",
    "WeightMatrix",
    "average",
    "build_erdos_renyi",
    "disagreement",
    "lazy_metropolis_weights",
    "metropolis_weights",
    "spectral_gap",
    "u_quadratic_norm",
]
