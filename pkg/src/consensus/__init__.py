from consensus.accelerated import (
    ConsensusParams,
    accelerated_consensus,
    contraction_factor,
    extrapolation_coefficient,
    required_inner_iters,
)

__all__ = [
    "ConsensusParams",
    "accelerated_consensus",
    "contraction_factor",
    "extrapolation_coefficient",
    "required_inner_iters",
]
