"""
ZoneGraph Propagation Module

Priors, contraction-factor estimation and the clamped fixed-point solver.
"""

from .prior import (
    PriorMode,
    build_prior,
    credibility_prior,
    structure_prior,
)

from .spectral import (
    POWER_SEED,
    spectral_norm,
    contraction_factor,
)

from .solver import (
    PropagationParams,
    ConfidenceState,
    propagate,
    propagate_graph,
)

__all__ = [
    'PriorMode',
    'build_prior',
    'credibility_prior',
    'structure_prior',
    'POWER_SEED',
    'spectral_norm',
    'contraction_factor',
    'PropagationParams',
    'ConfidenceState',
    'propagate',
    'propagate_graph',
]
