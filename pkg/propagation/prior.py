"""
ZoneGraph Priors
Base vector b for the propagation operator.

- credibility: b = lam * psi / max(psi) + (1 - lam) * b0
- structure: b_i = row sum of the capped support matrix (outgoing positive mass)
"""

from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from common.errors import DegeneratePriorError


class PriorMode(Enum):
    """Where the base vector comes from."""
    CREDIBILITY = "credibility"
    STRUCTURE = "structure"


Baseline = Union[float, Sequence[float], np.ndarray]


def credibility_prior(psi: np.ndarray, lam: float = 1.0, b0: Baseline = 0.5) -> np.ndarray:
    """Max-normalized credibility mixed with a neutral baseline.

    Args:
        psi: Credibility vector
        lam: Weight of credibility in [0, 1]
        b0: Scalar or per-node baseline in [0, 1]

    Returns:
        b in [0, 1]^n

    Raises:
        DegeneratePriorError: If psi is all zero
    """
    psi = np.asarray(psi, dtype=np.float64)
    if psi.size == 0:
        return psi.copy()
    top = float(np.max(np.abs(psi)))
    if top <= 0.0:
        raise DegeneratePriorError("credibility prior needs at least one nonzero credibility")
    baseline = np.broadcast_to(np.asarray(b0, dtype=np.float64), psi.shape)
    b = lam * (psi / top) + (1.0 - lam) * baseline
    return np.clip(b, 0.0, 1.0)


def structure_prior(matrices) -> np.ndarray:
    """Outgoing positive mass per node, already in [0, 1] through the row cap."""
    sums = np.asarray(matrices.supp_norm.sum(axis=1)).ravel()
    return np.clip(sums, 0.0, 1.0)


def build_prior(graph, params, matrices: Optional[object] = None) -> np.ndarray:
    """Build b for a graph according to params.prior_mode.

    Args:
        graph: BeliefGraph
        params: PropagationParams
        matrices: SignedMatrices (defaults to graph.matrices)

    Returns:
        Prior vector b
    """
    mode = PriorMode(params.prior_mode)
    if mode is PriorMode.STRUCTURE:
        return structure_prior(matrices if matrices is not None else graph.matrices)
    return credibility_prior(graph.psi, params.lam, params.b0)
