"""
ZoneGraph Propagation Solver
Clipped damped fixed point of the signed operator with authority clamping.

    x <- clip((1 - alpha) b + alpha M^T x, 0, 1),  M = A+ - eta A-

An edge u->v carries influence from u to v, so node v reads its in-edges
(row u of M holds u's capped out-weights). Authority entries are
overwritten after clipping on every step and in the starting vector.
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from common.errors import ConfigError
from common.logs import get_logger

from .prior import PriorMode, build_prior
from .spectral import contraction_factor

logger = get_logger('propagation')


@dataclass(frozen=True)
class PropagationParams:
    """Operator and stopping parameters."""
    alpha: float = 0.6
    eta: float = 1.0
    eps: float = 1e-6
    t_max: int = 2000
    prior_mode: str = PriorMode.STRUCTURE.value
    lam: float = 1.0
    b0: Union[float, Sequence[float]] = 0.5

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0,1), got {self.alpha}")
        if self.eta < 0.0:
            raise ConfigError(f"eta must be >= 0, got {self.eta}")
        if self.eps <= 0.0:
            raise ConfigError(f"eps must be > 0, got {self.eps}")
        if int(self.t_max) < 1:
            raise ConfigError(f"t_max must be >= 1, got {self.t_max}")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"lam must be in [0,1], got {self.lam}")
        baseline = np.asarray(self.b0, dtype=np.float64)
        if np.any(baseline < 0.0) or np.any(baseline > 1.0):
            raise ConfigError("b0 entries must be in [0,1]")
        try:
            PriorMode(self.prior_mode)
        except ValueError:
            raise ConfigError(f"unknown prior_mode '{self.prior_mode}'") from None


@dataclass
class ConfidenceState:
    """Result of a propagation run."""
    phi: np.ndarray
    iterations: int
    contraction_factor: float
    converged: bool
    residual: float = 0.0
    prior: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.phi)


def _clamp_arrays(authority: Optional[Mapping[int, float]]):
    if not authority:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64)
    ids = np.array(sorted(authority), dtype=np.int64)
    values = np.array([authority[i] for i in ids], dtype=np.float64)
    return ids, values


def propagate(
    b: np.ndarray,
    matrices,
    params: PropagationParams,
    authority: Optional[Mapping[int, float]] = None,
    x0: Optional[np.ndarray] = None,
    r: Optional[float] = None,
) -> ConfidenceState:
    """Iterate the clamped operator until the sup-norm step is <= eps.

    Args:
        b: Prior vector in [0,1]^n
        matrices: SignedMatrices
        params: PropagationParams
        authority: Map node id -> clamped confidence
        x0: Starting vector (defaults to b; used for warm starts)
        r: Precomputed contraction factor (estimated when None)

    Returns:
        ConfidenceState; non-convergence is reported, not raised
    """
    b = np.asarray(b, dtype=np.float64)
    n = matrices.n
    if b.shape != (n,):
        raise ValueError(f"prior has shape {b.shape}, expected ({n},)")
    if r is None:
        r = contraction_factor(matrices, params.alpha, params.eta)
    if n == 0:
        return ConfidenceState(np.zeros(0), 0, r, True, 0.0, b)

    transposed = matrices.operator(params.eta).T.tocsr()
    fixed_ids, fixed_values = _clamp_arrays(authority)
    base = (1.0 - params.alpha) * b

    x = np.array(b if x0 is None else x0, dtype=np.float64)
    if x.shape != (n,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({n},)")
    x[fixed_ids] = fixed_values

    converged = False
    delta = 0.0
    t = 0
    for t in range(1, int(params.t_max) + 1):
        nxt = base + params.alpha * (transposed @ x)
        np.clip(nxt, 0.0, 1.0, out=nxt)
        nxt[fixed_ids] = fixed_values
        delta = float(np.max(np.abs(nxt - x)))
        x = nxt
        if delta <= params.eps:
            converged = True
            break

    if converged:
        logger.debug("converged in %d iterations (r=%.4f)", t, r)
    else:
        logger.warning("no convergence after %d iterations (last step %.3e, r=%.4f)", t, delta, r)
    return ConfidenceState(phi=x, iterations=t, contraction_factor=r,
                           converged=converged, residual=delta, prior=b)


def propagate_graph(
    graph,
    params: PropagationParams,
    x0: Optional[np.ndarray] = None,
    r: Optional[float] = None,
) -> ConfidenceState:
    """Build the prior from the graph and propagate with its authority nodes."""
    matrices = graph.matrices
    b = build_prior(graph, params, matrices)
    return propagate(b, matrices, params, graph.authority_map(), x0=x0, r=r)
