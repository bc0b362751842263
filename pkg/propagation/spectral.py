"""
ZoneGraph Spectral Check
Contraction factor r = alpha * ||A+ - eta A-||_2 by power iteration.
"""

from typing import Union

import numpy as np
import scipy.sparse as sp

from common.logs import get_logger

logger = get_logger('propagation.spectral')

# independent of any generator seed so r estimates are reproducible
POWER_SEED = 0x5EED
POWER_STARTS = 3
POWER_STEPS = 200
POWER_TOL = 1e-6


def spectral_norm(
    matrix: Union[np.ndarray, sp.spmatrix],
    starts: int = POWER_STARTS,
    steps: int = POWER_STEPS,
    tol: float = POWER_TOL,
    seed: int = POWER_SEED,
) -> float:
    """Largest singular value estimated by power iteration on M^T M.

    Each start runs until the relative change of ||M v|| drops below tol
    or `steps` is reached; the maximum over starts is returned.

    Args:
        matrix: Dense or sparse square matrix
        starts: Number of random unit starting vectors
        steps: Iterations per start
        tol: Relative stopping tolerance
        seed: Seed of the dedicated random stream

    Returns:
        Estimated ||M||_2 (0.0 for empty or all-zero matrices)
    """
    n = matrix.shape[1]
    if n == 0:
        return 0.0
    if sp.issparse(matrix):
        matrix = sp.csr_matrix(matrix)
        if matrix.nnz == 0:
            return 0.0
    elif not np.any(matrix):
        return 0.0
    transpose = matrix.T.tocsr() if sp.issparse(matrix) else matrix.T

    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(starts):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        sigma = float(np.linalg.norm(matrix @ v))
        for _ in range(steps):
            w = transpose @ (matrix @ v)
            norm = float(np.linalg.norm(w))
            if norm == 0.0:
                break
            v = w / norm
            updated = float(np.linalg.norm(matrix @ v))
            done = abs(updated - sigma) <= tol * max(updated, 1e-300)
            sigma = updated
            if done:
                break
        best = max(best, sigma)
    return best


def contraction_factor(matrices, alpha: float, eta: float, **power_kwargs) -> float:
    """r = alpha * ||M(eta)||_2 for the capped signed matrices.

    Args:
        matrices: SignedMatrices
        alpha: Damping
        eta: Contradiction penalty

    Returns:
        Contraction factor r (0.0 for an empty graph)
    """
    if matrices.n == 0:
        return 0.0
    norm = spectral_norm(matrices.operator(eta), **power_kwargs)
    r = alpha * norm
    logger.debug("contraction factor r=%.6f (alpha=%s, eta=%s, ||M||=%.6f)", r, alpha, eta, norm)
    return r
