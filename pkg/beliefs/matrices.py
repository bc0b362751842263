"""
ZoneGraph Signed Matrices
Aggregation by sign and per-sign row capping.

supp[u, v] sums the weights of positive edges u->v, contr[u, v] the weights
of negative ones; sign-0 edges feed neither. Each matrix is then divided
row-wise by max(1, row sum), so capped rows sum to at most 1 and rows that
already sum to <= 1 are left bit-identical.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse as sp

Matrix = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class SignedMatrices:
    """Raw and row-capped support/contradiction matrices (CSR, n x n)."""
    supp: sp.csr_matrix
    contr: sp.csr_matrix
    supp_norm: sp.csr_matrix
    contr_norm: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.supp.shape[0]

    def operator(self, eta: float) -> sp.csr_matrix:
        """M(eta) = A_hat_plus - eta * A_hat_minus."""
        return (self.supp_norm - eta * self.contr_norm).tocsr()


def row_normalize(raw: Matrix) -> Matrix:
    """Divide each row by max(1, row sum).

    Args:
        raw: Nonnegative dense array or sparse matrix

    Returns:
        Same kind as the input (CSR for sparse inputs)
    """
    if sp.issparse(raw):
        csr = sp.csr_matrix(raw, dtype=np.float64, copy=True)
        sums = np.asarray(csr.sum(axis=1)).ravel()
        scale = 1.0 / np.maximum(1.0, sums)
        # repeat each row's scale over its stored entries
        counts = np.diff(csr.indptr)
        csr.data = csr.data * np.repeat(scale, counts)
        return csr
    dense = np.asarray(raw, dtype=np.float64)
    if dense.ndim == 1:
        return dense / max(1.0, float(dense.sum()))
    sums = dense.sum(axis=1, keepdims=True)
    return dense / np.maximum(1.0, sums)


def _aggregate(n: int, src: np.ndarray, dst: np.ndarray, weight: np.ndarray) -> sp.csr_matrix:
    if len(src) == 0:
        return sp.csr_matrix((n, n), dtype=np.float64)
    # canonical order so parallel edges are summed identically however the
    # edge list was shuffled
    order = np.lexsort((weight, dst, src))
    src, dst, weight = src[order], dst[order], weight[order]
    pair = src.astype(np.int64) * max(n, 1) + dst
    starts = np.flatnonzero(np.r_[True, pair[1:] != pair[:-1]])
    summed = np.add.reduceat(weight, starts)
    return sp.csr_matrix((summed, (src[starts], dst[starts])), shape=(n, n), dtype=np.float64)


def build_signed_matrices(graph) -> SignedMatrices:
    """Aggregate a belief graph by sign and cap its rows.

    Args:
        graph: BeliefGraph

    Returns:
        SignedMatrices (0x0 for an empty graph)
    """
    n = graph.n
    signs = np.array([edge.sign for edge in graph.edges], dtype=np.int64)
    src = np.array([edge.src for edge in graph.edges], dtype=np.int64)
    dst = np.array([edge.dst for edge in graph.edges], dtype=np.int64)
    weight = np.array([edge.weight for edge in graph.edges], dtype=np.float64)

    pos = signs > 0
    neg = signs < 0
    supp = _aggregate(n, src[pos], dst[pos], weight[pos])
    contr = _aggregate(n, src[neg], dst[neg], weight[neg])
    return from_raw(supp, contr)


def from_raw(supp: Matrix, contr: Matrix) -> SignedMatrices:
    """Wrap raw aggregated matrices, computing their capped variants."""
    supp = sp.csr_matrix(supp, dtype=np.float64)
    contr = sp.csr_matrix(contr, dtype=np.float64)
    return SignedMatrices(
        supp=supp,
        contr=contr,
        supp_norm=row_normalize(supp),
        contr_norm=row_normalize(contr),
    )
