"""
ZoneGraph Signed Projection
Undirected majority-sign view of a node subset.

For each unordered pair {u, v} in the kept set the positive weights of both
directions are summed into w_pos and the negative ones into w_neg. The pair is
an edge iff w_pos + w_neg > 0, with sign +1 iff w_pos >= w_neg.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


@dataclass(frozen=True, eq=False)
class SignedProjection:
    """Undirected signed graph over `vertices` (sorted global node ids).

    All matrices are symmetric CSR over local positions 0..m-1.
    """
    vertices: np.ndarray
    sign: sp.csr_matrix
    w_pos: sp.csr_matrix
    w_neg: sp.csr_matrix

    @property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def position(self) -> Dict[int, int]:
        return {int(v): i for i, v in enumerate(self.vertices)}

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        """Sum of w_pos + w_neg over incident projected edges, per local position."""
        total = self.w_pos + self.w_neg
        return np.asarray(total.sum(axis=1)).ravel()

    def edge_count(self) -> int:
        return int(self.sign.nnz // 2)

    def edge_sign(self, u: int, v: int) -> int:
        """Sign of edge {u, v} by global id, 0 when absent."""
        pu, pv = self.position[u], self.position[v]
        return int(self.sign[pu, pv])

    def neighbors(self, u: int) -> List[int]:
        pu = self.position[u]
        row = self.sign.indices[self.sign.indptr[pu]:self.sign.indptr[pu + 1]]
        return sorted(int(self.vertices[i]) for i in row)

    def edges(self) -> Iterator[Tuple[int, int, int, float, float]]:
        """Yield (u, v, sign, w_pos, w_neg) once per edge with u < v (global ids)."""
        upper = sp.triu(self.sign, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        for k in order:
            i, j = int(upper.row[k]), int(upper.col[k])
            yield (int(self.vertices[i]), int(self.vertices[j]), int(upper.data[k]),
                   float(self.w_pos[i, j]), float(self.w_neg[i, j]))

    def induced(self, members: Iterable[int]) -> 'SignedProjection':
        """Projection restricted to a subset of its vertices."""
        keep = np.array(sorted(self.position[int(v)] for v in members), dtype=np.int64)
        return SignedProjection(
            vertices=self.vertices[keep],
            sign=self.sign[keep][:, keep].tocsr(),
            w_pos=self.w_pos[keep][:, keep].tocsr(),
            w_neg=self.w_neg[keep][:, keep].tocsr(),
        )

    def components(self) -> List[np.ndarray]:
        """Connected components as sorted arrays of global ids, ordered by smallest member."""
        if self.size == 0:
            return []
        count, labels = csgraph.connected_components(self.sign, directed=False)
        groups = [self.vertices[labels == c] for c in range(count)]
        groups.sort(key=lambda g: int(g[0]))
        return groups

    def to_networkx(self) -> nx.Graph:
        """networkx view with sign / w_pos / w_neg edge attributes."""
        graph = nx.Graph()
        graph.add_nodes_from(int(v) for v in self.vertices)
        for u, v, s, wp, wn in self.edges():
            graph.add_edge(u, v, sign=s, w_pos=wp, w_neg=wn)
        return graph


def signed_projection(graph, keep: Optional[Iterable[int]] = None) -> SignedProjection:
    """Build the majority-sign projection of `graph` restricted to `keep`.

    Args:
        graph: BeliefGraph (its unnormalized aggregated matrices are used)
        keep: Node ids to keep (all nodes when None)

    Returns:
        SignedProjection
    """
    matrices = graph.matrices
    if keep is None:
        vertices = np.arange(graph.n, dtype=np.int64)
    else:
        vertices = np.array(sorted({int(v) for v in keep}), dtype=np.int64)
        if len(vertices) and (vertices[0] < 0 or vertices[-1] >= graph.n):
            raise ValueError("keep must be a subset of the graph's nodes")

    supp = matrices.supp[vertices][:, vertices]
    contr = matrices.contr[vertices][:, vertices]
    w_pos = (supp + supp.T).tocsr()
    w_neg = (contr + contr.T).tocsr()

    total = (w_pos + w_neg).tocoo()
    present = total.data > 0
    rows, cols = total.row[present], total.col[present]
    m = len(vertices)
    if len(rows):
        margin = np.asarray((w_pos - w_neg)[rows, cols]).ravel()
        values = np.where(margin >= 0, 1.0, -1.0)
    else:
        values = np.zeros(0)
    sign = sp.csr_matrix((values, (rows, cols)), shape=(m, m), dtype=np.float64)

    # keep weight matrices on the same sparsity pattern as `sign`
    pattern = sign.copy()
    pattern.data = np.ones_like(pattern.data)
    return SignedProjection(
        vertices=vertices,
        sign=sign,
        w_pos=w_pos.multiply(pattern).tocsr(),
        w_neg=w_neg.multiply(pattern).tocsr(),
    )
