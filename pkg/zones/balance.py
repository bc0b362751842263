"""
ZoneGraph Balance
Parity 2-coloring of signed projections with explicit conflict cycles.

A component is balanced iff it admits a coloring that keeps positive edges
inside a color class and puts negative edges across. The coloring is built
along a BFS tree; the first non-tree edge that disagrees with it closes a
cycle through the lowest common ancestor, and that cycle has sign product -1.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


@dataclass(frozen=True)
class ConflictCertificate:
    """Closed walk u -> ... -> v with the closing edge v -> u (global ids)."""
    cycle: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cycle)


@dataclass(frozen=True)
class BalanceResult:
    """Either a coloring (balanced) or a conflict certificate."""
    coloring: Optional[Dict[int, int]] = None
    certificate: Optional[ConflictCertificate] = None

    @property
    def balanced(self) -> bool:
        return self.certificate is None


def _tree_cycle(u: int, v: int, preds: np.ndarray) -> List[int]:
    ancestors = [u]
    while preds[ancestors[-1]] >= 0:
        ancestors.append(int(preds[ancestors[-1]]))
    depth = {node: i for i, node in enumerate(ancestors)}
    chain = []
    x = v
    while x not in depth:
        chain.append(x)
        x = int(preds[x])
    return ancestors[:depth[x] + 1] + chain[::-1]


def two_color(sign: sp.csr_matrix) -> Tuple[np.ndarray, Optional[List[int]]]:
    """Color a local signed CSR, stopping at the first conflicting component.

    Args:
        sign: Symmetric m x m matrix with entries in {-1, +1}

    Returns:
        (colors, cycle): colors in {0, 1} (-1 where not reached), and a
        local-index cycle when some component is unbalanced, else None
    """
    m = sign.shape[0]
    colors = np.full(m, -1, dtype=np.int8)
    if m == 0:
        return colors, None
    pattern = abs(sign).tocsr()
    upper = sp.triu(sign, k=1).tocoo()
    upper_neg = (upper.data < 0).astype(np.int8)

    for root in range(m):
        if colors[root] >= 0:
            continue
        order, preds = csgraph.breadth_first_order(
            pattern, root, directed=False, return_predecessors=True)
        colors[root] = 0
        if len(order) > 1:
            children = order[1:]
            parents = preds[children]
            tree_neg = np.asarray(sign[parents, children]).ravel() < 0
            for child, parent, neg in zip(children.tolist(), parents.tolist(), tree_neg.tolist()):
                colors[child] = colors[parent] ^ int(neg)

        position = np.full(m, -1, dtype=np.int64)
        position[order] = np.arange(len(order))
        inside = (position[upper.row] >= 0) & (position[upper.col] >= 0)
        parity = colors[upper.row] ^ colors[upper.col]
        violated = np.flatnonzero(inside & (parity != upper_neg))
        if len(violated):
            rows, cols = upper.row[violated], upper.col[violated]
            late = np.maximum(position[rows], position[cols])
            early = np.minimum(position[rows], position[cols])
            pick = violated[np.lexsort((early, late))[0]]
            u, v = int(upper.row[pick]), int(upper.col[pick])
            return colors, _tree_cycle(u, v, preds)
    return colors, None


def balance_test(projection) -> BalanceResult:
    """Harary test for a signed projection (normally one connected component).

    Args:
        projection: SignedProjection

    Returns:
        BalanceResult with a global-id coloring or a conflict certificate
    """
    colors, cycle = two_color(projection.sign)
    vertices = projection.vertices
    if cycle is not None:
        return BalanceResult(certificate=ConflictCertificate(tuple(int(vertices[i]) for i in cycle)))
    return BalanceResult(coloring={int(v): int(c) for v, c in zip(vertices, colors)})


def certificate_sign(projection, cycle: Sequence[int]) -> int:
    """Product of edge signs around a closed cycle of global ids.

    Raises:
        ValueError: If two consecutive nodes are not adjacent
    """
    product = 1
    for i, u in enumerate(cycle):
        v = cycle[(i + 1) % len(cycle)]
        s = projection.edge_sign(int(u), int(v))
        if s == 0:
            raise ValueError(f"{u} and {v} are not adjacent in the projection")
        product *= s
    return product


def coloring_is_valid(projection, coloring: Dict[int, int]) -> bool:
    """Check that a coloring respects every projected edge sign."""
    for u, v, s, _, _ in projection.edges():
        same = coloring[u] == coloring[v]
        if same != (s > 0):
            return False
    return True
