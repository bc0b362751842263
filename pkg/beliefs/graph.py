"""
ZoneGraph Belief Graph
Nodes with credibility and optional authority, directed typed signed edges.

The graph is immutable once built: every edit produces a new graph, so a
graph can be shared read-only across worker processes. Node ids are dense
0..n-1; the original string ids live in `labels`.
"""

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from common.errors import GraphValidationError

VALID_SIGNS = (-1, 0, 1)

SUPPORT_TYPE = 'supports'
CONTRADICTION_TYPE = 'contradicts'

EdgeKey = Tuple[int, int, str]


@dataclass(frozen=True)
class BeliefNode:
    """A claim with external credibility and optional authority value."""
    id: int
    psi: float
    authority: Optional[float] = None

    def __post_init__(self):
        if not _in_unit(self.psi):
            raise GraphValidationError(f"node {self.id}: credibility {self.psi!r} outside [0,1]")
        if self.authority is not None and not _in_unit(self.authority):
            raise GraphValidationError(f"node {self.id}: authority {self.authority!r} outside [0,1]")


@dataclass(frozen=True)
class TypedEdge:
    """Directed evidential influence src -> dst."""
    src: int
    dst: int
    edge_type: str
    sign: int
    weight: float

    def __post_init__(self):
        if self.sign not in VALID_SIGNS:
            raise GraphValidationError(f"edge {self.src}->{self.dst}: unknown sign {self.sign!r}")
        if not isinstance(self.weight, (int, float)) or not math.isfinite(self.weight) or self.weight < 0:
            raise GraphValidationError(f"edge {self.src}->{self.dst}: weight {self.weight!r} must be finite and >= 0")
        if self.src == self.dst:
            raise GraphValidationError(f"self-loop on node {self.src} is not allowed")

    @property
    def key(self) -> EdgeKey:
        return (self.src, self.dst, self.edge_type)


def _in_unit(value) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value) and 0.0 <= value <= 1.0


class BeliefGraph:
    """Single source of truth for nodes, typed edges and the sign map."""

    def __init__(
        self,
        nodes: Sequence[BeliefNode],
        edges: Iterable[TypedEdge] = (),
        labels: Optional[Sequence[str]] = None,
    ):
        """Build and validate a graph.

        Args:
            nodes: Nodes whose ids must be exactly 0..n-1 in order
            edges: Typed edges between existing nodes
            labels: Original string ids (defaults to str(id))

        Raises:
            GraphValidationError: On any structural violation
        """
        self.nodes: Tuple[BeliefNode, ...] = tuple(nodes)
        self.edges: Tuple[TypedEdge, ...] = tuple(edges)
        n = len(self.nodes)

        for index, node in enumerate(self.nodes):
            if node.id != index:
                raise GraphValidationError(f"node ids must be dense 0..n-1, got {node.id} at position {index}")

        if labels is None:
            labels = [str(i) for i in range(n)]
        self.labels: Tuple[str, ...] = tuple(str(label) for label in labels)
        if len(self.labels) != n:
            raise GraphValidationError("labels must match the node count")
        if len(set(self.labels)) != n:
            raise GraphValidationError("node ids must be unique")

        sign_map: Dict[str, int] = {}
        for edge in self.edges:
            if not (0 <= edge.src < n and 0 <= edge.dst < n):
                raise GraphValidationError(
                    f"edge {edge.src}->{edge.dst} references a missing node")
            known = sign_map.setdefault(edge.edge_type, edge.sign)
            if known != edge.sign:
                raise GraphValidationError(
                    f"edge type '{edge.edge_type}' mapped to both {known} and {edge.sign}")
        self.sign_map: Dict[str, int] = sign_map

    # ---------------------------------------------------------------- basics

    @property
    def n(self) -> int:
        return len(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"BeliefGraph(n={self.n}, edges={len(self.edges)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, BeliefGraph):
            return NotImplemented
        return (self.nodes == other.nodes and self.labels == other.labels
                and sorted(self.edges, key=_edge_order) == sorted(other.edges, key=_edge_order))

    __hash__ = None

    @cached_property
    def label_index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    @cached_property
    def psi(self) -> np.ndarray:
        return np.array([node.psi for node in self.nodes], dtype=np.float64)

    def authority_map(self) -> Dict[int, float]:
        """Map of clamped node id -> fixed confidence (V^fix)."""
        return {node.id: float(node.authority) for node in self.nodes if node.authority is not None}

    @cached_property
    def matrices(self):
        """Aggregated and row-capped support/contradiction matrices (cached)."""
        from .matrices import build_signed_matrices
        return build_signed_matrices(self)

    def out_edges(self, node: int) -> List[TypedEdge]:
        return [edge for edge in self.edges if edge.src == node]

    def edges_with_key(self, key: EdgeKey) -> List[TypedEdge]:
        return [edge for edge in self.edges if edge.key == key]

    # ---------------------------------------------------------- derivations

    def with_edges(self, edges: Iterable[TypedEdge]) -> 'BeliefGraph':
        """Same nodes, new edge multiset."""
        return BeliefGraph(self.nodes, edges, self.labels)

    def with_nodes(self, nodes: Sequence[BeliefNode]) -> 'BeliefGraph':
        """Same edges and labels, replaced node records."""
        return BeliefGraph(nodes, self.edges, self.labels)

    def with_psi(self, psi: Mapping[int, float]) -> 'BeliefGraph':
        """Copy with some credibilities replaced."""
        nodes = [replace(node, psi=float(psi[node.id])) if node.id in psi else node
                 for node in self.nodes]
        return self.with_nodes(nodes)

    def with_weights(self, transform: Callable[[np.ndarray], np.ndarray]) -> 'BeliefGraph':
        """Copy with every edge weight passed through a vectorized transform.

        Args:
            transform: Maps the weight vector (edge order) to new weights

        Returns:
            New graph with identical structure
        """
        weights = np.array([edge.weight for edge in self.edges], dtype=np.float64)
        new_weights = np.asarray(transform(weights), dtype=np.float64)
        if new_weights.shape != weights.shape:
            raise GraphValidationError("weight transform changed the edge count")
        edges = [replace(edge, weight=float(w)) for edge, w in zip(self.edges, new_weights)]
        return self.with_edges(edges)

    def induced_edges(self, members: Iterable[int]) -> List[TypedEdge]:
        """Typed edges with both endpoints in members (E_Z)."""
        keep = set(members)
        return [edge for edge in self.edges if edge.src in keep and edge.dst in keep]


def _edge_order(edge: TypedEdge):
    return (edge.src, edge.dst, edge.edge_type, edge.sign, edge.weight)


def unsigned_view(graph: BeliefGraph) -> BeliefGraph:
    """Every propagating edge re-signed as support; sign-0 edges stay inert.

    Types are suffixed so the sign map stays consistent.
    """
    edges = []
    for edge in graph.edges:
        if edge.sign == 0:
            edges.append(edge)
        else:
            edges.append(TypedEdge(edge.src, edge.dst, f"{edge.edge_type}~unsigned", 1, edge.weight))
    return BeliefGraph(graph.nodes, edges, graph.labels)


def make_graph(
    psi: Sequence[float],
    edges: Iterable[Tuple[int, int, int, float]],
    authority: Optional[Mapping[int, float]] = None,
    edge_types: Optional[Mapping[int, str]] = None,
) -> BeliefGraph:
    """Convenience builder from plain tuples.

    Args:
        psi: Credibility per node
        edges: (src, dst, sign, weight) tuples
        authority: Optional clamped values per node
        edge_types: Optional sign -> type name override

    Returns:
        BeliefGraph
    """
    authority = authority or {}
    names = {1: SUPPORT_TYPE, -1: CONTRADICTION_TYPE, 0: 'related'}
    if edge_types:
        names.update(edge_types)
    nodes = [BeliefNode(i, float(p), authority.get(i)) for i, p in enumerate(psi)]
    typed = [TypedEdge(int(s), int(d), names[int(sign)], int(sign), float(w)) for s, d, sign, w in edges]
    return BeliefGraph(nodes, typed)
