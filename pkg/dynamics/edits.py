"""
ZoneGraph Edits
Primitive graph edits: expansion, contraction, revision and the two
reasoner handback channels.

Node removal re-densifies ids; `index_map` tells callers where every old
id went so vectors and zones can follow.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from beliefs.graph import BeliefGraph, BeliefNode, EdgeKey, TypedEdge
from common.errors import GraphValidationError


class EditKind(Enum):
    """Kinds of graph change."""
    EXPANSION = "expansion"
    CONTRACTION = "contraction"
    REVISION = "revision"
    CREDIBILITY_HANDBACK = "credibility_handback"
    STRUCTURAL_HANDBACK = "structural_handback"


# payload fields each kind may carry
ALLOWED_FIELDS = {
    EditKind.EXPANSION: {'add_nodes', 'add_edges'},
    EditKind.CONTRACTION: {'remove_nodes', 'remove_edges'},
    EditKind.REVISION: {'psi', 'edge_changes'},
    EditKind.CREDIBILITY_HANDBACK: {'psi'},
    EditKind.STRUCTURAL_HANDBACK: {'edge_changes'},
}


@dataclass(frozen=True)
class NewNode:
    label: str
    psi: float
    authority: Optional[float] = None


@dataclass(frozen=True)
class EdgeChange:
    """Set the aggregate weight and/or retype the edges under one key.

    Parallel edges sharing (src, dst, edge_type) are merged into one. A key
    with no edges is created when its sign is known (new_sign or the graph's
    sign map) and a weight is given.
    """
    src: int
    dst: int
    edge_type: str
    weight: Optional[float] = None
    new_type: Optional[str] = None
    new_sign: Optional[int] = None

    def __post_init__(self):
        if self.weight is not None and (not math.isfinite(self.weight) or self.weight < 0):
            raise GraphValidationError(f"edge change {self.src}->{self.dst}: negative or non-finite weight")

    @property
    def key(self) -> EdgeKey:
        return (self.src, self.dst, self.edge_type)


@dataclass(frozen=True)
class EditDelta:
    """One edit; ids of added nodes continue after the current node count."""
    kind: EditKind
    add_nodes: Tuple[NewNode, ...] = ()
    add_edges: Tuple[TypedEdge, ...] = ()
    remove_nodes: Tuple[int, ...] = ()
    remove_edges: Tuple[EdgeKey, ...] = ()
    psi: Mapping[int, float] = field(default_factory=dict)
    edge_changes: Tuple[EdgeChange, ...] = ()

    def __post_init__(self):
        kind = EditKind(self.kind)
        used = {name for name in ('add_nodes', 'add_edges', 'remove_nodes', 'remove_edges', 'psi', 'edge_changes')
                if getattr(self, name)}
        extra = used - ALLOWED_FIELDS[kind]
        if extra:
            raise GraphValidationError(f"{kind.value} edit cannot carry {sorted(extra)}")

    @property
    def is_identity(self) -> bool:
        return not any((self.add_nodes, self.add_edges, self.remove_nodes,
                        self.remove_edges, self.psi, self.edge_changes))

    @property
    def removes_nodes(self) -> bool:
        return bool(self.remove_nodes)


def index_map(graph: BeliefGraph, delta: EditDelta) -> np.ndarray:
    """Old id -> new id after the edit (-1 for removed nodes)."""
    removed = set(int(v) for v in delta.remove_nodes)
    mapping = np.full(graph.n, -1, dtype=np.int64)
    next_id = 0
    for node in range(graph.n):
        if node not in removed:
            mapping[node] = next_id
            next_id += 1
    return mapping


def _retype_sign(graph_signs: Mapping[str, int], edge_type: str, explicit: Optional[int]) -> int:
    if explicit is not None:
        return int(explicit)
    if edge_type in graph_signs:
        return graph_signs[edge_type]
    raise GraphValidationError(f"edge type '{edge_type}' has no known sign")


def _apply_changes(edges: List[TypedEdge], changes: Sequence[EdgeChange],
                   sign_map: Mapping[str, int]) -> List[TypedEdge]:
    by_key: Dict[EdgeKey, List[int]] = defaultdict(list)
    for i, edge in enumerate(edges):
        by_key[edge.key].append(i)
    drop = set()
    appended: List[TypedEdge] = []
    for change in changes:
        positions = by_key.get(change.key, [])
        if positions:
            current = sum(edges[i].weight for i in positions)
            sign = edges[positions[0]].sign
            drop.update(positions)
            by_key[change.key] = []
        else:
            if change.weight is None:
                raise GraphValidationError(f"edge {change.key} does not exist and no weight was given")
            current = 0.0
            sign = _retype_sign(sign_map, change.edge_type, change.new_sign)
        edge_type = change.new_type or change.edge_type
        if change.new_type is not None or change.new_sign is not None:
            sign = _retype_sign(sign_map, edge_type, change.new_sign)
        weight = current if change.weight is None else change.weight
        appended.append(TypedEdge(change.src, change.dst, edge_type, sign, float(weight)))
    kept = [edge for i, edge in enumerate(edges) if i not in drop]
    return kept + appended


def apply_edit(graph: BeliefGraph, delta: EditDelta) -> BeliefGraph:
    """Apply an edit and return the new graph.

    Order: add nodes, add edges, edge changes, credibility, remove edges,
    remove nodes (with their incident edges).

    Args:
        graph: Current graph
        delta: EditDelta

    Returns:
        New BeliefGraph (unchanged rows aggregate bit-identically)

    Raises:
        GraphValidationError: Missing nodes or edges, negative weights,
            unknown signs
    """
    n = graph.n
    nodes = list(graph.nodes)
    labels = list(graph.labels)
    for offset, new in enumerate(delta.add_nodes):
        nodes.append(BeliefNode(n + offset, float(new.psi), new.authority))
        labels.append(new.label)
    total = len(nodes)

    edges = list(graph.edges) + list(delta.add_edges)
    for edge in delta.add_edges:
        if not (0 <= edge.src < total and 0 <= edge.dst < total):
            raise GraphValidationError(f"added edge {edge.src}->{edge.dst} references a missing node")

    sign_map = dict(graph.sign_map)
    for edge in delta.add_edges:
        sign_map.setdefault(edge.edge_type, edge.sign)
    for change in delta.edge_changes:
        for end in (change.src, change.dst):
            if not 0 <= end < total:
                raise GraphValidationError(f"edge change references missing node {end}")
    if delta.edge_changes:
        edges = _apply_changes(edges, delta.edge_changes, sign_map)

    for node, value in delta.psi.items():
        node = int(node)
        if not 0 <= node < total:
            raise GraphValidationError(f"credibility revision for missing node {node}")
        nodes[node] = BeliefNode(node, float(value), nodes[node].authority)

    if delta.remove_edges:
        doomed = set(tuple(key) for key in delta.remove_edges)
        present = {edge.key for edge in edges}
        missing = doomed - present
        if missing:
            raise GraphValidationError(f"cannot remove missing edges {sorted(missing)}")
        edges = [edge for edge in edges if edge.key not in doomed]

    if not delta.remove_nodes:
        return BeliefGraph(nodes, edges, labels)

    removed = set()
    for node in delta.remove_nodes:
        node = int(node)
        if not 0 <= node < total:
            raise GraphValidationError(f"cannot remove missing node {node}")
        removed.add(node)
    mapping = {}
    survivors = []
    for node in nodes:
        if node.id in removed:
            continue
        mapping[node.id] = len(survivors)
        survivors.append(BeliefNode(len(survivors), node.psi, node.authority))
    kept_labels = [labels[i] for i in range(total) if i not in removed]
    kept_edges = [
        TypedEdge(mapping[e.src], mapping[e.dst], e.edge_type, e.sign, e.weight)
        for e in edges if e.src not in removed and e.dst not in removed
    ]
    return BeliefGraph(survivors, kept_edges, kept_labels)
