"""
ZoneGraph Contradiction Strategies
Suppression and prior steering expressed as ordinary edits.
"""

from collections import defaultdict
from typing import Dict, Iterable, Mapping

from beliefs.graph import BeliefGraph
from common.errors import ConfigError, GraphValidationError

from .edits import EdgeChange, EditDelta, EditKind


def suppress(graph: BeliefGraph, nodes: Iterable[int], decay: float) -> EditDelta:
    """Scale every out-edge weight of `nodes` by `decay` in [0, 1]."""
    if not 0.0 <= decay <= 1.0:
        raise ConfigError(f"decay must be in [0,1], got {decay}")
    chosen = {int(v) for v in nodes}
    for node in chosen:
        if not 0 <= node < graph.n:
            raise GraphValidationError(f"cannot suppress missing node {node}")
    totals: Dict[tuple, float] = defaultdict(float)
    for edge in graph.edges:
        if edge.src in chosen:
            totals[edge.key] += edge.weight
    changes = tuple(EdgeChange(src, dst, edge_type, weight=weight * decay)
                    for (src, dst, edge_type), weight in sorted(totals.items()))
    return EditDelta(EditKind.REVISION, edge_changes=changes)


def steer_prior(graph: BeliefGraph, psi: Mapping[int, float]) -> EditDelta:
    """Revise credibilities, leaving the structure alone."""
    for node in psi:
        if not 0 <= int(node) < graph.n:
            raise GraphValidationError(f"cannot steer missing node {node}")
    return EditDelta(EditKind.REVISION, psi={int(k): float(v) for k, v in sorted(psi.items())})
