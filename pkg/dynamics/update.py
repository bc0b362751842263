"""
ZoneGraph Update Loop
Apply an edit, damp it until the operator contracts, re-solve warm, refresh.

Damping interpolates every aggregate (src, dst, type) weight between its
pre-edit and post-edit value; credibility changes and node removals are
applied in full.
"""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from atlas.governance import Atlas, GovernanceParams, atlas_refresh
from atlas.refresh import local_refresh
from beliefs.graph import BeliefGraph, EdgeKey, TypedEdge
from beliefs.projection import signed_projection
from common.errors import EditRejected
from common.logs import get_logger
from propagation.prior import build_prior
from propagation.solver import ConfidenceState, PropagationParams, propagate
from propagation.spectral import contraction_factor
from zones.extract import extract_zones, make_zone, threshold_nodes

from .edits import EditDelta, apply_edit, index_map

logger = get_logger('dynamics.update')

MAX_HALVINGS = 40
MIN_FACTOR = 1e-12


@dataclass
class UpdateOutcome:
    """Graph, state and atlas after an update (the inputs when rejected)."""
    graph: BeliefGraph
    state: ConfidenceState
    atlas: Atlas
    accepted: bool = True
    factor: float = 1.0


def _key_weights(graph: BeliefGraph, mapping: Optional[np.ndarray] = None) -> Dict[EdgeKey, tuple]:
    weights: Dict[EdgeKey, list] = {}
    for edge in graph.edges:
        src, dst = edge.src, edge.dst
        if mapping is not None:
            src, dst = int(mapping[src]), int(mapping[dst])
            if src < 0 or dst < 0:
                continue
        entry = weights.setdefault((src, dst, edge.edge_type), [edge.sign, 0.0])
        entry[1] += edge.weight
    return {key: tuple(value) for key, value in weights.items()}


def damped_graph(before: BeliefGraph, after: BeliefGraph, mapping: np.ndarray, factor: float) -> BeliefGraph:
    """Graph with every key weight at before + factor * (after - before)."""
    if factor >= 1.0:
        return after
    old = _key_weights(before, mapping)
    new = _key_weights(after)
    edges = []
    for key in sorted(set(old) | set(new)):
        sign, w_old = old.get(key, (None, 0.0))
        sign_new, w_new = new.get(key, (sign, 0.0))
        weight = w_old + factor * (w_new - w_old)
        if weight > 0.0 or key in new:
            edges.append(TypedEdge(key[0], key[1], key[2], sign_new, max(weight, 0.0)))
    return after.with_edges(edges)


def _remap_atlas(prev: Atlas, mapping: np.ndarray, phi: np.ndarray) -> Atlas:
    def remap(zone):
        members = [int(mapping[v]) for v in zone.members if mapping[v] >= 0]
        return make_zone(members, phi) if members else None

    zones, scores = [], []
    for zone, value in zip(prev.zones, prev.scores):
        moved = remap(zone)
        if moved is not None:
            zones.append(moved)
            scores.append(value)
    candidates = [z for z in (remap(c) for c in prev.candidates) if z is not None]
    return Atlas(tuple(zones), tuple(scores), prev.scoring_mode, tuple(candidates))


def update_and_refresh(
    graph: BeliefGraph,
    delta: EditDelta,
    theta: float,
    gov: GovernanceParams,
    prop: PropagationParams,
    prev: Atlas,
    state: ConfidenceState,
    local: bool = False,
    strict: bool = False,
) -> UpdateOutcome:
    """Apply, damp, re-solve and refresh.

    Args:
        graph: Pre-edit graph
        delta: EditDelta
        theta: Zone threshold
        gov: GovernanceParams
        prop: PropagationParams
        prev: Pre-edit atlas
        state: Pre-edit confidence state (warm start)
        local: Refresh only around threshold crossings (needs a fixed node set)
        strict: Raise EditRejected instead of returning the pre-edit state

    Returns:
        UpdateOutcome

    Raises:
        EditRejected: Damping underflowed and strict is set
    """
    unchanged = UpdateOutcome(graph, state, prev, accepted=True, factor=1.0)
    if delta.is_identity:
        return unchanged
    edited = apply_edit(graph, delta)
    if edited == graph:
        return unchanged

    mapping = index_map(graph, delta)
    candidate, r = None, 0.0
    factor = 1.0
    for _ in range(MAX_HALVINGS + 1):
        damped = damped_graph(graph, edited, mapping, factor)
        r = contraction_factor(damped.matrices, prop.alpha, prop.eta)
        if r < 1.0:
            candidate = damped
            break
        logger.warning("edit at factor %.6g gives r=%.4f; damping", factor, r)
        factor /= 2.0
        if factor < MIN_FACTOR:
            break
    if candidate is None:
        message = "edit could not be damped into a contractive graph"
        if strict:
            raise EditRejected(message)
        logger.warning("%s; keeping the pre-edit state", message)
        return UpdateOutcome(graph, state, prev, accepted=False, factor=0.0)

    b = build_prior(candidate, prop, candidate.matrices)
    x0 = np.array(b, dtype=np.float64)
    survivors = mapping >= 0
    x0[mapping[survivors]] = state.phi[survivors]
    new_state = propagate(b, candidate.matrices, prop, candidate.authority_map(), x0=x0, r=r)

    carried = _remap_atlas(prev, mapping, new_state.phi)
    if local and candidate.n == graph.n and not delta.removes_nodes:
        atlas = local_refresh(carried, state.phi, new_state.phi, candidate, theta, gov)
    else:
        v_theta = threshold_nodes(new_state.phi, theta)
        zones = extract_zones(signed_projection(candidate, v_theta), new_state.phi)
        atlas = atlas_refresh(carried, zones, new_state.phi, candidate, gov)
    logger.info("%s edit applied at factor %.6g: %d zones", delta.kind.value, factor, len(atlas))
    return UpdateOutcome(candidate, new_state, atlas, accepted=True, factor=factor)
