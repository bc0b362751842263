"""
ZoneGraph Shocks
Localized contradiction shocks gated by contractivity backtracking.

For a shocked node u with strength s_u, every positive out-edge u->v is
scaled by (1 - kappa s_u) and contradiction mass

    rho_shock * s_u * supp_uv / (1 + sum_v' supp_uv')

is added on the same (u, v) pairs, using the pre-shock aggregated supports.
If the shocked graph is not contractive all strengths are halved and the
shock is re-applied to the pristine graph.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from beliefs.graph import BeliefGraph, TypedEdge
from common.errors import ConfigError, EmptyFamilyError, ShockRejected
from common.logs import get_logger
from propagation.solver import ConfidenceState, PropagationParams, propagate, propagate_graph
from propagation.prior import build_prior
from propagation.spectral import contraction_factor

logger = get_logger('dynamics.shocks')

SHOCK_TYPE = 'shock_contradiction'
MAX_HALVINGS = 40
MIN_STRENGTH = 1e-12


@dataclass(frozen=True)
class ShockSpec:
    """Requested shock: per-node strengths and the shared edge-rule knobs."""
    targets: Mapping[int, float] = field(default_factory=dict)
    kappa: float = 0.5
    rho_shock: float = 1.0
    delta_margin: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.kappa < 1.0:
            raise ConfigError(f"kappa must be in [0,1), got {self.kappa}")
        if self.rho_shock < 0.0:
            raise ConfigError(f"rho_shock must be >= 0, got {self.rho_shock}")
        if self.delta_margin is not None and self.delta_margin <= 0.0:
            raise ConfigError(f"delta_margin must be > 0, got {self.delta_margin}")
        for node, s in self.targets.items():
            if not (isinstance(s, (int, float)) and math.isfinite(s) and 0.0 <= s <= 1.0):
                raise ConfigError(f"shock strength for node {node} must be in [0,1], got {s!r}")

    def scaled(self, factor: float) -> Dict[int, float]:
        return {int(node): float(s) * factor for node, s in sorted(self.targets.items())}


@dataclass
class ShockResult:
    """Post-shock graph and state with the strengths actually applied."""
    graph: BeliefGraph
    state: ConfidenceState
    strengths: Dict[int, float]
    factor: float
    r_pre: float
    halvings: int = 0


def shocked_graph(graph: BeliefGraph, strengths: Mapping[int, float], kappa: float,
                  rho_shock: float) -> BeliefGraph:
    """Apply the shock edge rule once (no contractivity check).

    Returns the input graph itself when no edge changes.
    """
    active = {u: s for u, s in strengths.items() if s > 0.0}
    if not active:
        return graph
    supp = graph.matrices.supp
    injections: Dict[Tuple[int, int], float] = {}
    for u, s in active.items():
        row = slice(supp.indptr[u], supp.indptr[u + 1])
        targets, weights = supp.indices[row], supp.data[row]
        total = float(weights.sum())
        for v, w in zip(targets.tolist(), weights.tolist()):
            if w > 0.0:
                injections[(u, v)] = rho_shock * s * w / (1.0 + total)
    if not injections and kappa == 0.0:
        return graph

    edges: List[TypedEdge] = []
    changed = False
    for edge in graph.edges:
        s = active.get(edge.src, 0.0)
        if edge.sign > 0 and s > 0.0 and kappa > 0.0 and edge.weight > 0.0:
            edges.append(TypedEdge(edge.src, edge.dst, edge.edge_type, edge.sign,
                                   edge.weight * (1.0 - kappa * s)))
            changed = True
        elif edge.edge_type == SHOCK_TYPE and edge.key[:2] in injections:
            extra = injections.pop(edge.key[:2])
            edges.append(TypedEdge(edge.src, edge.dst, SHOCK_TYPE, -1, edge.weight + extra))
            changed = changed or extra > 0.0
        else:
            edges.append(edge)
    for (u, v), extra in sorted(injections.items()):
        if extra > 0.0:
            edges.append(TypedEdge(u, v, SHOCK_TYPE, -1, extra))
            changed = True
    return graph.with_edges(edges) if changed else graph


def apply_shock(
    graph: BeliefGraph,
    shock: ShockSpec,
    params: PropagationParams,
    state: Optional[ConfidenceState] = None,
) -> ShockResult:
    """One shock step with strength backtracking.

    Args:
        graph: Pre-shock graph
        shock: ShockSpec
        params: PropagationParams
        state: Pre-shock state (computed when None); warm start for the re-solve

    Returns:
        ShockResult with the applied strengths

    Raises:
        ShockRejected: Pre-shock graph not contractive, or strengths
            underflow without restoring r < 1
    """
    for node in shock.targets:
        if not 0 <= int(node) < graph.n:
            raise ConfigError(f"shock target {node} is not a node")
    r_pre = contraction_factor(graph.matrices, params.alpha, params.eta)
    if r_pre >= 1.0:
        raise ShockRejected(f"pre-shock graph is not contractive (r={r_pre:.6f})")
    if state is None:
        state = propagate_graph(graph, params, r=r_pre)

    peak = max(shock.targets.values(), default=0.0)
    factor = 1.0
    for halving in range(MAX_HALVINGS + 1):
        if peak > 0.0 and peak * factor < MIN_STRENGTH:
            break
        strengths = shock.scaled(factor)
        candidate = shocked_graph(graph, strengths, shock.kappa, shock.rho_shock)
        if candidate is graph:
            logger.info("shock left the graph unchanged")
            return ShockResult(graph, state, strengths, factor, r_pre, halving)
        r_new = contraction_factor(candidate.matrices, params.alpha, params.eta)
        within_margin = shock.delta_margin is None or r_new <= r_pre + shock.delta_margin
        if r_new < 1.0 and within_margin:
            b = build_prior(candidate, params, candidate.matrices)
            new_state = propagate(b, candidate.matrices, params, candidate.authority_map(),
                                  x0=state.phi, r=r_new)
            logger.info("shock accepted at factor %.6g (r %.4f -> %.4f), strengths %s",
                        factor, r_pre, r_new, strengths)
            return ShockResult(candidate, new_state, strengths, factor, r_pre, halving)
        logger.warning("shock at factor %.6g gives r=%.4f; halving strengths", factor, r_new)
        factor /= 2.0
    raise ShockRejected(f"shock strengths underflowed after {MAX_HALVINGS} halvings without r < 1")


def batch_shocks(events: Sequence[ShockSpec]) -> ShockSpec:
    """Combine events into one shock with s = min(1, sum of strengths).

    Raises:
        EmptyFamilyError: No events
        ConfigError: Events disagree on kappa, rho_shock or delta_margin
    """
    if not events:
        raise EmptyFamilyError("no shock events to batch")
    first = events[0]
    combined: Dict[int, float] = defaultdict(float)
    for event in events:
        if (event.kappa, event.rho_shock, event.delta_margin) != (first.kappa, first.rho_shock, first.delta_margin):
            raise ConfigError("shock events in one window must share kappa, rho_shock and delta_margin")
        for node, s in event.targets.items():
            combined[int(node)] += float(s)
    targets = {node: min(1.0, s) for node, s in sorted(combined.items())}
    return ShockSpec(targets, first.kappa, first.rho_shock, first.delta_margin)


def window_batches(events: Sequence[Tuple[float, ShockSpec]], window: float) -> List[ShockSpec]:
    """Group timestamped events into windows of length `window` and batch each.

    Windows start at the earliest event time; output is in time order.
    """
    if window <= 0.0:
        raise ConfigError(f"window must be > 0, got {window}")
    if not events:
        return []
    ordered = sorted(events, key=lambda item: item[0])
    start = ordered[0][0]
    buckets: Dict[int, List[ShockSpec]] = defaultdict(list)
    for time, event in ordered:
        buckets[int(np.floor((time - start) / window))].append(event)
    return [batch_shocks(buckets[key]) for key in sorted(buckets)]
