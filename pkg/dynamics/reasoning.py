"""
ZoneGraph Zone Reasoning
Zone-scoped reasoner orchestration with isolation checks and handback.

- Every atlas zone gets a read-only scope (members, induced edges, psi, phi)
- Reasoners run per zone in a thread pool and only return proposals
- Proposals naming anything outside their zone raise IsolationViolation
- Competing proposals for one target go to the zone with the larger score,
  then larger mass, then smaller cut, then smaller zone id
- Winners are folded into one revision and applied via update_and_refresh
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Protocol, Tuple, runtime_checkable

import numpy as np

from atlas.governance import Atlas, GovernanceParams, boundary_flows, zone_id, zone_mass
from beliefs.graph import BeliefGraph, TypedEdge
from common.errors import IsolationViolation
from common.logs import get_logger
from propagation.solver import ConfidenceState, PropagationParams

from .edits import EdgeChange, EditDelta, EditKind
from .update import UpdateOutcome, update_and_refresh

logger = get_logger('dynamics.reasoning')


@dataclass(frozen=True)
class ZoneScope:
    """Everything a reasoner may read about one zone."""
    zone_id: str
    members: FrozenSet[int]
    edges: Tuple[TypedEdge, ...]
    psi: Mapping[int, float]
    phi: Mapping[int, float]


@dataclass(frozen=True)
class ReasonerProposal:
    """Credibility and structural handback from one zone.

    `weight` mixes proposed credibilities into the current ones:
    psi <- (1 - weight) psi + weight psi_proposed.
    """
    zone_id: str
    psi: Mapping[int, float] = field(default_factory=dict)
    edges: Tuple[EdgeChange, ...] = ()
    weight: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"handback weight must be in (0,1], got {self.weight}")


@runtime_checkable
class Reasoner(Protocol):
    def propose(self, scope: ZoneScope) -> Optional[ReasonerProposal]:
        ...


class EchoReasoner:
    """Reads its zone and proposes nothing."""

    def propose(self, scope: ZoneScope) -> Optional[ReasonerProposal]:
        return ReasonerProposal(scope.zone_id)


class FixedCredibilityReasoner:
    """Proposes fixed credibilities for whichever of its nodes fall in the zone."""

    def __init__(self, values: Mapping[int, float], weight: float = 1.0):
        self.values = {int(k): float(v) for k, v in values.items()}
        self.weight = weight

    def propose(self, scope: ZoneScope) -> Optional[ReasonerProposal]:
        psi = {node: value for node, value in sorted(self.values.items()) if node in scope.members}
        return ReasonerProposal(scope.zone_id, psi=psi, weight=self.weight)


def zone_scopes(atlas: Atlas, graph: BeliefGraph, phi: np.ndarray) -> List[ZoneScope]:
    """Build the read-only scope of every atlas zone in rank order."""
    scopes = []
    for rank, zone in enumerate(atlas.zones):
        members = zone.member_set
        scopes.append(ZoneScope(
            zone_id=zone_id(rank),
            members=members,
            edges=tuple(graph.induced_edges(members)),
            psi={v: graph.nodes[v].psi for v in zone.members},
            phi={v: float(phi[v]) for v in zone.members},
        ))
    return scopes


def _check_isolation(proposal: ReasonerProposal, scope: ZoneScope):
    for node in proposal.psi:
        if int(node) not in scope.members:
            raise IsolationViolation(scope.zone_id, node)
    for change in proposal.edges:
        for end in (change.src, change.dst):
            if int(end) not in scope.members:
                raise IsolationViolation(scope.zone_id, change.key)


def run_reasoning(
    atlas: Atlas,
    graph: BeliefGraph,
    state: ConfidenceState,
    reasoner: Reasoner,
    theta: float,
    gov: GovernanceParams,
    prop: PropagationParams,
    max_workers: Optional[int] = None,
) -> UpdateOutcome:
    """Run a reasoner on every zone and hand its conclusions back.

    Args:
        atlas: Current atlas
        graph: Current graph
        state: Current confidence state
        reasoner: Object with propose(scope)
        theta: Zone threshold used for the refresh
        gov: GovernanceParams
        prop: PropagationParams
        max_workers: Thread pool size

    Returns:
        UpdateOutcome after handback

    Raises:
        IsolationViolation: A proposal referenced an out-of-zone target
    """
    scopes = zone_scopes(atlas, graph, state.phi)
    if not scopes:
        return UpdateOutcome(graph, state, atlas)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        proposals = list(pool.map(reasoner.propose, scopes))

    priority = {}
    for rank, (scope, zone) in enumerate(zip(scopes, atlas.zones)):
        cut, _ = boundary_flows(zone, graph)
        priority[scope.zone_id] = (-atlas.scores[rank], -zone_mass(zone, state.phi), cut, scope.zone_id)

    psi_claims: Dict[int, Tuple[tuple, float]] = {}
    edge_claims: Dict[tuple, Tuple[tuple, EdgeChange]] = {}
    for scope, proposal in zip(scopes, proposals):
        if proposal is None:
            continue
        _check_isolation(proposal, scope)
        rank = priority[scope.zone_id]
        for node, value in proposal.psi.items():
            node = int(node)
            current = graph.nodes[node].psi
            mixed = (1.0 - proposal.weight) * current + proposal.weight * float(value)
            if node not in psi_claims or rank < psi_claims[node][0]:
                psi_claims[node] = (rank, mixed)
        for change in proposal.edges:
            if change.key not in edge_claims or rank < edge_claims[change.key][0]:
                edge_claims[change.key] = (rank, change)

    psi = {node: value for node, (_, value) in sorted(psi_claims.items())}
    changes = tuple(change for _, (_, change) in sorted(edge_claims.items()))
    if not psi and not changes:
        logger.debug("reasoning produced no proposals")
        return UpdateOutcome(graph, state, atlas)
    logger.info("reasoning handback: %d credibility, %d structural changes", len(psi), len(changes))
    delta = EditDelta(EditKind.REVISION, psi=psi, edge_changes=changes)
    return update_and_refresh(graph, delta, theta, gov, prop, atlas, state)
