"""
ZoneGraph Atlas Governance
Scoring, overlap policy and hysteresis for the zone atlas.

- Zones coexist iff their Jaccard overlap is below tau
- Candidates are ranked by score with a deterministic tie chain
  (scores within eps_tie of a group's top, then larger mass, smaller cut,
  member ids) and accepted greedily
- Refresh prefers candidates matching the previous atlas; a new challenger
  displaces an incumbent only by a score or mass margin
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from beliefs.projection import signed_projection
from common.errors import ConfigError, EmptyFamilyError
from common.logs import get_logger
from zones.extract import Zone, make_zone
from zones.quality import zone_quality

logger = get_logger('atlas')


class ScoringMode(Enum):
    """How zones are ranked."""
    RAW = "raw"                # sum phi - lambda cut - rho loss
    NORMALIZED = "normalized"  # mean phi - (lambda cut + rho loss) / |Z|
    QUALITY = "quality"        # mean phi x density


@dataclass(frozen=True)
class GovernanceParams:
    """Overlap policy, penalties and hysteresis knobs."""
    tau: float = 0.30
    k: Optional[int] = 3
    lambda_gov: float = 0.0
    rho_gov: float = 0.0
    scoring_mode: str = ScoringMode.RAW.value
    tau_keep: float = 0.50
    delta_score: float = 1e-6
    delta_mass: float = 1e-3
    hops: int = 2
    eps_tie: float = 1e-9

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise ConfigError(f"tau must be in [0,1), got {self.tau}")
        if not self.tau < self.tau_keep <= 1.0:
            raise ConfigError(f"tau_keep must be in (tau, 1], got {self.tau_keep}")
        if self.k is not None and int(self.k) < 1:
            raise ConfigError(f"k must be >= 1 or null, got {self.k}")
        if self.lambda_gov < 0 or self.rho_gov < 0:
            raise ConfigError("governance penalties must be >= 0")
        if self.delta_score < 0 or self.delta_mass < 0:
            raise ConfigError("hysteresis margins must be >= 0")
        if int(self.hops) < 0:
            raise ConfigError(f"hops must be >= 0, got {self.hops}")
        if self.eps_tie <= 0:
            raise ConfigError("eps_tie must be > 0")
        try:
            ScoringMode(self.scoring_mode)
        except ValueError:
            raise ConfigError(f"unknown scoring_mode '{self.scoring_mode}'") from None


@dataclass(frozen=True)
class Atlas:
    """Accepted zones in rank order, with the candidate pool they came from."""
    zones: Tuple[Zone, ...] = ()
    scores: Tuple[float, ...] = ()
    scoring_mode: str = ScoringMode.RAW.value
    candidates: Tuple[Zone, ...] = field(default=(), compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.zones)

    def __iter__(self):
        return iter(self.zones)

    @property
    def zone_ids(self) -> List[str]:
        return [zone_id(i) for i in range(len(self.zones))]

    @property
    def member_sets(self) -> List[frozenset]:
        return [zone.member_set for zone in self.zones]

    def covered(self) -> frozenset:
        return frozenset().union(*self.member_sets) if self.zones else frozenset()


def zone_id(rank: int) -> str:
    """Stable id for the zone at a 0-based rank."""
    return f"Z{rank + 1:03d}"


def jaccard(a: Iterable[int], b: Iterable[int]) -> float:
    """|a & b| / |a | b|.

    Raises:
        EmptyFamilyError: If both sets are empty
    """
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        raise EmptyFamilyError("Jaccard overlap of two empty sets is undefined")
    return len(a & b) / union


def boundary_flows(zone, graph) -> Tuple[float, float]:
    """(cut_minus, loss_plus): raw contradiction and support leaving the zone."""
    members = list(zone.members)
    if not members or graph.n == 0:
        return 0.0, 0.0
    outside = np.ones(graph.n, dtype=np.float64)
    outside[members] = 0.0
    matrices = graph.matrices
    cut = float((matrices.contr[members] @ outside).sum())
    loss = float((matrices.supp[members] @ outside).sum())
    return cut, loss


def zone_mass(zone, phi: np.ndarray) -> float:
    """Sum of confidence over members."""
    return float(np.asarray(phi, dtype=np.float64)[list(zone.members)].sum())


def score(zone, phi: np.ndarray, graph, params: GovernanceParams) -> float:
    """Score a zone in the configured mode.

    Args:
        zone: Zone
        phi: Confidence vector
        graph: BeliefGraph (boundary flows use its unnormalized weights)
        params: GovernanceParams

    Returns:
        Score S, normalized S or Q
    """
    mode = ScoringMode(params.scoring_mode)
    if mode is ScoringMode.QUALITY:
        return zone_quality(zone, phi, signed_projection(graph, zone.members))
    cut, loss = boundary_flows(zone, graph)
    penalty = params.lambda_gov * cut + params.rho_gov * loss
    mass = zone_mass(zone, phi)
    if mode is ScoringMode.NORMALIZED:
        return (mass - penalty) / zone.size
    return mass - penalty


@dataclass(frozen=True)
class _Ranked:
    zone: Zone
    score: float
    mass: float
    cut: float
    match: int = 2  # 0 incumbent, 1 near-incumbent, 2 new

    def tie_key(self):
        return (self.match, -self.mass, self.cut, self.zone.members)


def _tie_order(ranked: Iterable[_Ranked], eps: float) -> List[_Ranked]:
    """Score order where every score within eps of its group's top counts as tied."""
    by_score = sorted(ranked, key=lambda item: (-item.score, item.tie_key()))
    ordered: List[_Ranked] = []
    group: List[_Ranked] = []
    for item in by_score:
        if group and group[0].score - item.score > eps:
            ordered.extend(sorted(group, key=_Ranked.tie_key))
            group = []
        group.append(item)
    ordered.extend(sorted(group, key=_Ranked.tie_key))
    return ordered


def _maximal_pool(candidates: Iterable[Zone], phi: np.ndarray) -> List[Zone]:
    unique: Dict[frozenset, Zone] = {}
    for zone in candidates:
        unique.setdefault(zone.member_set, zone)
    ordered = sorted(unique, key=lambda s: (-len(s), sorted(s)))
    kept: List[frozenset] = []
    for members in ordered:
        if not any(members < other for other in kept):
            kept.append(members)
    return sorted((make_zone(members, phi) for members in kept), key=lambda z: z.members)


def _rank(pool: Sequence[Zone], phi, graph, params: GovernanceParams, prev: Optional[Atlas] = None):
    incumbents = set(prev.member_sets) if prev is not None else set()
    ranked = []
    for zone in pool:
        cut, _ = boundary_flows(zone, graph)
        match = 2
        if prev is not None:
            if zone.member_set in incumbents:
                match = 0
            elif any(jaccard(zone.members, old) >= params.tau_keep for old in incumbents):
                match = 1
        ranked.append(_Ranked(zone, score(zone, phi, graph, params), zone_mass(zone, phi), cut, match))
    return _tie_order(ranked, params.eps_tie)


def _conflicts(zone: Zone, accepted: Sequence[_Ranked], tau: float) -> bool:
    return any(jaccard(zone.members, other.zone.members) >= tau for other in accepted)


def _finish(accepted: List[_Ranked], pool: Sequence[Zone], params: GovernanceParams) -> Atlas:
    return Atlas(
        zones=tuple(item.zone for item in accepted),
        scores=tuple(item.score for item in accepted),
        scoring_mode=ScoringMode(params.scoring_mode).value,
        candidates=tuple(pool),
    )


def atlas_update(candidates: Iterable[Zone], phi: np.ndarray, graph, params: GovernanceParams) -> Atlas:
    """Greedy score-ordered acceptance under the Jaccard policy.

    Args:
        candidates: Balanced candidate zones
        phi: Confidence vector
        graph: BeliefGraph
        params: GovernanceParams

    Returns:
        Atlas in rank order, truncated to k zones when k is set
    """
    pool = _maximal_pool(candidates, phi)
    accepted: List[_Ranked] = []
    for item in _rank(pool, phi, graph, params):
        if params.k is not None and len(accepted) >= params.k:
            break
        if not _conflicts(item.zone, accepted, params.tau):
            accepted.append(item)
    logger.debug("atlas_update: %d candidates -> %d zones", len(pool), len(accepted))
    return _finish(accepted, pool, params)


def _displaces(challenger: _Ranked, incumbent: _Ranked, params: GovernanceParams) -> bool:
    return (challenger.score > incumbent.score + params.delta_score
            or challenger.mass >= incumbent.mass + params.delta_mass)


def atlas_refresh(prev: Atlas, candidates: Iterable[Zone], phi: np.ndarray, graph,
                  params: GovernanceParams) -> Atlas:
    """Re-govern a candidate pool with hysteresis against the previous atlas.

    Candidates equal to a previous zone, then those overlapping one at
    J >= tau_keep, go first among tied scores. A new candidate that
    overlaps a still-viable later-ranked matching candidate at J >= tau is
    accepted only if it beats that candidate by more than delta_score or by
    at least delta_mass of belief mass; otherwise the displacement is deferred.

    Args:
        prev: Atlas before the update
        candidates: New candidate zones
        phi: Current confidence vector
        graph: Current BeliefGraph
        params: GovernanceParams

    Returns:
        Refreshed Atlas
    """
    pool = _maximal_pool(candidates, phi)
    ranked = _rank(pool, phi, graph, params, prev)
    accepted: List[_Ranked] = []
    deferred = 0
    for index, item in enumerate(ranked):
        if params.k is not None and len(accepted) >= params.k:
            break
        if _conflicts(item.zone, accepted, params.tau):
            continue
        if item.match == 2:
            rivals = [
                other for other in ranked[index + 1:]
                if other.match < 2
                and not _conflicts(other.zone, accepted, params.tau)
                and jaccard(item.zone.members, other.zone.members) >= params.tau
            ]
            if any(not _displaces(item, rival, params) for rival in rivals):
                deferred += 1
                continue
        accepted.append(item)
    if deferred:
        logger.debug("atlas_refresh deferred %d displacement(s)", deferred)
    return _finish(accepted, pool, params)


def coverage(atlas: Atlas, v_theta: Iterable[int]) -> float:
    """Fraction of V_theta covered by the atlas (0 when V_theta is empty)."""
    base = {int(v) for v in v_theta}
    if not base:
        return 0.0
    return len(atlas.covered() & base) / len(base)


def mean_jaccard(atlas: Atlas) -> float:
    """Mean pairwise Jaccard between atlas zones (0 for fewer than two)."""
    pairs = [jaccard(a.members, b.members) for a, b in combinations(atlas.zones, 2)]
    return float(np.mean(pairs)) if pairs else 0.0
