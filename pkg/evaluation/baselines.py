"""
ZoneGraph Baselines
Unsigned comparison methods for the extraction protocols.

- UnsignCL: Louvain communities of the unsigned thresholded graph, governed
  like signed zones
- UnsignPRO: propagation with every edge read as support (eta = 0)
"""

from dataclasses import replace
from typing import List

import networkx as nx
import numpy as np

from atlas.governance import Atlas, GovernanceParams, atlas_update
from beliefs.graph import BeliefGraph, unsigned_view
from beliefs.projection import signed_projection
from common.logs import get_logger
from propagation.solver import ConfidenceState, PropagationParams, propagate_graph
from zones.extract import Zone, make_zone, threshold_nodes

logger = get_logger('evaluation.baselines')

LOUVAIN_RESOLUTION = 1.0
LOUVAIN_THRESHOLD = 1e-7


def unsigned_threshold_graph(graph: BeliefGraph, v_theta: np.ndarray) -> nx.Graph:
    """Undirected graph on V_theta weighted by w+ + w- over both directions."""
    projection = signed_projection(graph, v_theta)
    unsigned = nx.Graph()
    unsigned.add_nodes_from(int(v) for v in projection.vertices)
    for u, v, _, w_pos, w_neg in projection.edges():
        unsigned.add_edge(u, v, weight=w_pos + w_neg)
    return unsigned


def louvain_zones(graph: BeliefGraph, phi: np.ndarray, theta: float, seed: int = 0) -> List[Zone]:
    """Louvain communities of the unsigned thresholded graph, as zones."""
    v_theta = threshold_nodes(phi, theta)
    if len(v_theta) == 0:
        return []
    unsigned = unsigned_threshold_graph(graph, v_theta)
    communities = nx.community.louvain_communities(
        unsigned, weight='weight', resolution=LOUVAIN_RESOLUTION,
        threshold=LOUVAIN_THRESHOLD, seed=seed)
    zones = sorted((make_zone(c, phi) for c in communities if c), key=lambda z: z.members)
    logger.debug("louvain: %d communities on %d nodes", len(zones), len(v_theta))
    return zones


def baseline_unsign_cl(graph: BeliefGraph, phi: np.ndarray, theta: float,
                       gov: GovernanceParams, seed: int = 0) -> Atlas:
    """Communities treated as zones and passed through the same governance."""
    zones = louvain_zones(graph, phi, theta, seed)
    if not zones:
        return Atlas(scoring_mode=gov.scoring_mode)
    return atlas_update(zones, phi, graph, gov)


def baseline_unsign_pro(graph: BeliefGraph, params: PropagationParams) -> ConfidenceState:
    """Signed operator with contradictions read as support and eta = 0."""
    return propagate_graph(unsigned_view(graph), replace(params, eta=0.0))
