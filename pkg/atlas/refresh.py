"""
ZoneGraph Local Refresh
Re-extract only around nodes whose threshold membership changed.
"""

from typing import Optional

import numpy as np
import scipy.sparse as sp

from beliefs.projection import signed_projection
from common.logs import get_logger
from zones.balance import balance_test
from zones.extract import Closure, extract_zones, make_zone, threshold_nodes

from .governance import Atlas, GovernanceParams, atlas_refresh

logger = get_logger('atlas.refresh')


def _undirected_pattern(graph) -> sp.csr_matrix:
    matrices = graph.matrices
    total = (matrices.supp + matrices.contr).tocsr()
    pattern = (total + total.T).tocsr()
    pattern.data = (pattern.data > 0).astype(np.float64)
    pattern.eliminate_zeros()
    return pattern


def local_refresh_region(prev_phi: np.ndarray, new_phi: np.ndarray, theta: float, graph, h: int) -> np.ndarray:
    """Nodes that crossed theta, grown by h undirected hops.

    Args:
        prev_phi: Confidence before the update
        new_phi: Confidence after the update
        theta: Threshold
        graph: BeliefGraph (post-update)
        h: Hop radius

    Returns:
        Sorted node ids of the region R (empty when nothing crossed)
    """
    prev_phi = np.asarray(prev_phi, dtype=np.float64)
    new_phi = np.asarray(new_phi, dtype=np.float64)
    if prev_phi.shape != new_phi.shape:
        raise ValueError("confidence vectors differ in length")
    reached = (prev_phi >= theta) != (new_phi >= theta)
    if not reached.any() or h <= 0:
        return np.flatnonzero(reached)
    pattern = _undirected_pattern(graph)
    for _ in range(int(h)):
        grown = reached | ((pattern @ reached.astype(np.float64)) > 0)
        if np.array_equal(grown, reached):
            break
        reached = grown
    return np.flatnonzero(reached)


def _still_valid(members, projection) -> bool:
    induced = projection.induced(members)
    return len(induced.components()) == 1 and balance_test(induced).balanced


def local_refresh(
    prev: Atlas,
    prev_phi: np.ndarray,
    new_phi: np.ndarray,
    graph,
    theta: float,
    params: GovernanceParams,
    closure: Optional[Closure] = None,
) -> Atlas:
    """Carry untouched candidates, re-extract the changed region, re-govern.

    A previous candidate is carried only when it misses the region, stays
    above theta, and is still connected and balanced in the new projection.
    Every other candidate drops out and its members join the re-extracted set,
    so sign edits that move no node across theta are still caught.

    Args:
        prev: Atlas before the update (its candidate pool is reused)
        prev_phi: Confidence before the update
        new_phi: Confidence after the update
        graph: BeliefGraph after the update
        theta: Threshold
        params: GovernanceParams (hops = h)
        closure: Optional zone closure hook

    Returns:
        Refreshed Atlas
    """
    new_phi = np.asarray(new_phi, dtype=np.float64)
    region = set(local_refresh_region(prev_phi, new_phi, theta, graph, params.hops).tolist())
    v_theta = set(threshold_nodes(new_phi, theta).tolist())
    projection = signed_projection(graph, sorted(v_theta))

    carried, touched = [], set(region)
    for candidate in prev.candidates:
        members = candidate.member_set
        if not members & region and members <= v_theta and _still_valid(members, projection):
            carried.append(make_zone(candidate.members, new_phi))
        else:
            touched |= members

    keep = sorted(v_theta & touched)
    fresh = extract_zones(projection.induced(keep), new_phi, closure) if keep else []
    logger.info("local refresh: region %d nodes, carried %d, re-extracted %d",
                len(region), len(carried), len(fresh))
    return atlas_refresh(prev, carried + fresh, new_phi, graph, params)
