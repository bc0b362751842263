"""
ZoneGraph Zone Extraction
Threshold by confidence, then split every projected component into
balanced pieces by greedy vertex deletion.

- Balanced component -> one zone
- Unbalanced -> delete the certificate node with the lowest confidence
  (ties: lowest weighted degree in the current component, then lowest id),
  split what remains and repeat; deleted nodes never come back
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csgraph

from common.errors import EmptyFamilyError
from common.logs import get_logger

from .balance import two_color

logger = get_logger('zones')

Closure = Callable[[FrozenSet[int], object], Iterable[int]]


@dataclass(frozen=True)
class Zone:
    """Balanced node set with its confidence summary."""
    members: Tuple[int, ...]
    mean_phi: float
    min_phi: float

    @property
    def size(self) -> int:
        return len(self.members)

    @cached_property
    def member_set(self) -> FrozenSet[int]:
        return frozenset(self.members)

    @property
    def smallest(self) -> int:
        return self.members[0]


def make_zone(members: Iterable[int], phi: np.ndarray) -> Zone:
    """Zone over sorted members with stats read from phi."""
    ids = tuple(sorted({int(v) for v in members}))
    if not ids:
        raise EmptyFamilyError("a zone needs at least one member")
    values = np.asarray(phi, dtype=np.float64)[list(ids)]
    return Zone(members=ids, mean_phi=float(values.mean()), min_phi=float(values.min()))


def threshold_nodes(phi: np.ndarray, theta: float) -> np.ndarray:
    """Sorted ids with phi >= theta (inclusive)."""
    return np.flatnonzero(np.asarray(phi, dtype=np.float64) >= theta)


def quantile_threshold(phi: np.ndarray, q: float) -> float:
    """Empirical quantile with linear interpolation between order statistics.

    Position h = (n - 1) q on the sorted values; q=0 gives the min, q=1 the max.
    """
    values = np.asarray(phi, dtype=np.float64)
    if values.size == 0:
        raise EmptyFamilyError("quantile of an empty vector")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0,1], got {q}")
    return float(np.quantile(values, q, method='linear'))


def _components(sign, local: np.ndarray) -> List[np.ndarray]:
    if len(local) == 0:
        return []
    sub = sign[local][:, local]
    count, labels = csgraph.connected_components(sub, directed=False)
    return [local[labels == c] for c in range(count)]


def _maximal(sets: Sequence[FrozenSet[int]]) -> List[FrozenSet[int]]:
    unique = sorted(set(sets), key=lambda s: (-len(s), sorted(s)))
    kept: List[FrozenSet[int]] = []
    for candidate in unique:
        if not any(candidate < other for other in kept):
            kept.append(candidate)
    return kept


def extract_zones(
    projection,
    phi: np.ndarray,
    closure: Optional[Closure] = None,
) -> List[Zone]:
    """Split a signed projection into inclusion-maximal balanced zones.

    Args:
        projection: SignedProjection over V_theta
        phi: Confidence vector indexed by global node id
        closure: Optional hook mapping a zone's members to a closed set;
            closed sets that are no longer balanced are discarded

    Returns:
        Zones sorted by smallest member id
    """
    phi = np.asarray(phi, dtype=np.float64)
    vertices = projection.vertices
    sign = projection.sign
    total = (projection.w_pos + projection.w_neg).tocsr()

    work = _components(sign, np.arange(projection.size))
    pieces: List[FrozenSet[int]] = []
    removed: List[int] = []
    while work:
        local = work.pop()
        sub = sign[local][:, local]
        _, cycle = two_color(sub)
        if cycle is None:
            pieces.append(frozenset(int(v) for v in vertices[local]))
            continue
        degree = np.asarray(total[local][:, local].sum(axis=1)).ravel()
        victim = min(cycle, key=lambda i: (phi[vertices[local[i]]], degree[i], int(vertices[local[i]])))
        removed.append(int(vertices[local[victim]]))
        work.extend(_components(sign, np.delete(local, victim)))

    if removed:
        logger.debug("repair removed %d of %d nodes", len(removed), projection.size)

    if closure is not None:
        pieces = _apply_closure(pieces, projection, closure)

    zones = [make_zone(members, phi) for members in _maximal(pieces)]
    zones.sort(key=lambda z: z.members)
    return zones


def _apply_closure(pieces, projection, closure: Closure) -> List[FrozenSet[int]]:
    known = projection.position
    closed = []
    for members in pieces:
        grown = frozenset(int(v) for v in closure(members, projection) if int(v) in known)
        if not grown:
            continue
        _, cycle = two_color(projection.induced(grown).sign)
        if cycle is None:
            closed.append(grown)
        else:
            logger.debug("closure broke balance for a zone of %d nodes; discarded", len(members))
    return closed
