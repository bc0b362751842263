"""
ZoneGraph Zone Quality
Q(Z) = mean confidence x projected edge density.
"""

from typing import Iterable, Sequence

import numpy as np

from .balance import balance_test


def density(members: Iterable[int], projection) -> float:
    """2 m_Z / (|Z| (|Z| - 1)) over projected edges inside Z; 0 for singletons."""
    ids = sorted({int(v) for v in members})
    if len(ids) < 2:
        return 0.0
    local = [projection.position[v] for v in ids]
    inner = projection.sign[local][:, local]
    edges = inner.nnz // 2
    return 2.0 * edges / (len(ids) * (len(ids) - 1))


def zone_quality(zone, phi: np.ndarray, projection) -> float:
    """Quality of a zone: mean Phi over members times density."""
    values = np.asarray(phi, dtype=np.float64)[list(zone.members)]
    return float(values.mean()) * density(zone.members, projection)


def count_unbalanced(zones: Sequence, projection) -> int:
    """Number of zones whose induced projection fails the balance test."""
    return sum(1 for zone in zones if not balance_test(projection.induced(zone.members)).balanced)
