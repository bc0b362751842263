"""
ZoneGraph Zones Module

Balance testing, zone extraction and zone quality.
"""

from .balance import (
    BalanceResult,
    ConflictCertificate,
    balance_test,
    certificate_sign,
    coloring_is_valid,
    two_color,
)

from .extract import (
    Zone,
    make_zone,
    threshold_nodes,
    quantile_threshold,
    extract_zones,
)

from .quality import (
    density,
    zone_quality,
    count_unbalanced,
)

__all__ = [
    'BalanceResult',
    'ConflictCertificate',
    'balance_test',
    'certificate_sign',
    'coloring_is_valid',
    'two_color',
    'Zone',
    'make_zone',
    'threshold_nodes',
    'quantile_threshold',
    'extract_zones',
    'density',
    'zone_quality',
    'count_unbalanced',
]
