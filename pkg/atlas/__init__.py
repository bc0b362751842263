"""
ZoneGraph Atlas Module

Zone scoring, overlap governance, hysteresis refresh and reports.
"""

from .governance import (
    ScoringMode,
    GovernanceParams,
    Atlas,
    zone_id,
    jaccard,
    boundary_flows,
    zone_mass,
    score,
    atlas_update,
    atlas_refresh,
    coverage,
    mean_jaccard,
)

from .refresh import (
    local_refresh_region,
    local_refresh,
)

from .report import (
    REPORT_COLUMNS,
    ZoneReport,
    zone_report,
    write_atlas_report,
)

__all__ = [
    'ScoringMode',
    'GovernanceParams',
    'Atlas',
    'zone_id',
    'jaccard',
    'boundary_flows',
    'zone_mass',
    'score',
    'atlas_update',
    'atlas_refresh',
    'coverage',
    'mean_jaccard',
    'local_refresh_region',
    'local_refresh',
    'REPORT_COLUMNS',
    'ZoneReport',
    'zone_report',
    'write_atlas_report',
]
