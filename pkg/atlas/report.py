"""
ZoneGraph Atlas Report
Per-zone summary rows and the atlas report CSV.
"""

from dataclasses import astuple, dataclass
from pathlib import Path
from typing import List, Union

import numpy as np

from common.files import write_csv

from .governance import Atlas, boundary_flows, jaccard, zone_id

REPORT_COLUMNS = ['zone_id', 'size', 'score', 'scoring_mode', 'mean_phi', 'min_phi',
                  'cut_minus', 'loss_plus', 'nn_jaccard']


@dataclass(frozen=True)
class ZoneReport:
    zone_id: str
    size: int
    score: float
    scoring_mode: str
    mean_phi: float
    min_phi: float
    cut_minus: float
    loss_plus: float
    nn_jaccard: float


def zone_report(atlas: Atlas, phi: np.ndarray, graph) -> List[ZoneReport]:
    """One row per atlas zone, nearest-neighbor overlap 0 for a single zone.

    Args:
        atlas: Atlas (scores are taken as recorded)
        phi: Confidence vector
        graph: BeliefGraph for boundary flows

    Returns:
        Reports in atlas rank order
    """
    phi = np.asarray(phi, dtype=np.float64)
    reports = []
    for rank, (zone, value) in enumerate(zip(atlas.zones, atlas.scores)):
        cut, loss = boundary_flows(zone, graph)
        overlaps = [jaccard(zone.members, other.members)
                    for j, other in enumerate(atlas.zones) if j != rank]
        values = phi[list(zone.members)]
        reports.append(ZoneReport(
            zone_id=zone_id(rank),
            size=zone.size,
            score=float(value),
            scoring_mode=atlas.scoring_mode,
            mean_phi=float(values.mean()),
            min_phi=float(values.min()),
            cut_minus=cut,
            loss_plus=loss,
            nn_jaccard=max(overlaps) if overlaps else 0.0,
        ))
    return reports


def write_atlas_report(reports: List[ZoneReport], path: Union[str, Path]) -> Path:
    """Write report rows with the fixed column order."""
    return write_csv(path, REPORT_COLUMNS, (astuple(report) for report in reports))
