"""
ZoneGraph Results
Metric rows, summary rows and their CSV files.

Column order follows the dataclass field order and never changes between
runs; empty cells mean "not measured for this protocol".
"""

from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import List, Optional, Sequence, Union

from common.files import read_csv, write_csv


@dataclass
class MetricRow:
    """One (seed, grid point, method) measurement."""
    protocol: str
    family: str
    seed: int
    grid: str
    method: str = 'zonegraph'
    alpha: Optional[float] = None
    eta: Optional[float] = None
    q: Optional[float] = None
    theta: Optional[float] = None
    jitter: Optional[float] = None
    tau: Optional[float] = None
    m: Optional[float] = None
    scoring_mode: Optional[str] = None
    r: Optional[float] = None
    t_star: Optional[int] = None
    converged: Optional[bool] = None
    wall_clock_ms: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f1: Optional[float] = None
    node_precision: Optional[float] = None
    node_recall: Optional[float] = None
    node_f1: Optional[float] = None
    hungarian_jaccard: Optional[float] = None
    selected: Optional[bool] = None
    unbalanced_zones: Optional[int] = None
    atlas_size: Optional[int] = None
    coverage: Optional[float] = None
    mean_jaccard: Optional[float] = None
    churn: Optional[float] = None
    tau_churn: Optional[float] = None
    stability: Optional[float] = None
    false_collapse_rate: Optional[float] = None
    shock_accepted: Optional[bool] = None
    shock_factor: Optional[float] = None
    r_post: Optional[float] = None


RESULT_COLUMNS = [f.name for f in fields(MetricRow)]

# numeric columns that get summarized across seeds
METRIC_COLUMNS = [
    'r', 't_star', 'wall_clock_ms', 'theta',
    'precision', 'recall', 'f1', 'node_precision', 'node_recall', 'node_f1',
    'hungarian_jaccard', 'unbalanced_zones', 'atlas_size', 'coverage', 'mean_jaccard',
    'churn', 'tau_churn', 'stability', 'false_collapse_rate', 'shock_factor', 'r_post',
]


@dataclass(frozen=True)
class SummaryRow:
    protocol: str
    grid: str
    method: str
    metric: str
    n: int
    mean: float
    sd: float
    ci95: float


SUMMARY_COLUMNS = [f.name for f in fields(SummaryRow)]


def write_results(rows: Sequence[MetricRow], path: Union[str, Path]) -> Path:
    return write_csv(path, RESULT_COLUMNS, (astuple(row) for row in rows))


def write_summary(rows: Sequence[SummaryRow], path: Union[str, Path]) -> Path:
    return write_csv(path, SUMMARY_COLUMNS, (astuple(row) for row in rows))


def read_results(path: Union[str, Path]) -> List[dict]:
    """Rows of a results CSV as dicts of strings (empty string = not measured)."""
    return read_csv(path)
