"""
ZoneGraph Figures
Minimal SVG charts from protocol results CSVs.

- p1: mean iterations to tolerance per (alpha, eta), bars with 95% CI
- p2-node / p2-zone: node- or zone-level F1 at q* per method
- p3: churn histograms (mean-Jaccard and tau-thresholded)
- p4: atlas stability S_J per shock mass
"""

import io
from collections import OrderedDict
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from common.errors import PlotError
from common.files import atomic_write_bytes, parse_optional_float
from common.logs import get_logger

from .metrics import confidence_interval
from .results import read_results

logger = get_logger('evaluation.plots')

FIGURES = {
    'p1': {'protocol': 'p1', 'columns': ('alpha', 'eta', 't_star'),
           'xlabel': 'damping alpha', 'ylabel': 'iterations to tolerance t*'},
    'p2-node': {'protocol': 'p2', 'columns': ('method', 'node_f1', 'selected'),
                'xlabel': 'method', 'ylabel': 'node-level F1 at q*'},
    'p2-zone': {'protocol': 'p2', 'columns': ('method', 'f1', 'selected'),
                'xlabel': 'method', 'ylabel': 'zone-level F1 at q*'},
    'p3': {'protocol': 'p3', 'columns': ('churn', 'tau_churn'),
           'xlabel': 'atlas churn', 'ylabel': 'seeds'},
    'p4': {'protocol': 'p4', 'columns': ('m', 'stability', 'shock_accepted'),
           'xlabel': 'shock mass m', 'ylabel': 'stability S_J'},
}

CHURN_BINS = 20

STYLE = {
    'svg.hashsalt': 'zonegraph',
    'svg.fonttype': 'path',
    'font.size': 10,
    'axes.grid': True,
    'grid.alpha': 0.3,
}


def _values(rows: Sequence[dict], column: str) -> List[float]:
    return [parse_optional_float(row[column]) for row in rows if row.get(column, '') != '']


def _grouped(rows: Sequence[dict], key: str, column: str) -> "OrderedDict[str, Tuple[float, float]]":
    groups: "OrderedDict[str, List[float]]" = OrderedDict()
    for row in rows:
        if row.get(column, '') == '':
            continue
        groups.setdefault(row[key], []).append(parse_optional_float(row[column]))
    return OrderedDict((name, confidence_interval(values)[::2]) for name, values in groups.items())


def _bars(ax, labels: Sequence[str], stats: Sequence[Tuple[float, float]], offset=0.0, width=0.8, label=None):
    if not labels:
        raise PlotError("no plottable values for this figure")
    x = np.arange(len(labels)) + offset
    means = [mean for mean, _ in stats]
    errors = [ci for _, ci in stats]
    ax.bar(x, means, width=width, yerr=errors, capsize=3, label=label)
    return x


def _draw_p1(ax, rows):
    alphas = sorted({row['alpha'] for row in rows}, key=float)
    etas = sorted({row['eta'] for row in rows}, key=float)
    width = 0.8 / max(len(etas), 1)
    for j, eta in enumerate(etas):
        subset = [row for row in rows if row['eta'] == eta]
        stats = _grouped(subset, 'alpha', 't_star')
        ordered = [stats.get(alpha, (0.0, 0.0)) for alpha in alphas]
        _bars(ax, alphas, ordered, offset=(j - (len(etas) - 1) / 2) * width, width=width, label=f"eta={eta}")
    ax.set_xticks(np.arange(len(alphas)))
    ax.set_xticklabels(alphas)
    ax.legend()


def _draw_p2(ax, rows, column):
    chosen = [row for row in rows if row['selected'] == 'true']
    stats = _grouped(chosen, 'method', column)
    _bars(ax, list(stats), list(stats.values()))
    ax.set_xticks(np.arange(len(stats)))
    ax.set_xticklabels(list(stats))
    ax.set_ylim(0.0, 1.05)


def churn_histogram(rows: Sequence[dict]) -> Dict[str, np.ndarray]:
    """Counts of both churn measures over CHURN_BINS equal bins of [0, 1].

    Returns:
        {'edges': CHURN_BINS + 1 bin edges, 'churn': counts, 'tau_churn': counts}

    Raises:
        PlotError: No row has a churn value
    """
    churn_values = _values(rows, 'churn')
    if not churn_values:
        raise PlotError("no churn values for this figure")
    edges = np.linspace(0.0, 1.0, CHURN_BINS + 1)
    return {
        'edges': edges,
        'churn': np.histogram(churn_values, bins=edges)[0],
        'tau_churn': np.histogram(_values(rows, 'tau_churn'), bins=edges)[0],
    }


def _draw_p3(ax, rows):
    hist = churn_histogram(rows)
    edges = hist['edges']
    for column, label in (('churn', 'mean-Jaccard churn'), ('tau_churn', 'tau-thresholded churn')):
        ax.hist(edges[:-1], bins=edges, weights=hist[column], alpha=0.6, label=label)
    ax.legend()


def _draw_p4(ax, rows):
    accepted = [row for row in rows if row['shock_accepted'] == 'true']
    stats = _grouped(accepted, 'm', 'stability')
    masses = sorted(stats, key=float)
    _bars(ax, masses, [stats[m] for m in masses])
    ax.set_xticks(np.arange(len(masses)))
    ax.set_xticklabels(masses)
    ax.set_ylim(0.0, 1.05)


def render_figure(rows: Sequence[dict], figure: str) -> bytes:
    """Render one figure to SVG bytes.

    Raises:
        PlotError: Unknown figure id, missing columns or no data rows
    """
    if figure not in FIGURES:
        raise PlotError(f"unknown figure '{figure}' (choose from {', '.join(FIGURES)})")
    spec = FIGURES[figure]
    if not rows:
        raise PlotError("results file has no data rows")
    missing = [c for c in ('protocol',) + spec['columns'] if c not in rows[0]]
    if missing:
        raise PlotError(f"results file lacks columns {missing}")
    rows = [row for row in rows if row['protocol'] == spec['protocol']]
    if not rows:
        raise PlotError(f"no {spec['protocol']} rows for figure '{figure}'")

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        try:
            if figure == 'p1':
                _draw_p1(ax, rows)
            elif figure == 'p2-node':
                _draw_p2(ax, rows, 'node_f1')
            elif figure == 'p2-zone':
                _draw_p2(ax, rows, 'f1')
            elif figure == 'p3':
                _draw_p3(ax, rows)
            else:
                _draw_p4(ax, rows)
            ax.set_xlabel(spec['xlabel'])
            ax.set_ylabel(spec['ylabel'])
            buffer = io.BytesIO()
            fig.savefig(buffer, format='svg', bbox_inches='tight', facecolor='white',
                        metadata={'Date': None})
        finally:
            plt.close(fig)
    return buffer.getvalue()


def plot_results(results_path: Union[str, Path], figure: str, out_path: Union[str, Path]) -> Path:
    """Read a results CSV and write the figure as SVG."""
    svg = render_figure(read_results(results_path), figure)
    written = atomic_write_bytes(out_path, svg)
    logger.info("wrote figure %s to %s", figure, written)
    return written
