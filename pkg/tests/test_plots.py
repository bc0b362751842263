"""Tests for SVG figure rendering."""

import pytest

from common.errors import PlotError
from evaluation import MetricRow, write_results
from evaluation.plots import CHURN_BINS, FIGURES, churn_histogram, plot_results, render_figure
from evaluation.results import read_results


def p2_rows():
    rows = []
    for seed in range(3):
        for method, f1 in (('zonegraph', 0.8), ('unsign_cl', 0.5), ('unsign_pro', 0.4)):
            for q, selected in ((0.5, True), (0.7, False)):
                rows.append(MetricRow('p2', 'g2', seed, f"q={q:.2f}", method=method, q=q,
                                      f1=f1 - 0.1 * seed, node_f1=f1, selected=selected))
    return rows


def p4_rows():
    rows = []
    for seed in range(2):
        for m in (0.1, 0.2):
            rows.append(MetricRow('p4', 'g3', seed, f"m={m:g}", m=m, shock_accepted=True, stability=1.0 - m))
        rows.append(MetricRow('p4', 'g3', seed, 'm=0.4', m=0.4, shock_accepted=False))
    return rows


@pytest.fixture
def results_file(tmp_path):
    def make(rows):
        return write_results(rows, tmp_path / 'results.csv')
    return make


class TestRenderFigure:

    def test_known_figures(self):
        assert set(FIGURES) == {'p1', 'p2-node', 'p2-zone', 'p3', 'p4'}

    @pytest.mark.parametrize("figure", ['p2-node', 'p2-zone'])
    def test_recovery(self, tmp_path, results_file, figure):
        rows = read_results(results_file(p2_rows()))
        svg = render_figure(rows, figure)
        assert svg.lstrip().startswith(b'<?xml')
        assert b'<svg' in svg

    def test_stability_skips_rejected(self, results_file):
        rows = read_results(results_file(p4_rows()))
        assert b'<svg' in render_figure(rows, 'p4')

    def test_churn(self, results_file):
        rows = [MetricRow('p3', 'g2', seed, 'jitter=0.05;tau=0.3', churn=0.1 * seed, tau_churn=0.0)
                for seed in range(4)]
        assert b'<svg' in render_figure(read_results(results_file(rows)), 'p3')

    def test_deterministic(self, results_file):
        rows = read_results(results_file(p2_rows()))
        assert render_figure(rows, 'p2-node') == render_figure(rows, 'p2-node')

    def test_unknown_figure(self, results_file):
        with pytest.raises(PlotError):
            render_figure(read_results(results_file(p2_rows())), 'p5')

    def test_no_rows(self):
        with pytest.raises(PlotError):
            render_figure([], 'p1')

    def test_missing_columns(self):
        with pytest.raises(PlotError):
            render_figure([{'protocol': 'p1', 'alpha': '0.2'}], 'p1')

    def test_no_selected_rows(self, results_file):
        rows = [MetricRow('p2', 'g2', 0, 'q=0.50', node_f1=0.5, selected=False)]
        with pytest.raises(PlotError):
            render_figure(read_results(results_file(rows)), 'p2-node')

    def test_churn_undefined(self, results_file):
        rows = [MetricRow('p3', 'g2', 0, 'jitter=0.05;tau=0.3')]
        with pytest.raises(PlotError):
            render_figure(read_results(results_file(rows)), 'p3')


class TestPlotResults:

    def test_writes_svg(self, tmp_path, results_file):
        out = plot_results(results_file(p4_rows()), 'p4', tmp_path / 'figs' / 'p4.svg')
        assert out.exists()
        assert b'<svg' in out.read_bytes()

    def test_failure_writes_nothing(self, tmp_path):
        empty = write_results([], tmp_path / 'empty.csv')
        out = tmp_path / 'p1.svg'
        with pytest.raises(PlotError):
            plot_results(empty, 'p1', out)
        assert not out.exists()


class TestChurnHistogram:

    def setup_method(self):
        self.rows = [MetricRow('p3', 'g2', seed, 'jitter=0.05;tau=0.3', churn=0.1 * seed, tau_churn=0.0)
                     for seed in range(4)]

    def test_schema(self, results_file):
        hist = churn_histogram(read_results(results_file(self.rows)))
        assert set(hist) == {'edges', 'churn', 'tau_churn'}
        assert len(hist['edges']) == CHURN_BINS + 1
        assert hist['edges'][0] == 0.0 and hist['edges'][-1] == 1.0
        assert hist['churn'].shape == hist['tau_churn'].shape == (CHURN_BINS,)

    def test_counts_every_seed(self, results_file):
        hist = churn_histogram(read_results(results_file(self.rows)))
        assert hist['churn'].sum() == 4
        assert hist['tau_churn'][0] == 4

    def test_full_churn_in_last_bin(self, results_file):
        rows = [MetricRow('p3', 'g2', 0, 'jitter=1;tau=0.3', churn=1.0, tau_churn=1.0)]
        hist = churn_histogram(read_results(results_file(rows)))
        assert hist['churn'][-1] == 1
        assert hist['tau_churn'][-1] == 1

    def test_no_churn(self):
        with pytest.raises(PlotError):
            churn_histogram([{'churn': '', 'tau_churn': ''}])
