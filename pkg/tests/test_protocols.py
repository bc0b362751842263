"""Tests for the evaluation protocols and their aggregation."""

from collections import Counter

import numpy as np
import pytest

from atlas import GovernanceParams
from common.errors import ConfigError
from evaluation import EvalConfig, aggregate, run_cell, run_protocol, write_results
from evaluation.generators import GeneratorConfig, gen_g1
from evaluation.plots import CHURN_BINS, churn_histogram
from evaluation.protocols import governance_for_tau, jitter_weights, shock_targets
from evaluation.results import read_results
from propagation import PropagationParams

SMALL_G1 = {'n': 60, 'd': 3}
SMALL_G2 = {'n': 100, 'k_zones': 3, 'block_size': 20}
SMALL_G3 = {'n': 150, 'd': 4, 'cycles': 20}


# ═══════════════════════════════════════════════════════════════════
# Config
# ═══════════════════════════════════════════════════════════════════

class TestEvalConfig:

    def test_default_families(self):
        assert EvalConfig('p1', generator=SMALL_G1).resolved_family == 'g1'
        assert EvalConfig('p2', generator=SMALL_G2).resolved_family == 'g2'
        assert EvalConfig('p4', generator=SMALL_G3).resolved_family == 'g3'

    def test_shock_protocol_runs_on_any_family(self):
        assert EvalConfig('p4', family='g2', generator=SMALL_G2, shock_nodes=10).resolved_family == 'g2'

    @pytest.mark.parametrize("changes", [
        {'protocol': 'p5'},
        {'family': 'g2'},
        {'seeds': ()},
        {'generator': {'n': 60, 'seed': 3}},
        {'generator': {'n': 60, 'family': 'g3'}},
        {'q_grid': (1.5,)},
        {'jitters': (-0.1,)},
        {'masses': (50.0,)},
        {'workers': 0},
        {'alphas': (1.0,)},
    ])
    def test_invalid(self, changes):
        params = dict(protocol='p1', generator=SMALL_G1)
        params.update(changes)
        with pytest.raises(ConfigError):
            EvalConfig(**params)

    def test_generator_config_per_seed(self):
        config = EvalConfig('p1', generator=SMALL_G1)
        assert config.generator_config(7) == GeneratorConfig(family='g1', seed=7, n=60, d=3)

    def test_tau_keep_lifted(self):
        gov = governance_for_tau(GovernanceParams(), 0.9)
        assert gov.tau == 0.9
        assert gov.tau_keep == pytest.approx(0.95)
        assert governance_for_tau(GovernanceParams(), 0.3).tau_keep == GovernanceParams().tau_keep


# ═══════════════════════════════════════════════════════════════════
# Protocols
# ═══════════════════════════════════════════════════════════════════

class TestConvergenceProtocol:

    def setup_method(self):
        self.config = EvalConfig('p1', seeds=(0, 1), generator=SMALL_G1)
        self.rows = run_protocol(self.config)

    def test_grid(self):
        assert len(self.rows) == 24
        assert [row.seed for row in self.rows] == [0] * 12 + [1] * 12
        assert self.rows[0].grid == 'alpha=0.2;eta=0'
        assert self.rows[11].grid == 'alpha=0.8;eta=1'

    def test_small_alpha_converges(self):
        for row in self.rows:
            assert 0.0 <= row.r
            if row.alpha <= 0.4:
                assert row.converged
                assert row.t_star >= 1

    def test_no_timing_by_default(self):
        assert all(row.wall_clock_ms is None for row in self.rows)

    def test_timing(self):
        config = EvalConfig('p1', seeds=(0,), generator=SMALL_G1, alphas=(0.2,), etas=(0.0,),
                            record_timing=True)
        assert run_cell(config, 0)[0].wall_clock_ms >= 0.0

    def test_deterministic(self):
        assert run_protocol(self.config) == self.rows

    def test_workers_do_not_change_rows(self):
        parallel = EvalConfig('p1', seeds=(0, 1), generator=SMALL_G1, workers=2)
        assert run_protocol(parallel) == self.rows

    def test_seed_override(self):
        rows = run_protocol(self.config, seeds=[1])
        assert rows == self.rows[12:]

    def test_aggregate(self):
        summary = aggregate(self.rows)
        assert len({row.grid for row in summary}) == 12
        t_star = [row for row in summary if row.metric == 't_star']
        assert len(t_star) == 12
        assert all(row.n == 2 for row in t_star)
        first = [row.t_star for row in self.rows if row.grid == 'alpha=0.2;eta=0']
        assert t_star[0].mean == pytest.approx(np.mean(first))


class TestRecoveryProtocol:

    def setup_method(self):
        config = EvalConfig('p2', seeds=(0,), generator=SMALL_G2, q_grid=(0.5, 0.7, 0.9))
        self.rows = run_protocol(config)

    def test_rows_per_method(self):
        counts = Counter(row.method for row in self.rows)
        assert counts == {'zonegraph': 3, 'unsign_cl': 3, 'unsign_pro': 3}
        assert [row.grid for row in self.rows[:3]] == ['q=0.50', 'q=0.70', 'q=0.90']

    def test_one_selected_per_method(self):
        for method in ('zonegraph', 'unsign_cl', 'unsign_pro'):
            rows = [row for row in self.rows if row.method == method]
            selected = [row for row in rows if row.selected]
            assert len(selected) == 1
            assert selected[0].node_f1 == max(row.node_f1 for row in rows)

    def test_signed_zones_balanced(self):
        for row in self.rows:
            if row.method == 'zonegraph':
                assert row.unbalanced_zones == 0

    def test_threshold_rises_with_q(self):
        thetas = [row.theta for row in self.rows if row.method == 'zonegraph']
        assert thetas == sorted(thetas)

    def test_best_grid(self):
        best = [row for row in aggregate(self.rows) if row.grid == 'q=best']
        assert {row.method for row in best} == {'zonegraph', 'unsign_cl', 'unsign_pro'}
        assert all(row.n == 1 for row in best)


class TestJitterProtocol:

    def test_zero_jitter_is_still(self):
        config = EvalConfig('p3', seeds=(0,), generator=SMALL_G2, jitters=(0.0,), taus=(0.3, 0.6))
        rows = run_protocol(config)
        assert [row.grid for row in rows] == ['jitter=0;tau=0.3', 'jitter=0;tau=0.6']
        for row in rows:
            assert row.churn == 0.0
            assert row.tau_churn == 0.0
            assert row.atlas_size > 0
        assert rows[0].stability == 1.0

    def test_jittered_rows(self):
        config = EvalConfig('p3', seeds=(0,), generator=SMALL_G2, jitters=(0.05, 0.2))
        rows = run_protocol(config)
        assert len(rows) == 2
        for row in rows:
            assert 0.0 <= row.churn <= 1.0
            assert 0.0 <= row.coverage <= 1.0

    def test_jitter_weights(self):
        graph = gen_g1(GeneratorConfig(family='g1', n=50, d=3, seed=2))
        assert jitter_weights(graph, 0.0, 1) is graph
        jittered = jitter_weights(graph, 0.5, 1)
        assert jittered == jitter_weights(graph, 0.5, 1)
        assert jittered != graph
        assert all(edge.weight >= 0.0 for edge in jittered.edges)


class TestShockProtocol:

    def setup_method(self):
        self.params = PropagationParams(alpha=0.4, eta=1.0)

    def test_zero_mass_is_stable(self):
        config = EvalConfig('p4', seeds=(0,), generator=SMALL_G3, propagation=self.params,
                            masses=(0.0,), shock_nodes=10)
        row, = run_protocol(config)
        assert row.shock_accepted
        assert row.shock_factor == 1.0
        assert row.stability == 1.0
        assert row.r_post == pytest.approx(row.r)

    def test_mass_grid(self):
        config = EvalConfig('p4', seeds=(0,), generator=SMALL_G3, propagation=self.params,
                            masses=(0.5, 2.0), shock_nodes=10)
        rows = run_protocol(config)
        assert [row.grid for row in rows] == ['m=0.5', 'm=2']
        for row in rows:
            if row.shock_accepted:
                assert row.r_post < 1.0
                assert 0.0 <= row.stability <= 1.0
                assert row.false_collapse_rate is None

    def test_planted_family_reports_collapse(self):
        config = EvalConfig('p4', family='g2', seeds=(0,), generator=SMALL_G2, propagation=self.params,
                            masses=(0.0,), shock_nodes=10, shock_q=0.3)
        row, = run_protocol(config)
        assert row.shock_accepted
        assert row.false_collapse_rate is None or 0.0 <= row.false_collapse_rate <= 1.0

    def test_rejected_shocks_left_out_of_summary(self):
        config = EvalConfig('p4', seeds=(0,), generator=SMALL_G3, propagation=self.params,
                            masses=(0.0,), shock_nodes=10)
        rows = run_protocol(config)
        rows[0].shock_accepted = False
        assert aggregate(rows) == []

    def test_targets(self):
        targets = shock_targets(100, 10, 3)
        assert targets.tolist() == sorted(set(targets.tolist()))
        assert len(targets) == 10
        assert np.array_equal(targets, shock_targets(100, 10, 3))
        assert len(shock_targets(5, 10, 3)) == 5


# ═══════════════════════════════════════════════════════════════════
# Acceptance scale
# ═══════════════════════════════════════════════════════════════════

def summary_means(rows, metric):
    return {(row.grid, row.method): (row.mean, row.ci95) for row in aggregate(rows) if row.metric == metric}


@pytest.mark.slow
class TestProtocolAcceptance:

    def test_iterations_grow_with_alpha(self):
        config = EvalConfig('p1', seeds=tuple(range(5)), generator={'n': 500})
        rows = run_protocol(config)
        assert all(row.t_star >= 1 for row in rows)
        t_star = summary_means(rows, 't_star')
        for eta in ('0', '0.5', '1'):
            cells = [t_star[(f"alpha={alpha};eta={eta}", 'zonegraph')] for alpha in ('0.2', '0.4', '0.6', '0.8')]
            for (low, low_ci), (high, high_ci) in zip(cells, cells[1:]):
                assert low <= high + low_ci + high_ci

    def test_recovery_ordering(self):
        config = EvalConfig('p2', seeds=(0, 1, 2))
        rows = run_protocol(config)
        f1 = {method: mean for (grid, method), (mean, _) in summary_means(rows, 'f1').items()
              if grid == 'q=best'}
        assert 0.75 <= f1['unsign_cl'] <= 0.95
        assert f1['unsign_cl'] > f1['unsign_pro'] > f1['zonegraph']
        assert all(row.unbalanced_zones == 0 for row in rows if row.method == 'zonegraph')

    def test_churn_histogram(self, tmp_path):
        config = EvalConfig('p3', seeds=(0, 1, 2), jitters=(0.0, 0.05))
        rows = run_protocol(config)
        for row in rows:
            assert 0.0 <= row.churn <= 1.0
            if row.jitter == 0.0:
                assert row.churn == 0.0
        jittered = [row for row in rows if row.jitter == 0.05]
        hist = churn_histogram(read_results(write_results(jittered, tmp_path / 'p3_results.csv')))
        assert len(hist['edges']) == CHURN_BINS + 1
        assert hist['churn'].sum() == len(jittered)
        assert hist['tau_churn'].sum() == len(jittered)

    def test_shock_stability(self):
        config = EvalConfig('p4', seeds=(0, 1, 2), generator={'n': 1000},
                            propagation=PropagationParams(alpha=0.4, eta=1.0), masses=(0.0, 0.4))
        rows = run_protocol(config)
        accepted = [row for row in rows if row.shock_accepted]
        assert accepted
        assert all(row.r_post < 1.0 for row in accepted)
        assert all(row.stability == 1.0 for row in accepted if row.m == 0.0 and row.stability is not None)
        heavy = [row.stability for row in accepted if row.m == 0.4 and row.stability is not None]
        assert heavy
        assert np.mean(heavy) >= 0.5
