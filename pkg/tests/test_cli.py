"""End-to-end tests for the zonegraph command line."""

import json

import pytest

from common.files import read_csv
from zonegraph import CONFIDENCE_COLUMNS, EXIT_OK, EXIT_REJECTED, EXIT_USAGE, main

STAR = {
    'nodes': [{'id': name, 'psi': 0.5} for name in ('hub', 'a', 'b', 'c', 'd')],
    'edges': [{'src': leaf, 'dst': 'hub', 'type': 'supports', 'sign': 1, 'weight': 1.0}
              for leaf in ('a', 'b', 'c', 'd')],
}


@pytest.fixture
def g1_file(tmp_path):
    path = tmp_path / 'g1.json'
    assert main(['generate', '--family', 'g1', '--n', '40', '--d', '3', '--seed', '1', '--out', str(path)]) == EXIT_OK
    return path


def write(path, data):
    path.write_text(json.dumps(data), encoding='utf-8')
    return path


# ═══════════════════════════════════════════════════════════════════
# Graph commands
# ═══════════════════════════════════════════════════════════════════

class TestGenerate:

    def test_rerun_is_byte_identical(self, tmp_path, g1_file):
        again = tmp_path / 'again.json'
        main(['generate', '--family', 'g1', '--n', '40', '--d', '3', '--seed', '1', '--out', str(again)])
        assert again.read_bytes() == g1_file.read_bytes()
        data = json.loads(g1_file.read_text(encoding='utf-8'))
        assert len(data['nodes']) == 40
        assert len(data['edges']) == 120

    def test_planted_blocks(self, tmp_path):
        out = tmp_path / 'g2.json'
        assert main(['generate', '--family', 'g2', '--n', '100', '--k-zones', '3', '--block-size', '10',
                     '--out', str(out)]) == EXIT_OK
        truth = json.loads((tmp_path / 'g2.truth.json').read_text(encoding='utf-8'))
        assert truth['family'] == 'g2'
        assert [len(block) for block in truth['blocks']] == [10, 10, 10]

    def test_default_blocks_must_fit(self, tmp_path):
        out = tmp_path / 'g2.json'
        assert main(['generate', '--family', 'g2', '--n', '100', '--k-zones', '3', '--out', str(out)]) == EXIT_USAGE
        assert not out.exists()

    def test_failed_truth_file_leaves_no_graph(self, tmp_path):
        blocker = tmp_path / 'blocker'
        blocker.write_text('', encoding='utf-8')
        out = tmp_path / 'g2.json'
        argv = ['generate', '--family', 'g2', '--n', '100', '--k-zones', '3', '--block-size', '10',
                '--out', str(out), '--truth', str(blocker / 'truth.json')]
        assert main(argv) == EXIT_USAGE
        assert not out.exists()
        assert [p.name for p in tmp_path.iterdir()] == ['blocker']

    def test_invalid_size(self, tmp_path):
        assert main(['generate', '--family', 'g1', '--n', '3', '--d', '8', '--out', str(tmp_path / 'x.json')]) == EXIT_USAGE
        assert not (tmp_path / 'x.json').exists()


class TestPropagate:

    def test_confidence_file(self, tmp_path, g1_file):
        out = tmp_path / 'phi.csv'
        assert main(['propagate', str(g1_file), '--out', str(out), '--alpha', '0.4']) == EXIT_OK
        rows = read_csv(out)
        assert list(rows[0]) == CONFIDENCE_COLUMNS
        assert len(rows) == 40
        assert all(0.0 <= float(row['phi']) <= 1.0 for row in rows)
        assert rows[0]['converged'] == 'true'

    def test_rerun_is_byte_identical(self, tmp_path, g1_file):
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        main(['propagate', str(g1_file), '--out', str(first)])
        main(['propagate', str(g1_file), '--out', str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_non_convergence_still_succeeds(self, tmp_path, g1_file):
        out = tmp_path / 'phi.csv'
        assert main(['propagate', str(g1_file), '--out', str(out), '--t-max', '1', '--eps', '1e-15']) == EXIT_OK
        assert read_csv(out)[0]['converged'] == 'false'

    def test_missing_graph(self, tmp_path):
        assert main(['propagate', str(tmp_path / 'none.json'), '--out', str(tmp_path / 'phi.csv')]) == EXIT_USAGE

    def test_malformed_graph(self, tmp_path, capsys):
        bad = tmp_path / 'bad.json'
        bad.write_text('{"nodes": [\n{"id": "a", "psi": }]}', encoding='utf-8')
        assert main(['propagate', str(bad), '--out', str(tmp_path / 'phi.csv')]) == EXIT_USAGE
        assert 'line 2' in capsys.readouterr().err

    def test_bad_flag(self, tmp_path, g1_file):
        assert main(['propagate', str(g1_file), '--out', str(tmp_path / 'p.csv'), '--alpha', 'fast']) == EXIT_USAGE
        assert main(['propagate', str(g1_file), '--out', str(tmp_path / 'p.csv'), '--alpha', '1.5']) == EXIT_USAGE


class TestZonesAndAtlas:

    def test_zones_from_confidence_file(self, tmp_path, g1_file):
        phi = tmp_path / 'phi.csv'
        main(['propagate', str(g1_file), '--out', str(phi)])
        out = tmp_path / 'zones.csv'
        assert main(['zones', str(g1_file), '--confidence', str(phi), '--q', '0.5', '--out', str(out)]) == EXIT_OK
        rows = read_csv(out)
        members = [label for row in rows for label in row['members'].split()]
        assert len(members) == len(set(members))
        assert 0 < len(members) <= 40

    def test_atlas_report(self, tmp_path, g1_file):
        out = tmp_path / 'atlas.csv'
        assert main(['atlas', str(g1_file), '--q', '0.5', '--k', '2', '--tau', '0.3', '--out', str(out)]) == EXIT_OK
        rows = read_csv(out)
        assert 1 <= len(rows) <= 2
        assert rows[0]['zone_id'] == 'Z001'
        assert rows[0]['scoring_mode'] == 'raw'

    def test_atlas_rerun_is_byte_identical(self, tmp_path, g1_file):
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        for out in (first, second):
            main(['atlas', str(g1_file), '--theta', '0.4', '--out', str(out)])
        assert first.read_bytes() == second.read_bytes()

    def test_unknown_config_key(self, tmp_path, g1_file):
        config = write(tmp_path / 'cfg.json', {'governance': {'tua': 0.3}})
        out = tmp_path / 'atlas.csv'
        assert main(['--config', str(config), 'atlas', str(g1_file), '--out', str(out)]) == EXIT_USAGE

    def test_empty_graph(self, tmp_path):
        empty = tmp_path / 'empty.json'
        empty.write_text('', encoding='utf-8')
        out = tmp_path / 'atlas.csv'
        assert main(['atlas', str(empty), '--out', str(out)]) == EXIT_OK
        assert read_csv(out) == []


class TestShock:

    def test_applied(self, tmp_path, g1_file):
        spec = write(tmp_path / 'shock.json', {'targets': {'v0001': 0.2, 'v0002': 0.1}})
        out = tmp_path / 'shocked.json'
        assert main(['shock', str(g1_file), '--spec', str(spec), '--out', str(out), '--alpha', '0.4']) == EXIT_OK
        log = json.loads((tmp_path / 'shocked.strengths.json').read_text(encoding='utf-8'))
        assert log['r_post'] < 1.0
        assert set(log['strengths']) == {'v0001', 'v0002'}
        assert len(read_csv(tmp_path / 'shocked.phi.csv')) == 40

    def test_failed_log_file_leaves_no_outputs(self, tmp_path, g1_file):
        spec = write(tmp_path / 'shock.json', {'targets': {'v0001': 0.2}})
        blocker = write(tmp_path / 'blocker', {})
        out = tmp_path / 'shocked.json'
        argv = ['shock', str(g1_file), '--spec', str(spec), '--out', str(out), '--alpha', '0.4',
                '--strengths-out', str(blocker / 'log.json')]
        assert main(argv) == EXIT_USAGE
        assert not out.exists()
        assert not (tmp_path / 'shocked.phi.csv').exists()

    def test_non_contractive_graph_rejected(self, tmp_path):
        graph = write(tmp_path / 'star.json', STAR)
        spec = write(tmp_path / 'shock.json', {'targets': {'hub': 1.0}})
        out = tmp_path / 'shocked.json'
        assert main(['shock', str(graph), '--spec', str(spec), '--out', str(out), '--alpha', '0.6']) == EXIT_REJECTED
        assert not out.exists()

    @pytest.mark.parametrize("spec", [
        {'targets': {'nobody': 0.5}},
        {'targets': {'hub': 1.5}},
        {'targets': {'hub': 0.5}, 'gamma': 1.0},
        {'targets': []},
    ])
    def test_bad_spec(self, tmp_path, spec):
        graph = write(tmp_path / 'star.json', STAR)
        path = write(tmp_path / 'shock.json', spec)
        assert main(['shock', str(graph), '--spec', str(path), '--out', str(tmp_path / 'o.json')]) == EXIT_USAGE


# ═══════════════════════════════════════════════════════════════════
# Evaluation
# ═══════════════════════════════════════════════════════════════════

class TestEvalAndPlot:

    def run_p1(self, out_dir):
        return main(['eval', 'p1', '--seeds', '2', '--n', '60', '--out-dir', str(out_dir)])

    def test_eval_writes_results(self, tmp_path):
        assert self.run_p1(tmp_path) == EXIT_OK
        rows = read_csv(tmp_path / 'p1_results.csv')
        assert len(rows) == 24
        summary = read_csv(tmp_path / 'p1_summary.csv')
        assert {row['metric'] for row in summary} >= {'t_star', 'r'}
        run = json.loads((tmp_path / 'p1_run.json').read_text(encoding='utf-8'))
        assert len(run['run_id']) == 12
        assert run['config']['generator'] == {'n': 60}

    def test_eval_rerun_is_byte_identical(self, tmp_path):
        first, second = tmp_path / 'first', tmp_path / 'second'
        self.run_p1(first)
        self.run_p1(second)
        for name in ('p1_results.csv', 'p1_summary.csv', 'p1_run.json'):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_eval_bad_family(self, tmp_path):
        assert main(['eval', 'p1', '--family', 'g2', '--out-dir', str(tmp_path)]) == EXIT_USAGE

    def test_plot(self, tmp_path):
        self.run_p1(tmp_path)
        svg = tmp_path / 'p1.svg'
        assert main(['plot', str(tmp_path / 'p1_results.csv'), '--figure', 'p1', '--out', str(svg)]) == EXIT_OK
        assert b'<svg' in svg.read_bytes()

    def test_plot_wrong_protocol(self, tmp_path):
        self.run_p1(tmp_path)
        svg = tmp_path / 'p2.svg'
        assert main(['plot', str(tmp_path / 'p1_results.csv'), '--figure', 'p2-node', '--out', str(svg)]) == EXIT_USAGE
        assert not svg.exists()
