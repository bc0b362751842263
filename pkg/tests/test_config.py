"""Tests for layered configuration, logging setup and the atomic file helpers."""

import json
import logging

import numpy as np
import pytest

from atlas import GovernanceParams
from common import (
    ConfigError,
    build_params,
    format_value,
    load_config,
    load_defaults,
    merge_config,
    read_csv,
    render_csv,
    setup_logging,
    write_csv,
    write_json,
    write_text_group,
)
from common.logs import LOGGER_NAME, get_logger
from propagation import PropagationParams


# ═══════════════════════════════════════════════════════════════════
# Config
# ═══════════════════════════════════════════════════════════════════

class TestMergeConfig:

    def setup_method(self):
        self.base = {'propagation': {'alpha': 0.6, 'eta': 1.0}, 'eval': {'generator': {}, 'seeds': 30}}

    def test_override(self):
        merged = merge_config(self.base, {'propagation': {'alpha': 0.8}})
        assert merged['propagation'] == {'alpha': 0.8, 'eta': 1.0}
        assert self.base['propagation']['alpha'] == 0.6

    def test_none_flag_is_skipped(self):
        assert merge_config(self.base, {'propagation': {'alpha': None}}, skip_none=True) == self.base

    def test_none_from_file_is_a_value(self):
        merged = merge_config(self.base, {'propagation': {'alpha': None}})
        assert merged['propagation'] == {'alpha': None, 'eta': 1.0}

    def test_section_cannot_be_null(self):
        with pytest.raises(ConfigError):
            merge_config(self.base, {'propagation': None})

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="propagation.beta"):
            merge_config(self.base, {'propagation': {'beta': 1.0}})

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            merge_config(self.base, {'plotting': {}})

    def test_section_replaced_by_scalar(self):
        with pytest.raises(ConfigError):
            merge_config(self.base, {'propagation': 3})

    def test_free_section_takes_any_key(self):
        merged = merge_config(self.base, {'eval': {'generator': {'n': 200, 'd': 4}}})
        assert merged['eval']['generator'] == {'n': 200, 'd': 4}


class TestLoadConfig:

    def test_defaults(self):
        config = load_defaults()
        assert config['propagation']['alpha'] == 0.6
        assert config['governance']['tau'] == 0.3
        assert config['zones']['theta'] is None

    def test_user_file_then_overrides(self, tmp_path):
        path = tmp_path / 'user.json'
        path.write_text(json.dumps({'propagation': {'alpha': 0.4, 'eta': 0.5}}), encoding='utf-8')
        config = load_config(path, {'propagation': {'alpha': 0.2}})
        assert config['propagation']['alpha'] == 0.2
        assert config['propagation']['eta'] == 0.5

    def test_file_can_lift_atlas_cap(self, tmp_path):
        path = tmp_path / 'user.json'
        path.write_text(json.dumps({'governance': {'k': None}, 'zones': {'theta': None}}), encoding='utf-8')
        config = load_config(path, {'governance': {'k': None, 'tau': None}})
        assert config['governance']['k'] is None
        assert config['governance']['tau'] == 0.3
        assert build_params(GovernanceParams, config['governance']).k is None

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"propagation": ', encoding='utf-8')
        with pytest.raises(ConfigError):
            load_config(path)
        with pytest.raises(ConfigError):
            load_config(tmp_path / 'missing.json')

    def test_file_must_hold_object(self, tmp_path):
        path = tmp_path / 'list.json'
        path.write_text('[1, 2]', encoding='utf-8')
        with pytest.raises(ConfigError):
            load_config(path)


class TestBuildParams:

    def test_from_defaults(self):
        config = load_defaults()
        params = build_params(PropagationParams, config['propagation'])
        assert params == PropagationParams()
        assert build_params(GovernanceParams, config['governance']) == GovernanceParams()

    def test_unknown_field(self):
        with pytest.raises(ConfigError, match="gamma"):
            build_params(PropagationParams, {'gamma': 1.0})

    def test_rejected_value(self):
        with pytest.raises(ConfigError):
            build_params(PropagationParams, {'alpha': 1.2})

    def test_extra_wins(self):
        assert build_params(PropagationParams, {'alpha': 0.5}, alpha=0.3).alpha == 0.3

    def test_not_a_dataclass(self):
        with pytest.raises(TypeError):
            build_params(dict, {})


# ═══════════════════════════════════════════════════════════════════
# Logging
# ═══════════════════════════════════════════════════════════════════

class TestLogging:

    def test_hierarchy(self):
        assert get_logger().name == LOGGER_NAME
        assert get_logger('atlas').name == f"{LOGGER_NAME}.atlas"

    def test_file_handler(self, tmp_path):
        log_file = tmp_path / 'logs' / 'run.log'
        logger = setup_logging(log_file, verbose=False)
        get_logger('test').info("written to file only")
        for handler in logger.handlers:
            handler.flush()
        assert "written to file only" in log_file.read_text(encoding='utf-8')

    def test_repeat_setup_does_not_stack(self):
        setup_logging()
        logger = setup_logging(verbose=True)
        assert len(logger.handlers) == 1
        assert logger.handlers[0].level == logging.INFO


# ═══════════════════════════════════════════════════════════════════
# Files
# ═══════════════════════════════════════════════════════════════════

class TestFiles:

    @pytest.mark.parametrize("value, text", [
        (None, ''), (True, 'true'), (False, 'false'), (0.1, '0.1'), (1e-12, '1e-12'), (3, '3'),
        ('Z001', 'Z001'),
    ])
    def test_format_value(self, value, text):
        assert format_value(value) == text

    def test_numpy_scalar(self):
        assert format_value(np.float64(0.25)) == '0.25'
        assert format_value(np.int64(4)) == '4'

    def test_csv(self, tmp_path):
        path = write_csv(tmp_path / 'out' / 'table.csv', ['a', 'b'], [(1, None), (0.5, True)])
        assert path.read_text(encoding='utf-8') == render_csv(['a', 'b'], [(1, None), (0.5, True)])
        assert read_csv(path) == [{'a': '1', 'b': ''}, {'a': '0.5', 'b': 'true'}]

    def test_json_is_canonical(self, tmp_path):
        path = write_json(tmp_path / 'data.json', {'b': 1, 'a': [0.1]})
        assert path.read_text(encoding='utf-8') == '{\n  "b": 1,\n  "a": [\n    0.1\n  ]\n}\n'

    def test_no_temp_files_left(self, tmp_path):
        write_csv(tmp_path / 'table.csv', ['a'], [(1,)])
        assert [p.name for p in tmp_path.iterdir()] == ['table.csv']

    def test_group_write(self, tmp_path):
        written = write_text_group({tmp_path / 'a.txt': 'a\n', tmp_path / 'sub' / 'b.txt': 'b\n'})
        assert [p.name for p in written] == ['a.txt', 'b.txt']
        assert (tmp_path / 'sub' / 'b.txt').read_text(encoding='utf-8') == 'b\n'

    def test_group_failure_writes_nothing(self, tmp_path):
        blocker = tmp_path / 'blocker'
        blocker.write_text('', encoding='utf-8')
        with pytest.raises(OSError):
            write_text_group({tmp_path / 'a.txt': 'a\n', blocker / 'b.txt': 'b\n'})
        assert [p.name for p in tmp_path.iterdir()] == ['blocker']
