"""
ZoneGraph Common Module

Errors, logging, configuration and atomic file helpers shared by every package.
"""

from .errors import (
    ZoneGraphError,
    GraphFormatError,
    GraphValidationError,
    DegeneratePriorError,
    ConfigError,
    EmptyFamilyError,
    PlotError,
    DomainRejection,
    ShockRejected,
    EditRejected,
    IsolationViolation,
)

from .logs import (
    LOGGER_NAME,
    get_logger,
    setup_logging,
)

from .config import (
    DEFAULT_CONFIG_FILE,
    load_defaults,
    merge_config,
    load_config,
    build_params,
)

from .files import (
    format_value,
    atomic_write_text,
    atomic_write_bytes,
    write_text_group,
    dumps_json,
    write_json,
    read_json,
    render_csv,
    write_csv,
    read_csv,
    parse_optional_float,
)

__all__ = [
    # Errors
    'ZoneGraphError',
    'GraphFormatError',
    'GraphValidationError',
    'DegeneratePriorError',
    'ConfigError',
    'EmptyFamilyError',
    'PlotError',
    'DomainRejection',
    'ShockRejected',
    'EditRejected',
    'IsolationViolation',
    # Logging
    'LOGGER_NAME',
    'get_logger',
    'setup_logging',
    # Config
    'DEFAULT_CONFIG_FILE',
    'load_defaults',
    'merge_config',
    'load_config',
    'build_params',
    # Files
    'format_value',
    'atomic_write_text',
    'atomic_write_bytes',
    'write_text_group',
    'dumps_json',
    'write_json',
    'read_json',
    'render_csv',
    'write_csv',
    'read_csv',
    'parse_optional_float',
]
