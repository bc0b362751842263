"""
ZoneGraph Configuration
Defaults in config/config.json, user files and flag overrides merged on top.

- Unknown keys anywhere in a user file or override raise ConfigError
- None in a user file is a value (e.g. governance.k = null lifts the cap);
  None among flag overrides is skipped (argparse leaves unset flags as None)
- Typed parameter objects are built with build_params, which routes every
  value through the dataclass' own validation
"""

import copy
import json
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Type, TypeVar, Union

from .errors import ConfigError
from .logs import get_logger

logger = get_logger('config')

ROOT_DIR = Path(__file__).resolve().parent.parent
CONFIG_DIR = ROOT_DIR / 'config'
DEFAULT_CONFIG_FILE = CONFIG_DIR / 'config.json'

# sections whose keys are free-form (checked later by the dataclass they feed)
FREE_SECTIONS = ('eval.generator',)

T = TypeVar('T')


def load_defaults() -> dict:
    """Read the shipped defaults."""
    try:
        with open(DEFAULT_CONFIG_FILE, 'r', encoding='utf-8') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read default config {DEFAULT_CONFIG_FILE}: {e}") from e


def merge_config(base: Mapping[str, Any], overrides: Mapping[str, Any], path: str = '',
                 skip_none: bool = False) -> dict:
    """Deep-merge overrides into a copy of base.

    With skip_none, None-valued overrides leave the base value alone.

    Raises:
        ConfigError: An override names a key base does not have, or replaces
            a section with a scalar
    """
    merged = copy.deepcopy(dict(base))
    for key, value in overrides.items():
        where = f"{path}.{key}" if path else key
        if key not in merged:
            raise ConfigError(f"unknown config key '{where}'")
        if value is None and skip_none:
            continue
        if isinstance(merged[key], dict) and where not in FREE_SECTIONS:
            if not isinstance(value, Mapping):
                raise ConfigError(f"config key '{where}' must be an object")
            merged[key] = merge_config(merged[key], value, where, skip_none)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_config(path: Optional[Union[str, Path]] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> dict:
    """Defaults, then an optional user JSON file, then flag overrides.

    Args:
        path: User config file (same layout as config/config.json)
        overrides: Nested dict of flag values; None leaves a default alone

    Returns:
        dict: The merged configuration

    Raises:
        ConfigError: Unreadable file or unknown keys
    """
    config = load_defaults()
    if path is not None:
        try:
            with open(path, 'r', encoding='utf-8') as f:
                user = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        if not isinstance(user, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        config = merge_config(config, user)
        logger.debug("merged config file %s", path)
    if overrides:
        config = merge_config(config, overrides, skip_none=True)
    return config


def build_params(cls: Type[T], section: Mapping[str, Any], **extra) -> T:
    """Instantiate a parameter dataclass from a config section.

    Lists become tuples so the frozen dataclasses stay hashable.

    Raises:
        ConfigError: Unknown field or a value the dataclass rejects
    """
    if not is_dataclass(cls):
        raise TypeError(f"{cls!r} is not a dataclass")
    names = {f.name for f in fields(cls)}
    values = dict(section)
    values.update(extra)
    unknown = sorted(set(values) - names)
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {', '.join(unknown)}")
    values = {key: tuple(value) if isinstance(value, list) else value for key, value in values.items()}
    try:
        return cls(**values)
    except TypeError as e:
        raise ConfigError(f"bad {cls.__name__} values: {e}") from e
