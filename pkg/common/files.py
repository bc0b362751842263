"""
ZoneGraph File Operations
Atomic, deterministic writers for every artifact the CLI emits.

- Every write goes to a temp file in the target directory, then os.replace
- Floats are written in shortest round-trip form
- Paths are validated before anything is touched
"""

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Optional, Sequence, Union

from .errors import ZoneGraphError

PathLike = Union[str, Path]


def _validate_path(file_path: PathLike) -> bool:
    """Validate an output path.

    Args:
        file_path: Path to validate

    Returns:
        bool: True if the path is usable
    """
    if not file_path:
        return False
    text = str(file_path)
    if '\x00' in text:
        return False
    try:
        Path(text).resolve()
        return True
    except (OSError, ValueError):
        return False


def _safe_path(file_path: PathLike) -> Path:
    """Get a resolved path or raise if invalid.

    Args:
        file_path: Path to validate and resolve

    Returns:
        Path: Resolved absolute path

    Raises:
        ZoneGraphError: If the path is unusable
    """
    if not _validate_path(file_path):
        raise ZoneGraphError(f"Invalid or unsafe path: {file_path!r}")
    return Path(str(file_path)).resolve()


def format_value(value: Any) -> str:
    """Render a cell value for CSV output.

    Floats use repr (shortest round-trip), None is an empty cell,
    booleans are 'true'/'false'.
    """
    if value is None:
        return ''
    if hasattr(value, 'item') and not isinstance(value, (str, bytes)):
        # numpy scalar
        return format_value(value.item())
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        return repr(float(value))
    return str(value)


def atomic_write_text(file_path: PathLike, content: str) -> Path:
    """Write text atomically.

    Args:
        file_path: Destination
        content: Full file content

    Returns:
        Path: The resolved destination
    """
    target = _safe_path(file_path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix='.tmp', dir=str(target.parent))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(content)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def atomic_write_bytes(file_path: PathLike, content: bytes) -> Path:
    """Binary twin of atomic_write_text."""
    target = _safe_path(file_path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix='.tmp', dir=str(target.parent))
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(content)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def write_text_group(files: Mapping[PathLike, str]) -> List[Path]:
    """Write several text files so that a failure leaves none of them behind.

    Every file is staged to a temp file next to its target first; targets are
    only replaced once all of them have been staged.

    Args:
        files: Destination -> full content

    Returns:
        List[Path]: Resolved destinations in input order
    """
    staged = []
    try:
        for file_path, content in files.items():
            target = _safe_path(file_path)
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix='.tmp', dir=str(target.parent))
            staged.append((tmp_name, target))
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
                f.write(content)
    except BaseException:
        for tmp_name, _ in staged:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
        raise
    for tmp_name, target in staged:
        os.replace(tmp_name, target)
    return [target for _, target in staged]


def dumps_json(data: Any, indent: int = 2) -> str:
    """Canonical JSON text: fixed indent, trailing newline, no ASCII escaping."""
    return json.dumps(data, indent=indent, ensure_ascii=False, allow_nan=False) + '\n'


def write_json(file_path: PathLike, data: Any, indent: int = 2) -> Path:
    """Write data to a JSON file atomically.

    Args:
        file_path: Path to JSON file
        data: Data to write (dict or list)
        indent: JSON indentation

    Returns:
        Path: Written file
    """
    return atomic_write_text(file_path, dumps_json(data, indent=indent))


def read_json(file_path: PathLike) -> Any:
    """Read a JSON file.

    Args:
        file_path: Path to JSON file

    Returns:
        Parsed JSON

    Raises:
        OSError: If unreadable
        json.JSONDecodeError: If malformed
    """
    path = _safe_path(file_path)
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows to CSV text with deterministic formatting."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(file_path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV file atomically.

    Args:
        file_path: Destination
        header: Column names
        rows: Row value sequences in header order

    Returns:
        Path: Written file
    """
    return atomic_write_text(file_path, render_csv(header, rows))


def read_csv(file_path: PathLike) -> List[dict]:
    """Read a CSV file into a list of dicts (all values as strings)."""
    path = _safe_path(file_path)
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return list(csv.DictReader(f))


def parse_optional_float(text: Optional[str]) -> Optional[float]:
    """Parse a CSV cell written by format_value back into a float."""
    if text is None or text == '':
        return None
    return float(text)
