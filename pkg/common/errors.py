"""
ZoneGraph Errors
Exception hierarchy shared by every package.

Validation-style errors also derive from ValueError so callers that only
know the builtin still catch them.
"""

from typing import Optional


class ZoneGraphError(Exception):
    """Root of all ZoneGraph errors."""


class GraphFormatError(ZoneGraphError, ValueError):
    """Graph file could not be parsed."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class GraphValidationError(ZoneGraphError, ValueError):
    """Graph content violates a structural invariant."""


class DegeneratePriorError(ZoneGraphError, ValueError):
    """Credibility prior cannot be normalized (all-zero credibility)."""


class ConfigError(ZoneGraphError, ValueError):
    """Invalid or unknown configuration value."""


class EmptyFamilyError(ZoneGraphError, ValueError):
    """An operation needs a nonempty zone family or vector."""


class PlotError(ZoneGraphError, ValueError):
    """Results file does not match the figure schema."""


class DomainRejection(ZoneGraphError):
    """A guarded update was refused to keep the system well-posed."""


class ShockRejected(DomainRejection):
    """Backtracking could not restore contractivity for a shock."""


class EditRejected(DomainRejection):
    """Backtracking could not restore contractivity for an edit."""


class IsolationViolation(DomainRejection):
    """A reasoner proposal touched a target outside its zone."""

    def __init__(self, zone_id: str, target: object):
        self.zone_id = zone_id
        self.target = target
        super().__init__(f"zone {zone_id} proposed an out-of-zone target {target!r}")
