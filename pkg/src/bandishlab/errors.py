"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes, so raising the right class
matters more than the message wording.
"""

from __future__ import annotations


class BandishLabError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(BandishLabError):
    """Malformed notation or data file; carries human-readable coordinates."""

    def __init__(self, message: str, *, line: int | None = None, cell: int | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if cell is not None:
            loc.append(f"cell {cell}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.line = line
        self.cell = cell


class ValidationError(BandishLabError):
    """Annotation or manifest data fails a cross-reference or ordering check."""


class DataError(BandishLabError):
    """Loaded data is structurally valid but semantically impossible."""


class DomainError(BandishLabError):
    """Numeric input outside the mathematical domain of an operation."""


class OutOfRangeError(DomainError):
    """Value falls outside a covered grid or time range."""


class NotFoundError(BandishLabError):
    """Lookup of a line, syllable or file-backed entity failed."""


class InsufficientDataError(BandishLabError):
    """Operation needs more observations than were supplied."""


class ContractViolationError(BandishLabError):
    """Caller broke an interface precondition (e.g. mismatched string lengths)."""


class ConfigurationError(BandishLabError):
    """Parameter combination outside the documented valid ranges."""
