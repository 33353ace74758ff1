"""
Exception hierarchy for the aggregation simulator.
"""

from typing import Iterable, Optional


class DTBASError(Exception):
    """Base class for every error raised by the simulator."""


class DomainError(DTBASError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(DomainError):
    """A simulation configuration violates a constraint."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ProtocolError(DTBASError):
    """A message violates the aggregation protocol (replay or misrouting)."""


class AvailabilityError(DTBASError):
    """Data required by an operation has not arrived yet."""

    def __init__(self, message: str, missing: Iterable[int] = ()):
        self.missing = sorted(missing)
        if self.missing:
            message = f"{message} (missing: {', '.join(str(i) for i in self.missing)})"
        super().__init__(message)


class CsvParseError(DomainError):
    """A CSV row could not be parsed."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class SchemaError(DomainError):
    """A CSV file is well-formed row by row but inconsistent as a whole."""


class ReportIOError(DTBASError, OSError):
    """A report could not be written or read."""

    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{path}: {message}")
