"""Exception hierarchy shared across the toolkit.

The CLI maps these onto stable exit codes: UsageError -> 2, FormatError and
subclasses -> 3, everything else -> 4.
"""


class GreenspoofError(Exception):
    """Base class for all toolkit errors."""


class UsageError(GreenspoofError):
    """Caller violated a precondition (bad arguments, mixed dims, ...)."""


class FormatError(GreenspoofError):
    """A data file is malformed (bad magic, truncation, bad values)."""


class ProtocolError(FormatError):
    """Malformed protocol line; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class AssemblyError(FormatError):
    """Records and protocol entries cannot be joined into a dataset."""


class RunError(GreenspoofError):
    """A whole run failed (e.g. every grid cell errored)."""
