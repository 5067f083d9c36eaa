"""Exception hierarchy shared by every module.

Each class maps to a distinct CLI exit code (see :mod:`nested_drc.cli`).
"""


class DRCError(Exception):
    """Base class for toolkit errors."""


class InputError(DRCError, ValueError):
    """Invalid vertex id, empty graph, or similar bad input."""


class ParseError(InputError):
    """Malformed graph or block-spec text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(InputError):
    """A block representation violates the tree-degenerate rules."""


class ParameterError(DRCError, ValueError):
    """Out-of-range numeric parameter (alpha >= beta, trials = 0, ...)."""


class ResourceError(DRCError):
    """An enumeration or table budget was exceeded."""
