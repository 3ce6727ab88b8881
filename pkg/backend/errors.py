"""Exception types shared by the solvers, the CLI and the HTTP service."""

from __future__ import annotations


class ResilienceError(ValueError):
    """Input or domain error with a machine-readable ``code``."""

    code = "invalid-parameter"

    def __init__(self, message: str, code: str | None = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class GraphFormatError(ResilienceError):
    code = "graph-format"


class DegenerateSetError(ResilienceError):
    code = "degenerate-set"


class NotACutSetError(ResilienceError):
    code = "not-a-cut-set"


class UndefinedMeasureError(ResilienceError):
    code = "undefined-unsmoothed"


class DisconnectedGraphError(ResilienceError):
    code = "disconnected"


class NotRegularError(ResilienceError):
    code = "not-regular"


class TooLargeError(ResilienceError):
    """Raised when a search space exceeds the configured cap (CLI exit code 2)."""

    code = "too-large"


__all__ = [
    "DegenerateSetError",
    "DisconnectedGraphError",
    "GraphFormatError",
    "NotACutSetError",
    "NotRegularError",
    "ResilienceError",
    "TooLargeError",
    "UndefinedMeasureError",
]
