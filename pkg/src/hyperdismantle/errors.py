"""Exception hierarchy for hypernetwork dismantling.

Every error carries a stable ``code`` so the CLI and callers can branch on the
failure kind without parsing messages.
"""

from __future__ import annotations


class HyperDismantleError(ValueError):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message: str | None = None) -> None:
        super().__init__(message or self.code)

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class NodeNotFoundError(HyperDismantleError):
    code = "node-not-found"


class EmptyHypernetworkError(HyperDismantleError):
    code = "empty-hypernetwork"


class InvalidDenominatorError(HyperDismantleError):
    code = "invalid-denominator"


class InvalidConfigError(HyperDismantleError):
    code = "invalid-config"


class EmptyHyperedgeError(HyperDismantleError):
    code = "empty-hyperedge"


class StaleCacheError(HyperDismantleError):
    code = "stale-cache"


class NoActionsError(HyperDismantleError):
    code = "no-actions"


class InsufficientExperienceError(HyperDismantleError):
    code = "insufficient-experience"


class EmptyTraceError(HyperDismantleError):
    code = "empty-trace"


class EmptyDatasetError(HyperDismantleError):
    code = "empty-dataset"


class MalformedLineError(HyperDismantleError):
    """Raised by the loaders; ``line_number`` is 1-based."""

    code = "malformed-line"

    def __init__(self, line_number: int, message: str) -> None:
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class CheckpointVersionError(HyperDismantleError):
    code = "checkpoint-version"
