"""
Exception hierarchy for the library and the CLI.

Every error is a ValueError so callers that only guard against bad input keep
working; the CLI maps each class to an exit code.
"""


class KTreeError(ValueError):
    """Base class for all library errors."""

    exit_code = 1


class ScopeError(KTreeError):
    """A table scope is empty, unknown, mismatched, or above the size cap."""

    exit_code = 2


class DataError(KTreeError):
    """Malformed samples, joints, score tables, models or queries."""

    exit_code = 2


class NotAKTreeError(KTreeError):
    """A graph or creation order does not describe a k-tree."""

    exit_code = 2


class OracleCapError(KTreeError):
    """Exhaustive enumeration was requested above the configured cap."""

    exit_code = 2


class InfeasibleError(KTreeError):
    """No spanning k-tree satisfies the request (n <= k, or retained edges clash)."""

    exit_code = 3


class ZeroProbabilityEvidenceError(KTreeError):
    """Evidence has probability zero under the model."""

    exit_code = 4
