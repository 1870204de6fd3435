"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary domain errors (bad indices,
mismatched dimensions); the classes below exist where callers need to tell
failure modes apart, e.g. for CLI exit codes.
"""


class FormatError(ValueError):
    """Malformed input file (FCIDUMP, Pauli-sum text, config)."""


class ConsistencyError(ValueError):
    """Input data contradicts itself, e.g. duplicate integrals that disagree."""


class ResourceLimitError(RuntimeError):
    """Request exceeds a hard size cap (dense matrices, state vectors)."""


class NumericalError(RuntimeError):
    """A computation produced non-finite or otherwise unusable numbers."""
