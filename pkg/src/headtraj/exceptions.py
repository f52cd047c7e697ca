"""headtraj exceptions."""


class HeadTrajError(Exception):
    """Base exception."""


class PreconditionError(HeadTrajError):
    """An operation was called with inputs outside its contract."""


class InvalidRotationError(PreconditionError):
    """Matrix is not a proper rotation (orthonormality or determinant check failed)."""


class DegenerateInputError(PreconditionError):
    """Input is geometrically degenerate (rank-deficient, zero path, non-finite)."""


class ConfigError(HeadTrajError):
    """Configuration error."""


class FileFormatError(HeadTrajError):
    """Malformed or inconsistent JSON file."""


class SolverError(HeadTrajError):
    """Optimization failed."""
