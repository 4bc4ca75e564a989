"""Exception types raised across the package."""


class SmoothRankError(Exception):
    """Base class for all package-specific errors."""


class InvalidInstanceError(SmoothRankError, ValueError):
    """Problem instance violates its invariants (bad shapes, labels, masks)."""


class DegenerateInstanceError(SmoothRankError, ValueError):
    """Instance is degenerate for the requested operation (e.g. all-zero start)."""


class DecompositionError(SmoothRankError, RuntimeError):
    """A numerical matrix decomposition failed to converge."""


class DivergenceError(SmoothRankError, RuntimeError):
    """Solver produced a non-finite objective value."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class BoundUndefinedError(SmoothRankError, ValueError):
    """Recovery-bound hypothesis fails (nonpositive denominator)."""


class TrivialNullSpaceError(SmoothRankError, ValueError):
    """Observation operator keeps every coordinate; nothing to sample."""


class SchemaError(SmoothRankError, ValueError):
    """Input file does not match the expected schema."""


class ParseError(SmoothRankError, ValueError):
    """A cell in an input file could not be parsed."""

    def __init__(self, message: str, row: int | None = None, column: str | int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class UnsupportedAttributeError(SchemaError):
    """ARFF attribute of a kind the loader does not support (string, date, relational)."""


class DegenerateColumnError(SmoothRankError, ValueError):
    """Feature column has too few observed entries to standardize."""


class EmptyTrainingError(SmoothRankError, ValueError):
    """Block loss would remove the label observations of every row."""


class UndefinedAUCError(SmoothRankError, ValueError):
    """AUC is undefined because the truth contains a single class."""
