"""Exception hierarchy.

Every error raised by this package derives from :class:`InfoExplainError`.
Each class carries an ``exit_code`` used by the CLI: 1 for usage/validation
problems, 2 for data problems, 3 for solver problems.
"""


class InfoExplainError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


# -- validation / usage (exit code 1) ---------------------------------------

class DimensionMismatch(InfoExplainError):
    """Array shapes are inconsistent with each other."""


class NotPositiveSemidefinite(InfoExplainError):
    """Covariance failed the symmetry or eigenvalue check."""


class InvalidCount(InfoExplainError):
    """A count parameter (e.g. number of samples to draw) is out of range."""


class InvalidSparsity(InfoExplainError):
    """A sparsity budget is negative or exceeds the feature dimension."""


class InvalidFloor(InfoExplainError):
    """A variance floor must be strictly positive."""


class GeometryTooLarge(InfoExplainError):
    """The neighborhood geometry does not fit inside the image at any target."""


class ConfigError(InfoExplainError):
    """A configuration file could not be parsed or validated."""


# -- data (exit code 2) ------------------------------------------------------

class DataError(InfoExplainError):
    exit_code = 2


class TooFewSamples(DataError):
    """Not enough rows for the requested computation."""


class MalformedHeader(DataError):
    """Sample CSV header does not match ``x1,...,xn,yhat,u``."""


class NonNumericCell(DataError):
    """A CSV cell is not a finite decimal number.

    Carries 1-based ``row`` and ``column`` locations (header is row 1).
    """

    def __init__(self, row, column, cell):
        self.row = row
        self.column = column
        self.cell = cell
        super().__init__(
            f"non-numeric cell {cell!r} at row {row}, column {column}"
        )


class RaggedRow(DataError):
    """A CSV data row has the wrong number of cells."""


class IoFailure(DataError):
    """An underlying file operation failed."""


class UnsupportedFormat(DataError):
    """Image file is not PGM (P2/P5) or single-channel PNG."""


class CorruptFile(DataError):
    """Image file is recognized but truncated or inconsistent."""


# -- solver (exit code 3) ----------------------------------------------------

class SolverError(InfoExplainError):
    exit_code = 3


class FactorizationFailure(SolverError):
    """Covariance is numerically indefinite and cannot be factorized."""


class DimensionTooLarge(SolverError):
    """Exhaustive enumeration requested beyond the n <= 25 cap."""


class SingularSystem(SolverError):
    """Unregularized normal equations are rank-deficient."""
