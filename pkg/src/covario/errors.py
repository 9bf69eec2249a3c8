class CovarioError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class DimensionMismatchError(CovarioError, ValueError):
    pass


class DegenerateBodyError(CovarioError, ValueError):
    """A body or intersection has empty interior where one is required."""


class TruncationError(CovarioError, ValueError):
    """A truncation box is too small for the sets it has to contain."""


class WitnessValidationError(CovarioError):
    """The recovered homothety witness does not reproduce the segment family."""

    def __init__(self, message, max_residual):
        super().__init__(message)
        self.max_residual = max_residual


class ClassificationError(CovarioError):
    pass
