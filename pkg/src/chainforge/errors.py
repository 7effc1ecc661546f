"""Exception hierarchy. Each error carries the CLI exit code it maps to."""


class ChainforgeError(Exception):
    exit_code = 1


class ParseError(ChainforgeError):
    """Malformed input file or flag value."""
    exit_code = 2


class DimensionMismatch(ParseError):
    """Vertex arity or chain dimension inconsistent with declared values."""
    exit_code = 2


class GridError(ParseError):
    """Grid frame fails an exactness requirement (orthogonality, rational volumes)."""
    exit_code = 2


class NotRepresentable(ParseError):
    """Chain cannot be written as constant multiplicities on complex cells."""
    exit_code = 2


class UnsupportedDimension(ChainforgeError):
    """Canonical overlay requested for a dimension without an overlay routine."""
    exit_code = 1


class InfinitySingularity(ChainforgeError):
    """A mapped vertex lies on the vanishing locus of a homogeneous coordinate."""
    exit_code = 1


class ContinuityError(ChainforgeError):
    """Adjacent map pieces disagree on a shared point."""
    exit_code = 1


class BudgetExceeded(ChainforgeError):
    """A deformation stage could not meet its mass budget after retries."""
    exit_code = 3

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class TilingFailed(BudgetExceeded):
    """Requested untiled-mass fraction unreachable above the minimum cube side."""
    exit_code = 3


class SizeExceeded(ChainforgeError):
    """Complex or LP instance larger than the configured cap."""
    exit_code = 4


class SelectionFailed(ChainforgeError):
    """Center sampling exhausted its rejection budget."""
    exit_code = 5


class InvalidFace(ChainforgeError):
    """Chain support violates the face's support precondition."""
    exit_code = 5


class ConeDegeneracy(ChainforgeError):
    """A clipping hyperplane of the projection fan passes through the center."""
    exit_code = 5
