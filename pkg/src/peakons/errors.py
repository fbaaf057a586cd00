"""Exception hierarchy.

Validation errors mean the input data violates a structural constraint and
the caller can fix it.  Numerical errors mean a mathematically guaranteed
property failed in finite precision; they usually signal precision
exhaustion rather than a genuine mathematical case.
"""


class PeakonError(Exception):
    """Base class for all library errors."""


class ValidationError(PeakonError):
    """Input data violates a structural constraint."""


class NonIncreasingPositions(ValidationError):
    pass


class NegativeDipole(ValidationError):
    pass


class NullAtom(ValidationError):
    """An atom with zero weight and zero dipole mass carries no data."""


class DipolePresent(ValidationError):
    """A collision-time snapshot has no classical peakon representation."""


class CoincidentPositions(ValidationError):
    pass


class InvalidSpectralData(ValidationError):
    """Eigenvalue/norming-constant pairs violate lambda * gamma^2 > 0,
    contain zero or repeated eigenvalues, or have mismatched lengths."""


class DocumentFormatError(ValidationError):
    """A JSON problem document does not match the expected schema."""


class NumericalError(PeakonError):
    """A guaranteed numerical property failed; indicates precision loss."""


class RootIsolationFailure(NumericalError):
    """Could not isolate the expected number of real simple roots."""


class CrossCheckFailure(NumericalError):
    """Two independent evaluations of the same quantity disagree."""


class PoleHit(NumericalError):
    """Evaluation point coincides with a pole."""


class DivisionByZeroInFraction(NumericalError):
    """An intermediate denominator of the continued fraction vanished."""


class ConsecutiveZeros(NumericalError):
    """The Hankel determinant table violates its guaranteed structure
    (two consecutive zeros, wrong terminal zero, or positivity failure)."""


class LogDomainError(NumericalError):
    """A reconstructed position ratio fell outside the logarithm domain."""


class OrderingViolation(NumericalError):
    """Reconstructed positions are not strictly increasing."""


class WindowDerivationFailure(NumericalError):
    """No bounded scan window with a provably dominant term exists."""


class ExtrapolationUnstable(NumericalError):
    """Successive extrapolants of a collision limit disagree."""


class StepSizeUnderflow(NumericalError):
    """The adaptive integrator failed to make progress."""
