"""Exception hierarchy shared by every module of the package."""


class NTupleError(ValueError):
    """Base class for all errors raised by ``ntuple_erm``."""


class EmptySubset(NTupleError):
    pass


class FullSubset(NTupleError):
    pass


class LengthMismatch(NTupleError):
    pass


class EnumerationTooLarge(NTupleError):
    pass


class UnsupportedKind(NTupleError):
    pass


class SingularMixture(NTupleError):
    """The mixture system cannot be inverted (rank deficient or near-zero denominator)."""


class AsymmetricInput(NTupleError):
    pass


class NonFiniteScore(NTupleError):
    pass


class NonDifferentiableKind(NTupleError):
    pass


class EmptyInput(NTupleError):
    pass


class ShapeMismatch(NTupleError):
    pass


class DimensionMismatch(NTupleError):
    pass


class AcceptanceTooLow(NTupleError):
    pass


class MissingClass(NTupleError):
    pass


class NonFiniteRisk(NTupleError):
    pass


class ParseError(NTupleError):
    """Malformed input file; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
