"""Exception types shared across the toolkit."""


class QentropyError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(QentropyError):
    """An input object violates a structural invariant."""


class NotSquareError(ValidationError):
    pass


class NotHermitianError(ValidationError):
    pass


class NotPositiveError(ValidationError):
    pass


class TraceNotOneError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class InvalidRankError(ValidationError):
    pass


class InvalidSpecError(ValidationError):
    pass


class NotDiagonalError(ValidationError):
    pass


class PreconditionError(QentropyError):
    """An operation was called on objects outside its stated hypotheses."""


class NotStochasticError(PreconditionError):
    pass


class NotBistochasticError(PreconditionError):
    pass


class SupportViolationError(PreconditionError):
    pass


class DecompositionError(QentropyError):
    """The block decomposition machinery could not produce a certified answer."""


class NotAnAlgebraError(DecompositionError):
    pass


class AmbiguousGroupingError(DecompositionError):
    pass


class StructureMismatchError(DecompositionError):
    pass
