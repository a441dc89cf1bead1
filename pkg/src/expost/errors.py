"""Exception hierarchy shared by all modules."""


class ExpostError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ExpostError, ValueError):
    """An input object violates one of its invariants."""


class NonStochasticJoint(ValidationError):
    pass


class NegativeProbability(ValidationError):
    pass


class EmptySupport(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidStrategy(ValidationError):
    pass


class NotAnEquilibrium(ExpostError):
    """A check that is only defined for equilibria received a non-equilibrium."""


class InconsistentOutcomeMap(ValidationError):
    pass


class SizeCapExceeded(ExpostError):
    pass


class AsymmetricUnsupported(ValidationError):
    pass


class AsymmetricBenevolentUnsupported(AsymmetricUnsupported):
    pass


class NonInvertibleConjecture(ValidationError):
    pass


class EqualParams(ValidationError):
    pass


class UnreachableStatistic(ExpostError):
    pass
