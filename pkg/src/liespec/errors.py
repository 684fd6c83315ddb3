"""Exception hierarchy shared by every module of the package."""


class LieSpecError(Exception):
    """Base class for all errors raised by liespec."""


class DimensionError(LieSpecError, ValueError):
    pass


class SingularMatrixError(LieSpecError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class DegenerateBasisError(LieSpecError):
    pass


class NotClosedError(LieSpecError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ClassificationError(LieSpecError):
    def __init__(self, message, classification=None):
        super().__init__(message)
        self.classification = classification


class ToleranceError(LieSpecError):
    """A numerical decision could not be made consistently at the given tolerances."""


class CharacterError(LieSpecError, ValueError):
    pass


class FlagError(LieSpecError):
    pass


class NotApplicableError(LieSpecError):
    pass


class ConsistencyError(LieSpecError):
    """Two independent computations of the same quantity disagree."""


class InstanceError(LieSpecError, ValueError):
    """Malformed instance file."""
