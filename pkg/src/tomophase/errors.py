"""Exception and warning types raised by tomophase."""


class TomophaseError(ValueError):
    """Base class for all validation errors in the package."""


class NumericalFailure(TomophaseError):
    """Base class for failures of a numerical solve (singular, inconsistent)."""


class InvalidSize(TomophaseError):
    pass


class SizeMismatch(TomophaseError):
    pass


class EvenPadding(TomophaseError):
    pass


class SlopeOutOfRange(TomophaseError):
    pass


class SingularNodes(NumericalFailure):
    pass


class InconsistentSpectrum(NumericalFailure):
    pass


class StrongCTFailure(TomophaseError):
    pass


class ZeroExtraDirection(TomophaseError):
    pass


class GammaOutOfRange(TomophaseError):
    pass


class KadecViolation(TomophaseError):
    pass


class WrongNodeCount(TomophaseError):
    pass


class NegativeIntensity(TomophaseError):
    pass


class SupportOverflow(TomophaseError):
    pass


class NonPositiveInput(TomophaseError):
    pass


class BudgetExceeded(TomophaseError):
    pass


class MalformedFile(TomophaseError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at byte {position})"
        super().__init__(message)
        self.position = position


class VersionMismatch(TomophaseError):
    pass


class IllConditionedWarning(RuntimeWarning):
    """Emitted when a linear solve succeeds but its condition estimate is large."""
