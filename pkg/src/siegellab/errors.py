"""Exception hierarchy shared by every siegellab module.

The CLI maps any ``SiegelLabError`` to exit status 1 and prints the class
name, so the names below are part of the command-line contract.
"""


class SiegelLabError(Exception):
    """Base class for computation errors."""


class NotFundamental(SiegelLabError, ValueError):
    pass


class EqualCharacters(SiegelLabError, ValueError):
    pass


class PoleAtOne(SiegelLabError, ZeroDivisionError):
    pass


class AccuracyLoss(SiegelLabError):
    pass


class TailTooLarge(SiegelLabError):
    pass


class BoundaryZero(SiegelLabError):
    pass


class QuadratureNotConverged(SiegelLabError):
    pass


class CountMismatch(SiegelLabError):
    pass


class MaxSubdivisionDepth(SiegelLabError):
    pass


class OrderingViolation(SiegelLabError):
    pass


class NoValidK(SiegelLabError):
    pass


class UncertifiedInventory(SiegelLabError):
    pass


class ParameterOutOfRange(SiegelLabError, ValueError):
    pass


class PreconditionFailed(SiegelLabError):
    """Raised with ``condition`` naming the first violated hypothesis."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        msg = condition if not detail else f"{condition}: {detail}"
        super().__init__(msg)
