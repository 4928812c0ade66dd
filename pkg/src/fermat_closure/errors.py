"""Exception hierarchy shared by all modules."""


class FermatClosureError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(FermatClosureError, ValueError):
    pass


class ZeroInverse(FermatClosureError, ZeroDivisionError):
    pass


class InvalidRing(FermatClosureError, ValueError):
    pass


class NotHomogeneous(FermatClosureError, ValueError):
    pass


class DegreeMismatch(FermatClosureError, ValueError):
    pass


class EmptyGenerators(FermatClosureError, ValueError):
    pass


class ExponentOverflow(FermatClosureError, OverflowError):
    """An exponent or a linear system exceeds the configured budget."""


class UnbalancedDegrees(FermatClosureError, ValueError):
    pass


class NotCofinite(FermatClosureError, ValueError):
    pass


class HypothesisFailed(FermatClosureError, ValueError):
    pass


class DenominatorZero(FermatClosureError, ZeroDivisionError):
    pass


class PDividesDenominator(FermatClosureError, ZeroDivisionError):
    pass


class ConfigInvalid(FermatClosureError, ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConsistencyFailure(FermatClosureError, RuntimeError):
    """Two independent routes disagree, or a published identity failed to hold.

    Carries a diagnostic dump so the offending inputs can be replayed.
    """

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


class SingularSystem(ConsistencyFailure):
    pass


class ZeroDeterminant(ConsistencyFailure):
    pass
