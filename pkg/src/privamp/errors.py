"""Exception types shared by every module."""


class PrivampError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZero(PrivampError, ZeroDivisionError):
    pass


class SpecMismatch(PrivampError, ValueError):
    pass


class ZeroConditioning(PrivampError, ValueError):
    pass


class TooLarge(PrivampError, MemoryError):
    pass


class SupportMismatch(PrivampError, ValueError):
    pass


class ShapeError(PrivampError, ValueError):
    pass


class NotNormalized(PrivampError, ValueError):
    pass


class DomainError(PrivampError, ValueError):
    pass


class DegenerateVariance(PrivampError, ValueError):
    pass
