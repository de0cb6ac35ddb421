"""Exception types raised by the numerical layers."""


class CommonBathError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateFrequency(CommonBathError, ValueError):
    pass


class QuadratureFailure(CommonBathError, RuntimeError):
    pass


class NotPhaseCovariant(CommonBathError, ValueError):
    pass


class NonDiagonalizable(CommonBathError, RuntimeError):
    pass


class NoSlowMode(CommonBathError, ValueError):
    pass


class DegenerateWindow(CommonBathError, ValueError):
    pass


class DegenerateDenominator(CommonBathError, ZeroDivisionError):
    pass


class CPViolation(CommonBathError, RuntimeError):
    """A map or state has eigenvalues below the positivity tolerance."""


class InvalidCapacitance(CommonBathError, ValueError):
    pass


class InvalidConfig(CommonBathError, ValueError):
    pass
