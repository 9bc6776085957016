"""Exception and warning types raised across the package."""


class XRealignError(ValueError):
    """Base class for every domain error raised by this package."""


class NotHermitian(XRealignError):
    pass


class TraceViolation(XRealignError):
    pass


class NegativeEigenvalue(XRealignError):
    def __init__(self, message, eigenvalue):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotXShaped(XRealignError):
    def __init__(self, message, entries):
        super().__init__(message)
        self.entries = entries


class DomainError(XRealignError):
    pass


class InvalidState(XRealignError):
    pass


class BranchUndefined(XRealignError):
    pass


class UnknownFamily(XRealignError):
    pass


class UnknownCriterion(XRealignError):
    pass


class GridTooLarge(XRealignError):
    pass


class NoTransition(XRealignError):
    pass


class NumericalClamp(RuntimeWarning):
    """A radicand that should be non-negative rounded slightly below zero and was clamped."""
