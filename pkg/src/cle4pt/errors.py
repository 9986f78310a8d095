"""Exception hierarchy shared by every module.

The CLI maps ``DomainError`` (and subclasses) to exit code 2 and
``ConvergenceError`` (and subclasses) to exit code 3.
"""


class Cle4ptError(Exception):
    pass


class DomainError(Cle4ptError, ValueError):
    """An argument lies outside the region where the operation is defined."""


class PoleError(DomainError):
    pass


class TrustRegionError(DomainError):
    """A series was asked for a value outside the radius it is trusted in."""


class OrderError(DomainError):
    """Marked boundary points are not in counterclockwise order."""


class DegenerateError(DomainError):
    pass


class UnsupportedError(DomainError):
    """A parameter combination that the implementation deliberately omits."""


class IrregularPointError(DomainError):
    pass


class MemoryBudgetError(DomainError):
    pass


class ConvergenceError(Cle4ptError, ArithmeticError):
    pass


class IllConditionedError(ConvergenceError):
    pass


class MatchingError(ConvergenceError):
    pass
