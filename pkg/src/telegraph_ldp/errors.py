"""Exception types.

Validation problems derive from :class:`ValidationError` (a ``ValueError``);
numerical breakdowns derive from :class:`NumericalError`. The CLI maps the
first family to exit status 1 and the second to exit status 2.
"""


class TelegraphError(Exception):
    pass


class ValidationError(TelegraphError, ValueError):
    pass


class NumericalError(TelegraphError, ArithmeticError):
    pass


class NonPositiveParameter(ValidationError):
    pass


class AlphaOutOfRange(ValidationError):
    pass


class NonPositiveHorizon(ValidationError):
    pass


class NonPositiveTime(ValidationError):
    pass


class TimeOutOfRange(ValidationError):
    pass


class InvalidInterval(ValidationError):
    pass


class OutOfSupport(ValidationError):
    pass


class UnstableRegime(ValidationError):
    pass


class InsufficientLevels(ValidationError):
    pass


class EmptyWindow(ValidationError):
    pass


class QuadratureFailure(NumericalError):
    pass


class OptimizationFailure(NumericalError):
    pass


class ExplosionGuardTripped(NumericalError):
    pass


class BudgetExceeded(NumericalError):
    pass
