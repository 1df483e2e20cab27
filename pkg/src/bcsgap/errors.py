"""Exception hierarchy shared by the solver modules and the CLI."""


class BCSError(Exception):
    """Base class for all package errors."""


class ParameterError(BCSError, ValueError):
    pass


class EvaluationError(BCSError, ArithmeticError):
    pass


class AccuracyError(BCSError, ArithmeticError):
    pass


class KernelDomainError(BCSError, ValueError):
    pass


class PositivityError(BCSError, ValueError):
    pass


class StepSizeError(BCSError, ValueError):
    pass


class NumericalError(BCSError, ArithmeticError):
    pass


class NoTransitionError(NumericalError):
    pass


class BracketingError(NumericalError):
    pass


class ConfigError(BCSError, ValueError):
    """Malformed or physically invalid run configuration."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
