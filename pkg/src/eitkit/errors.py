"""Exception hierarchy.

Validation errors map to CLI exit status 1, numerical failures to 2.
"""


class EITError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(EITError, ValueError):
    pass


class InvalidArgumentError(ValidationError):
    pass


class GeometryError(ValidationError):
    pass


class ResolutionError(ValidationError):
    pass


class SizeError(ValidationError):
    pass


class NumericalError(EITError, ArithmeticError):
    pass


class SingularityError(NumericalError):
    """Kernel evaluated at a coincident point pair."""


class IllConditionedNoiseError(NumericalError):
    pass


class DegenerateSpectrumError(NumericalError):
    pass


class NoChannelError(NumericalError):
    pass


class UnsupportedOperationError(EITError, TypeError):
    pass


class ResolutionWarning(UserWarning):
    """Receive grid too coarse to resolve the field."""
