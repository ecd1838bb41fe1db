"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class CTQError(Exception):
    """Base class for all errors raised by ctq."""


class ValidationError(CTQError, ValueError):
    """Input does not describe a valid canonical channel or basis."""


class NegativeAmplitude(ValidationError):
    pass


class MuOutOfRange(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class A0Zero(ValidationError):
    pass


class DomainError(CTQError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class CaseMismatch(CTQError, ValueError):
    pass


class UnsupportedGeneralCase(CTQError):
    """The analytic optimum is not available for a0..a4 and sin(mu) all nonzero."""


class ConsistencyError(CTQError, ArithmeticError):
    """Two independently computed quantities disagree beyond roundoff."""
