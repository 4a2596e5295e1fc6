"""Exception hierarchy shared by every module of the engine."""

from __future__ import annotations


class ExoHomError(Exception):
    """Base class for all engine errors."""


class DimensionMismatchError(ExoHomError, ValueError):
    pass


class UnsupportedCoefficientError(ExoHomError, TypeError):
    pass


class NotWellDefinedError(ExoHomError):
    """An induced map on a subquotient depends on the representative."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SchemaError(ExoHomError, ValueError):
    """Malformed model or problem file."""


class ModelValidationError(ExoHomError):
    """Structure data fails d^2 = 0 or the window misses the zero mode."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class WindowOverflowError(ExoHomError):
    def __init__(self, frequency):
        super().__init__(f"frequency {list(frequency)} lies outside the model window")
        self.frequency = tuple(frequency)


class ParityViolationError(ExoHomError):
    def __init__(self, message: str, term=None):
        super().__init__(message)
        self.term = term


class UnsupportedInputError(ExoHomError):
    pass


class PreconditionError(ExoHomError):
    pass


class OmegaNotClosedError(PreconditionError):
    pass


class ReebNotKernelError(PreconditionError):
    pass


class StructuralError(ExoHomError):
    """Inputs are inconsistent with the algebraic structure being built."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ContradictionError(ExoHomError):
    """An internal consistency guarantee failed; indicates a bug."""


class NotConstructibleError(ExoHomError):
    pass
