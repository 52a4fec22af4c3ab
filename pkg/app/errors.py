"""
Exception types raised by the library.

Everything derives from ValueError so that callers catching plain ValueError
(the convention in the settings layer) keep working.
"""

from typing import Any, Optional


class OpEntropyError(ValueError):
    """Base class for all library errors."""


class DimensionMismatchError(OpEntropyError):
    """Operands have incompatible shapes."""


class SpectrumError(OpEntropyError):
    """Spectrum outside the admissible interval beyond clamping tolerance."""


class DomainError(OpEntropyError):
    """A scalar function is undefined at an eigenvalue of its argument."""

    def __init__(self, message: str, eigenvalue: Optional[float] = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class PreconditionError(OpEntropyError):
    """An operation was called outside its documented preconditions."""


class ParameterError(OpEntropyError):
    """A catalog parameter is out of range."""


class QuadratureError(OpEntropyError):
    """Quadrature error estimate above the requested tolerance."""

    def __init__(self, message: str, estimate: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate


class InfiniteEntropyError(OpEntropyError):
    """A finite relative entropy was required but the value is +∞."""

    def __init__(self, message: str, value: Any = None):
        super().__init__(message)
        self.value = value


class ConvergenceError(OpEntropyError):
    """A limit or a bisection did not converge."""


class MonotonicityViolationError(OpEntropyError):
    """A truncation sequence that must be non-decreasing decreased."""

    def __init__(self, message: str, index: Optional[int] = None, drop: Optional[float] = None):
        super().__init__(message)
        self.index = index
        self.drop = drop


class InternalConsistencyError(OpEntropyError):
    """Round-off budget exceeded or an eigensolver failure."""


class ConfigError(OpEntropyError):
    """Invalid run configuration; `field` names the offending entry."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field
