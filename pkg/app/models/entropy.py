"""
Data models for relative entropy values and kernel tolerances.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

from app.config.settings import settings
from app.errors import ConfigError, InternalConsistencyError

# Finite values in [−ROUNDOFF_FLOOR, 0) are clamped to 0
ROUNDOFF_FLOOR = 1e-9


class EntropyKind(Enum):
    FINITE = "finite"
    INFINITE = "infinite"


class InfiniteReason(Enum):
    KERNEL_MISMATCH_AT_0 = "KernelMismatchAt0"
    KERNEL_MISMATCH_AT_1 = "KernelMismatchAt1"


@dataclass(frozen=True)
class EntropyValue:
    kind: EntropyKind
    value: float = 0.0
    reason: Optional[InfiniteReason] = None

    @classmethod
    def finite(cls, value: float, scale: float = 1.0) -> "EntropyValue":
        """Finite value; round-off negatives are clamped, larger negatives are errors."""
        value = float(value)
        if math.isnan(value):
            raise InternalConsistencyError("relative entropy evaluated to NaN")
        if value < 0.0:
            floor = ROUNDOFF_FLOOR * max(1.0, scale)
            if value < -floor:
                raise InternalConsistencyError(
                    f"relative entropy {value:.6e} is negative beyond the round-off floor {floor:.1e}"
                )
            value = 0.0
        return cls(EntropyKind.FINITE, value)

    @classmethod
    def infinite(cls, reason: InfiniteReason) -> "EntropyValue":
        return cls(EntropyKind.INFINITE, math.inf, reason)

    @property
    def is_finite(self) -> bool:
        return self.kind is EntropyKind.FINITE

    def as_float(self) -> float:
        return self.value if self.is_finite else math.inf

    def to_dict(self) -> Dict[str, Any]:
        if self.is_finite:
            return {'kind': self.kind.value, 'value': self.value}
        return {'kind': self.kind.value, 'value': None, 'reason': self.reason.value}

    def __str__(self) -> str:
        if self.is_finite:
            return f"Finite({self.value:.12g})"
        return f"Infinite({self.reason.value})"


@dataclass(frozen=True)
class KernelPolicy:
    """When an eigenvalue counts as an endpoint, and when A = B on a kernel."""

    eigen_tol: float = 1e-10
    match_tol: float = 1e-10

    def __post_init__(self):
        for name in ('eigen_tol', 'match_tol'):
            value = getattr(self, name)
            if not 0.0 < value < 1e-6:
                raise ConfigError(f"{name} must lie in (0, 1e-6), got {value}", field=name)

    @classmethod
    def from_settings(cls) -> "KernelPolicy":
        return cls(settings.EIGEN_TOL, settings.MATCH_TOL)

    def tightened(self, eigen_tol: float = 1e-13) -> "KernelPolicy":
        """Same match tolerance with a sharper endpoint test, for witness re-verification."""
        return KernelPolicy(min(eigen_tol, self.eigen_tol), self.match_tol)

    def to_dict(self) -> Dict[str, float]:
        return {'eigen_tol': self.eigen_tol, 'match_tol': self.match_tol}
