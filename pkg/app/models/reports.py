"""
Result types of the certification, Klein-bound and projection-limit modules.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import ConfigError, PreconditionError
from app.models.entropy import EntropyValue
from app.models.operator import HermitianOperator

MAX_SCHEDULE_DIM = 512


class Verdict(Enum):
    CONSISTENT = "ConsistentWithMonotone"
    VIOLATION = "ViolationFound"


@dataclass(frozen=True)
class Witness:
    """Everything needed to re-evaluate a violating trial."""

    kind: str  # lowner | pinching | contraction
    defect: float
    seed: int
    trial: int
    A: Optional[HermitianOperator] = None
    B: Optional[HermitianOperator] = None
    X: Optional[np.ndarray] = None
    P: Optional[np.ndarray] = None
    points: Optional[Tuple[float, ...]] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'kind': self.kind, 'defect': self.defect, 'seed': self.seed, 'trial': self.trial}
        if self.points is not None:
            data['points'] = list(self.points)
        for name in ('A', 'B'):
            op = getattr(self, name)
            if op is not None:
                data[name] = op.to_dict()
        for name in ('X', 'P'):
            mat = getattr(self, name)
            if mat is not None:
                entry = {'rows': int(mat.shape[0]), 'cols': int(mat.shape[1]), 're': np.real(mat).tolist()}
                if np.iscomplexobj(mat) and np.any(np.imag(mat) != 0.0):
                    entry['im'] = np.imag(mat).tolist()
                data[name] = entry
        return data


@dataclass
class CertReport:
    verdict: Verdict
    trials: int
    worst_defect: float
    witness: Optional[Witness] = None
    mode: str = ""
    phi: str = ""
    seed: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.VIOLATION

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode': self.mode,
            'phi': self.phi,
            'seed': self.seed,
            'verdict': self.verdict.value,
            'trials': self.trials,
            'worst_defect': self.worst_defect,
            'witness': self.witness.to_dict() if self.witness else None,
            'details': self.details,
        }


@dataclass(frozen=True, eq=False)
class LownerMatrix:
    """Divided differences Dᵢⱼ = (φ′(xᵢ) − φ′(xⱼ))/(xᵢ − xⱼ), Dᵢᵢ = φ″(xᵢ)."""

    points: np.ndarray
    entries: np.ndarray

    @classmethod
    def build(cls, phi, points: Sequence[float]) -> "LownerMatrix":
        x = np.asarray(points, dtype=float)
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0.0):
            raise PreconditionError("Löwner matrix points must be a strictly increasing vector of length ≥ 2")
        slope = phi.derivative(x)
        gap = x[:, None] - x[None, :]
        np.fill_diagonal(gap, 1.0)
        entries = (slope[:, None] - slope[None, :]) / gap
        np.fill_diagonal(entries, phi.second_derivative(x))
        entries = 0.5 * (entries + entries.T)
        return cls(x, entries)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))


@dataclass(frozen=True)
class KleinConstants:
    phi: str
    c_lower: float
    c_upper: float
    c_eps: float
    eps: float
    derivation_grid: int
    stable: bool = True
    c_upper_smooth: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ('c_lower', 'c_upper', 'c_eps'):
            if not getattr(self, name) > 0.0:
                raise PreconditionError(f"Klein constant {name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.eps < 0.5:
            raise PreconditionError(f"eps must lie in (0, 1/2), got {self.eps}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'phi': self.phi,
            'c_lower': self.c_lower,
            'c_upper': self.c_upper,
            'c_upper_smooth': self.c_upper_smooth,
            'c_eps': self.c_eps,
            'eps': self.eps,
            'derivation_grid': self.derivation_grid,
            'stable': self.stable,
            'metadata': self.metadata,
        }


@dataclass(frozen=True)
class ProjectionSchedule:
    dims: Tuple[int, ...]

    def __post_init__(self):
        if not self.dims:
            raise ConfigError("schedule must not be empty", field='schedule')
        if any(d < 1 for d in self.dims) or any(b <= a for a, b in zip(self.dims, self.dims[1:])):
            raise ConfigError(f"schedule must be strictly increasing positive integers, got {list(self.dims)}",
                              field='schedule')
        if self.dims[-1] > MAX_SCHEDULE_DIM:
            raise ConfigError(f"schedule exceeds the dimension cap {MAX_SCHEDULE_DIM}", field='schedule')

    @classmethod
    def parse(cls, text: str) -> "ProjectionSchedule":
        try:
            dims = tuple(int(piece) for piece in text.split(',') if piece.strip())
        except ValueError:
            raise ConfigError(f"schedule '{text}' is not a comma-separated list of integers", field='schedule') from None
        return cls(dims)

    @classmethod
    def geometric(cls, start: int, stop: int, factor: int = 2) -> "ProjectionSchedule":
        dims: List[int] = []
        k = start
        while k <= stop:
            dims.append(k)
            k *= factor
        return cls(tuple(dims))

    def __iter__(self):
        return iter(self.dims)

    def __len__(self) -> int:
        return len(self.dims)


class LimitVerdict(Enum):
    CONVERGED = "Converged"
    INCREASING = "Increasing"
    INFINITE = "InfiniteDetected"


@dataclass
class LimitResult:
    dims: Tuple[int, ...]
    values: List[EntropyValue]
    verdict: LimitVerdict
    limit: Optional[float] = None
    at_dim: Optional[int] = None

    @property
    def converged(self) -> bool:
        return self.verdict is LimitVerdict.CONVERGED

    @property
    def last_value(self) -> float:
        return self.values[-1].as_float()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dims': list(self.dims),
            'values': [v.to_dict() for v in self.values],
            'verdict': self.verdict.value,
            'limit': self.limit,
            'at_dim': self.at_dim,
            'last_value': None if not self.values[-1].is_finite else self.last_value,
        }


@dataclass
class FiniteRankReport:
    eps: float
    eta: float
    eps_shift: float
    rank_vs_b: int
    rank_vs_a: int
    stage_changes: Tuple[float, float, float]
    entropy_change: float
    gap: float
    budget: Dict[str, float]
    lipschitz_bound: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'eps': self.eps,
            'eta': self.eta,
            'eps_shift': self.eps_shift,
            'rank_vs_b': self.rank_vs_b,
            'rank_vs_a': self.rank_vs_a,
            'stage_changes': list(self.stage_changes),
            'entropy_change': self.entropy_change,
            'gap': self.gap,
            'budget': self.budget,
            'lipschitz_bound': self.lipschitz_bound,
        }
