"""
Run configuration and report models for the command-line front-end.
"""

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Optional, Tuple

from app.config.settings import settings
from app.errors import ConfigError
from app.models.reports import ProjectionSchedule

SUBCOMMANDS = ('entropy', 'certify', 'klein', 'converge', 'catalog')
CERTIFY_MODES = ('lowner', 'pinching', 'contraction', 'all')
DEFAULT_SCHEDULE = "2,4,8,16,32,64,128,256"


@dataclass
class RunConfig:
    """A fully validated request for one subcommand."""

    subcommand: str
    phi: str = 'vn'
    a: Optional[str] = None
    b: Optional[str] = None
    a_oracle: Optional[str] = None
    b_oracle: Optional[str] = None
    interval: Optional[Tuple[float, float]] = None
    expect_finite: bool = False
    seed: Optional[int] = None
    trials: int = 1000
    dim: int = 4
    mode: str = 'all'
    edge: bool = False
    n_points: int = 3
    eps: float = 0.1
    grid: Optional[int] = None
    schedule: str = DEFAULT_SCHEDULE
    rel_tol: float = 1e-6
    eigen_tol: float = field(default_factory=lambda: settings.EIGEN_TOL)
    match_tol: float = field(default_factory=lambda: settings.MATCH_TOL)
    workers: int = field(default_factory=lambda: settings.MAX_WORKERS)
    output: Optional[str] = None

    def __post_init__(self):
        """Validate the configuration before any computation runs."""
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"subcommand must be one of {', '.join(SUBCOMMANDS)}, got '{self.subcommand}'",
                              field='subcommand')
        if self.subcommand == 'entropy':
            self._require('a', 'b')
        if self.subcommand == 'converge':
            self._require('a_oracle', 'b_oracle')
            ProjectionSchedule.parse(self.schedule)
        if self.subcommand in ('certify', 'klein') and self.seed is None:
            raise ConfigError(f"{self.subcommand} needs an explicit --seed", field='seed')
        if self.mode not in CERTIFY_MODES:
            raise ConfigError(f"mode must be one of {', '.join(CERTIFY_MODES)}, got '{self.mode}'", field='mode')

        self._positive_int('trials', self.trials)
        self._positive_int('dim', self.dim)
        self._positive_int('workers', self.workers)
        if self.n_points < 2:
            raise ConfigError(f"n_points must be at least 2, got {self.n_points}", field='n_points')
        if not 0.0 < self.eps < 0.5:
            raise ConfigError(f"eps must lie in (0, 1/2), got {self.eps}", field='eps')
        if not 0.0 < self.rel_tol < 1.0:
            raise ConfigError(f"rel_tol must lie in (0, 1), got {self.rel_tol}", field='rel_tol')
        for name in ('eigen_tol', 'match_tol'):
            value = getattr(self, name)
            if not 0.0 < value < 1e-6:
                raise ConfigError(f"{name} must lie in (0, 1e-6), got {value}", field=name)
        if self.interval is not None:
            lo, hi = (float(v) for v in self.interval)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ConfigError(f"interval must be finite with lo < hi, got {self.interval}", field='interval')
            self.interval = (lo, hi)

    def _require(self, *names: str) -> None:
        for name in names:
            if not getattr(self, name):
                flag = '--' + name.replace('_', '-')
                raise ConfigError(f"{self.subcommand} needs {flag}", field=name)

    @staticmethod
    def _positive_int(name: str, value: Any) -> None:
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(f"{name} must be a positive integer, got {value!r}", field=name)

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        """Build from a mapping, rejecting keys that are not configuration fields."""
        known = set(cls.field_names())
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown configuration field '{key}'", field=key)
        values = dict(data)
        if values.get('interval') is not None:
            values['interval'] = tuple(values['interval'])
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if self.interval is not None:
            data['interval'] = list(self.interval)
        return data


@dataclass
class Report:
    """One run's output; every field except timing is reproducible from config and seed."""

    library: Dict[str, str]
    config: Dict[str, Any]
    results: Any
    metadata: Dict[str, Any] = field(default_factory=dict)
    timing: Dict[str, float] = field(default_factory=dict)
    exit_code: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'library': self.library,
            'config': self.config,
            'results': self.results,
            'metadata': self.metadata,
            'timing': self.timing,
        }
