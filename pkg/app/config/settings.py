"""Library settings and environment variable management."""

import logging
import os

from dotenv import load_dotenv

# Load environment variables from .env file if it exists
load_dotenv()

logger = logging.getLogger(__name__)


class Settings:
    """Numerical defaults shared by the library and the CLI."""

    # Logging Configuration
    LOG_LEVEL: str = 'INFO'

    # Kernel semantics of the relative entropy
    EIGEN_TOL: float = 1e-10
    MATCH_TOL: float = 1e-10

    # Quadrature for Löwner representations
    QUADRATURE_NODES: int = 200
    QUADRATURE_TAIL_SPLIT: float = 1.0

    # Klein constants
    KLEIN_GRID: int = 500

    # Certification
    VIOLATION_THRESHOLD: float = 1e-8
    MAX_WORKERS: int = 1

    def __init__(self):
        """Initialize settings from environment variables."""
        self.LOG_LEVEL = os.getenv('OPENT_LOG_LEVEL', self.LOG_LEVEL).strip().upper() or 'INFO'
        self._load_tolerances()
        self._load_quadrature_settings()
        self._load_run_settings()
        self._validate_settings()

    @staticmethod
    def _read_float(name: str, default: float) -> float:
        raw = os.getenv(name, '').strip()
        if not raw:
            return default
        try:
            return float(raw)
        except ValueError:
            logger.warning("%s=%r is not a number; using %s", name, raw, default)
            return default

    @staticmethod
    def _read_int(name: str, default: int) -> int:
        raw = os.getenv(name, '').strip()
        if not raw:
            return default
        try:
            return int(raw)
        except ValueError:
            logger.warning("%s=%r is not an integer; using %s", name, raw, default)
            return default

    def _load_tolerances(self) -> None:
        """Load kernel tolerances; both must live in (0, 1e-6)."""
        self.EIGEN_TOL = self._read_float('OPENT_EIGEN_TOL', self.EIGEN_TOL)
        self.MATCH_TOL = self._read_float('OPENT_MATCH_TOL', self.MATCH_TOL)
        self.VIOLATION_THRESHOLD = self._read_float('OPENT_VIOLATION_THRESHOLD', self.VIOLATION_THRESHOLD)

    def _load_quadrature_settings(self) -> None:
        """Load and clamp quadrature node count and tail split."""
        nodes = self._read_int('OPENT_QUADRATURE_NODES', self.QUADRATURE_NODES)
        # Clamp to a range where node doubling stays cheap
        self.QUADRATURE_NODES = min(max(nodes, 8), 4096)
        self.QUADRATURE_TAIL_SPLIT = self._read_float('OPENT_QUADRATURE_TAIL_SPLIT', self.QUADRATURE_TAIL_SPLIT)

    def _load_run_settings(self) -> None:
        """Load grid resolution and worker count."""
        grid = self._read_int('OPENT_KLEIN_GRID', self.KLEIN_GRID)
        self.KLEIN_GRID = min(max(grid, 100), 4000)
        workers = self._read_int('OPENT_MAX_WORKERS', self.MAX_WORKERS)
        self.MAX_WORKERS = min(max(workers, 1), 64)

    def _validate_settings(self):
        """Validate that tolerances are usable."""
        for name, value in (('OPENT_EIGEN_TOL', self.EIGEN_TOL), ('OPENT_MATCH_TOL', self.MATCH_TOL)):
            if not 0.0 < value < 1e-6:
                raise ValueError(f"{name} must lie in (0, 1e-6), got {value}")
        if self.VIOLATION_THRESHOLD <= 0.0:
            raise ValueError("OPENT_VIOLATION_THRESHOLD must be positive")
        if self.QUADRATURE_TAIL_SPLIT <= 0.0:
            raise ValueError("OPENT_QUADRATURE_TAIL_SPLIT must be positive")

    def to_dict(self) -> dict:
        """Settings echo for report metadata."""
        return {
            'eigen_tol': self.EIGEN_TOL,
            'match_tol': self.MATCH_TOL,
            'quadrature_nodes': self.QUADRATURE_NODES,
            'quadrature_tail_split': self.QUADRATURE_TAIL_SPLIT,
            'klein_grid': self.KLEIN_GRID,
            'violation_threshold': self.VIOLATION_THRESHOLD,
            'max_workers': self.MAX_WORKERS,
        }


# Global settings instance
settings = Settings()
