"""
"Infinite-dimensional" operators given by matrix-element oracles and consumed through
leading k×k truncations.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from app.errors import DimensionMismatchError, PreconditionError, SpectrumError
from app.models.operator import MAX_DIM, HermitianOperator

logger = logging.getLogger(__name__)

# Truncation spectra may leave [0, 1] by this much
BOUNDS_SLACK = 1e-9

Entries = Union[Sequence[float], Callable[[int], float]]


def _entry_function(entries: Entries, fill: float) -> Callable[[int], float]:
    if callable(entries):
        return entries
    values = [float(v) for v in entries]
    return lambda i: values[i] if i < len(values) else fill


class TruncatableOperator(ABC):
    """Hermitian operator on ℓ²(ℕ) with spectrum promised in [0, 1]."""

    declared_bounds = (0.0, 1.0)
    kind = "oracle"

    def __init__(self, decay_hint: Optional[str] = None):
        self.decay_hint = decay_hint

    @abstractmethod
    def element(self, i: int, j: int) -> complex:
        """Matrix element ⟨eᵢ, A eⱼ⟩."""

    def block(self, k: int) -> np.ndarray:
        """Leading k×k block as an array; subclasses override with vectorized forms."""
        return np.array([[self.element(i, j) for j in range(k)] for i in range(k)], dtype=complex)

    def truncate(self, k: int) -> HermitianOperator:
        """P_k A P_k on its range, spot-checked against the declared spectral bounds."""
        if not 1 <= k <= MAX_DIM:
            raise DimensionMismatchError(f"truncation size {k} outside [1, {MAX_DIM}]")
        try:
            block = self.block(k)
        except (IndexError, ValueError, TypeError, ArithmeticError) as exc:
            raise PreconditionError(f"{self.kind} oracle failed at truncation {k}: {exc}") from exc
        op = HermitianOperator(block)
        lam = op.eigenvalues
        lo, hi = self.declared_bounds
        if lam[0] < lo - BOUNDS_SLACK or lam[-1] > hi + BOUNDS_SLACK:
            raise SpectrumError(
                f"{self.kind} truncation {k} has spectrum [{lam[0]:.3e}, {lam[-1]:.12g}] outside [{lo}, {hi}]"
            )
        return op

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'decay_hint': self.decay_hint}


class DiagonalOracle(TruncatableOperator):
    """diag(a₀, a₁, ...) from a finite list (padded with `fill`) or a function of the index."""

    kind = "diagonal"

    def __init__(self, entries: Entries, fill: float = 0.0, decay_hint: Optional[str] = None):
        super().__init__(decay_hint)
        self._entry = _entry_function(entries, fill)
        self._source = None if callable(entries) else [float(v) for v in entries]

    def diagonal(self, k: int) -> np.ndarray:
        return np.array([self._entry(i) for i in range(k)], dtype=float)

    def element(self, i: int, j: int) -> complex:
        return complex(self._entry(i)) if i == j else 0j

    def block(self, k: int) -> np.ndarray:
        return np.diag(self.diagonal(k))

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        if self._source is not None:
            data['entries'] = self._source
        return data


class BandedOracle(TruncatableOperator):
    """Banded Hermitian operator; bands[d] holds the d-th superdiagonal (bands[0] the diagonal)."""

    kind = "banded"

    def __init__(self, bands: Sequence[Entries], bandwidth: Optional[int] = None,
                 decay_hint: Optional[str] = None):
        super().__init__(decay_hint)
        if not bands:
            raise PreconditionError("banded oracle needs at least the main diagonal")
        self.bandwidth = len(bands) - 1 if bandwidth is None else int(bandwidth)
        if self.bandwidth > len(bands) - 1 or self.bandwidth < 0:
            raise PreconditionError(f"bandwidth {self.bandwidth} does not match {len(bands)} bands")
        self._bands = [_entry_function(b, 0.0) for b in bands[: self.bandwidth + 1]]
        self._source = None if any(callable(b) for b in bands) else [[float(v) for v in b] for b in bands]

    def element(self, i: int, j: int) -> complex:
        offset = j - i
        if abs(offset) > self.bandwidth:
            return 0j
        value = complex(self._bands[abs(offset)](min(i, j)))
        return value if offset >= 0 else value.conjugate()

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['bandwidth'] = self.bandwidth
        if self._source is not None:
            data['entries'] = self._source
        return data


class EmbeddedOracle(TruncatableOperator):
    """A finite matrix zero-padded to ℓ²(ℕ)."""

    kind = "embedded"

    def __init__(self, matrix: Any, decay_hint: Optional[str] = "finite support"):
        super().__init__(decay_hint)
        self.matrix = matrix if isinstance(matrix, HermitianOperator) else HermitianOperator(matrix)

    def element(self, i: int, j: int) -> complex:
        n = self.matrix.dim
        return complex(self.matrix.entries[i, j]) if i < n and j < n else 0j

    def block(self, k: int) -> np.ndarray:
        out = np.zeros((k, k), dtype=self.matrix.entries.dtype)
        n = min(k, self.matrix.dim)
        out[:n, :n] = self.matrix.entries[:n, :n]
        return out

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['matrix'] = self.matrix.to_dict()
        return data


class FunctionOracle(TruncatableOperator):
    """Matrix elements from a pure function (i, j) → value."""

    kind = "function"

    def __init__(self, fn: Callable[[int, int], complex], decay_hint: Optional[str] = None):
        super().__init__(decay_hint)
        self._fn = fn

    def element(self, i: int, j: int) -> complex:
        return complex(self._fn(i, j))


class ConjugatedOracle(TruncatableOperator):
    """(X ⊕ 1) A (X ⊕ 1)* for a fixed m×m contraction X acting on the first m coordinates."""

    kind = "conjugated"

    def __init__(self, base: TruncatableOperator, matrix: Any, decay_hint: Optional[str] = None):
        super().__init__(decay_hint or base.decay_hint)
        x = np.asarray(matrix)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise DimensionMismatchError(f"conjugating matrix must be square, got shape {x.shape}")
        if np.linalg.norm(x, 2) > 1.0 + 1e-10:
            raise PreconditionError("conjugating matrix is not a contraction")
        self.base = base
        self.matrix = x

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def element(self, i: int, j: int) -> complex:
        k = max(i, j) + 1
        return complex(self.block(k)[i, j])

    def block(self, k: int) -> np.ndarray:
        n = max(k, self.size)
        inner = self.base.block(n).astype(complex)
        w = np.eye(n, dtype=complex)
        w[: self.size, : self.size] = self.matrix
        return (w @ inner @ w.conj().T)[:k, :k]

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['base'] = self.base.to_dict()
        data['size'] = self.size
        return data


class RotatedOracle(ConjugatedOracle):
    """A fixed unitary basis change on the first m coordinates."""

    kind = "rotated"

    def __init__(self, base: TruncatableOperator, unitary: Any, decay_hint: Optional[str] = None):
        u = np.asarray(unitary)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatchError(f"rotation must be square, got shape {u.shape}")
        if float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) > 1e-10:
            raise PreconditionError("rotation matrix is not unitary")
        super().__init__(base, u, decay_hint)


def oracle_from_spec(spec: Dict[str, Any]) -> TruncatableOperator:
    """Build an oracle from its JSON description (diagonal | banded | embedded)."""
    kind = spec.get('kind')
    if kind == 'diagonal':
        return DiagonalOracle(spec['entries'], fill=float(spec.get('fill', 0.0)))
    if kind == 'banded':
        return BandedOracle(spec['entries'], bandwidth=spec.get('bandwidth'))
    if kind == 'embedded':
        entries = spec['entries']
        matrix = np.asarray(entries, dtype=float)
        if 'im' in spec:
            matrix = matrix + 1j * np.asarray(spec['im'], dtype=float)
        return EmbeddedOracle(matrix)
    raise PreconditionError(f"unknown oracle kind '{kind}'; expected diagonal, banded or embedded")


def materialize(oracles: Sequence[TruncatableOperator], k: int) -> List[HermitianOperator]:
    return [oracle.truncate(k) for oracle in oracles]
