"""
Dense Hermitian operators, contractions and orthogonal projectors.

All types are immutable values: the backing arrays are flagged read-only and the
spectral decomposition is computed lazily, once.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg

from app.errors import DimensionMismatchError, InternalConsistencyError, PreconditionError

# Asymmetry accepted before symmetrization, relative to max|entry|
HERMITIAN_TOL = 1e-12
CONTRACTION_TOL = 1e-10
PROJECTOR_TOL = 1e-10
MAX_DIM = 512


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_square(matrix: Any, what: str) -> np.ndarray:
    data = np.array(matrix, dtype=complex, copy=True)
    if data.ndim == 0:
        data = data.reshape(1, 1)
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise DimensionMismatchError(f"{what} must be a square matrix, got shape {data.shape}")
    if data.shape[0] == 0:
        raise DimensionMismatchError(f"{what} must have positive dimension")
    if data.shape[0] > MAX_DIM:
        raise DimensionMismatchError(f"{what} dimension {data.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(data)):
        raise PreconditionError(f"{what} has non-finite entries")
    return data


def _real_if_possible(data: np.ndarray) -> np.ndarray:
    if np.all(data.imag == 0.0):
        return np.ascontiguousarray(data.real)
    return data


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """A = V diag(eigenvalues) V*, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.conj().T

    def unitarity_defect(self) -> float:
        vecs = self.eigenvectors
        return float(np.max(np.abs(vecs.conj().T @ vecs - np.eye(self.dim))))


class HermitianOperator:
    """Dense n×n Hermitian matrix with a cached spectral decomposition."""

    def __init__(self, matrix: Any):
        data = _as_square(matrix, "HermitianOperator")
        scale = float(np.max(np.abs(data)))
        asymmetry = float(np.max(np.abs(data - data.conj().T)))
        if asymmetry > HERMITIAN_TOL * scale:
            raise PreconditionError(
                f"matrix is not Hermitian: max|M - M*| = {asymmetry:.3e} exceeds {HERMITIAN_TOL:.0e}·max|entry|"
            )
        data = 0.5 * (data + data.conj().T)
        self._entries = _frozen(_real_if_possible(data))

    # Constructors
    @classmethod
    def diag(cls, values: Any) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def identity(cls, dim: int, scale: float = 1.0) -> "HermitianOperator":
        return cls(scale * np.eye(dim))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianOperator":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def from_spectrum(cls, eigenvalues: Any, eigenvectors: Any) -> "HermitianOperator":
        vals = np.asarray(eigenvalues, dtype=float)
        vecs = np.asarray(eigenvectors)
        return cls((vecs * vals) @ vecs.conj().T)

    # Accessors
    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return int(self._entries.shape[0])

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self._entries)

    @cached_property
    def spectral(self) -> SpectralDecomposition:
        """Eigendecomposition via LAPACK (deterministic for identical input bytes)."""
        try:
            vals, vecs = scipy.linalg.eigh(self._entries, check_finite=False)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise InternalConsistencyError(f"eigensolver failed to converge (dim {self.dim}): {exc}") from exc
        return SpectralDecomposition(_frozen(vals), _frozen(vecs))

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectral.eigenvalues

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self._entries))

    def trace(self) -> float:
        return float(np.real(np.trace(self._entries)))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries.copy()
        return self._entries.astype(dtype)

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim}, real={self.is_real})"

    def to_dict(self) -> Dict[str, Any]:
        data = {'dim': self.dim, 're': self._entries.real.tolist()}
        if not self.is_real:
            data['im'] = self._entries.imag.tolist()
        return data


class Contraction:
    """Linear map X: C^cols → C^rows with X*X ≤ 1."""

    def __init__(self, matrix: Any):
        data = np.array(matrix, dtype=complex, copy=True)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        if data.ndim != 2 or data.size == 0:
            raise DimensionMismatchError(f"contraction must be a non-empty matrix, got shape {data.shape}")
        top = float(np.linalg.norm(data, 2))
        if top > 1.0 + CONTRACTION_TOL:
            raise PreconditionError(f"not a contraction: largest singular value {top:.12g} > 1")
        self._entries = _frozen(_real_if_possible(data))

    @classmethod
    def identity(cls, dim: int) -> "Contraction":
        return cls(np.eye(dim))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def rows(self) -> int:
        return int(self._entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self._entries.shape[1])

    def gram(self) -> np.ndarray:
        """X*X."""
        return self._entries.conj().T @ self._entries

    def top_singular_value(self) -> float:
        return float(np.linalg.norm(self._entries, 2))

    def __repr__(self) -> str:
        return f"Contraction({self.rows}x{self.cols})"


class OrthogonalProjector:
    """P = P² = P*, carried by a HermitianOperator."""

    def __init__(self, carrier: Any):
        if not isinstance(carrier, HermitianOperator):
            carrier = HermitianOperator(carrier)
        mat = carrier.entries
        idempotency = float(np.linalg.norm(mat @ mat - mat))
        if idempotency > PROJECTOR_TOL * max(1.0, np.sqrt(carrier.dim)):
            raise PreconditionError(f"not an orthogonal projector: ‖P² − P‖_F = {idempotency:.3e}")
        self.carrier = carrier

    @classmethod
    def from_basis(cls, basis: Any) -> "OrthogonalProjector":
        """Projector onto the span of the orthonormal columns of `basis`."""
        q = np.asarray(basis)
        if q.ndim == 1:
            q = q.reshape(-1, 1)
        return cls(HermitianOperator(q @ q.conj().T))

    @classmethod
    def coordinate(cls, dim: int, indices) -> "OrthogonalProjector":
        diag = np.zeros(dim)
        diag[list(indices)] = 1.0
        return cls(HermitianOperator.diag(diag))

    @classmethod
    def identity(cls, dim: int) -> "OrthogonalProjector":
        return cls(HermitianOperator.identity(dim))

    @classmethod
    def zero(cls, dim: int) -> "OrthogonalProjector":
        return cls(HermitianOperator.zeros(dim))

    @property
    def dim(self) -> int:
        return self.carrier.dim

    @cached_property
    def rank(self) -> int:
        return int(np.sum(self.carrier.eigenvalues > 0.5))

    @cached_property
    def range_basis(self) -> np.ndarray:
        """Orthonormal basis of range(P) as columns."""
        spec = self.carrier.spectral
        return _frozen(np.ascontiguousarray(spec.eigenvectors[:, spec.eigenvalues > 0.5]))

    @cached_property
    def kernel_basis(self) -> np.ndarray:
        """Orthonormal basis of range(1 − P) as columns."""
        spec = self.carrier.spectral
        return _frozen(np.ascontiguousarray(spec.eigenvectors[:, spec.eigenvalues <= 0.5]))

    def complement(self) -> "OrthogonalProjector":
        return OrthogonalProjector(HermitianOperator(np.eye(self.dim) - self.carrier.entries))

    def __repr__(self) -> str:
        return f"OrthogonalProjector(dim={self.dim}, rank={self.rank})"


def ensure_same_dim(*operators: Optional[HermitianOperator]) -> int:
    """Common dimension of the given operators, or DimensionMismatchError."""
    dims = {op.dim for op in operators if op is not None}
    if len(dims) != 1:
        raise DimensionMismatchError(f"operands have different dimensions: {sorted(dims)}")
    return dims.pop()
