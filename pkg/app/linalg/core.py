"""
Operator-core: spectral decomposition, functional calculus, compressions,
conjugations and the block constructions used as test oracles.
"""

import logging
from typing import Callable, Tuple

import numpy as np

from app.errors import (
    DimensionMismatchError,
    DomainError,
    InternalConsistencyError,
    PreconditionError,
    SpectrumError,
)
from app.models.operator import (
    Contraction,
    HermitianOperator,
    OrthogonalProjector,
    SpectralDecomposition,
    ensure_same_dim,
)

logger = logging.getLogger(__name__)

# Eigenvalues within this distance outside [0, 1] are clamped
CLAMP_TOL = 1e-10

ScalarFunction = Callable[[np.ndarray], np.ndarray]


def eig_hermitian(A: HermitianOperator) -> SpectralDecomposition:
    """Spectral decomposition A = VΛV* with ascending eigenvalues."""
    spec = A.spectral
    scale = max(1.0, A.frobenius_norm())
    residual = float(np.linalg.norm(spec.reconstruct() - A.entries))
    if residual > 1e-10 * A.dim * scale:
        raise InternalConsistencyError(f"eigendecomposition residual {residual:.3e} too large (dim {A.dim})")
    return spec


def clamp_spectrum(values: np.ndarray, lo: float = 0.0, hi: float = 1.0, tol: float = CLAMP_TOL,
                   what: str = "operator") -> np.ndarray:
    """Clamp eigenvalues within `tol` of [lo, hi]; SpectrumError beyond that."""
    values = np.asarray(values, dtype=float)
    if values.size and (values.min() < lo - tol or values.max() > hi + tol):
        raise SpectrumError(
            f"spectrum of {what} [{values.min():.12g}, {values.max():.12g}] leaves [{lo}, {hi}] beyond tolerance {tol:.0e}"
        )
    return np.clip(values, lo, hi)


def spectral_values(A: HermitianOperator, f: ScalarFunction) -> np.ndarray:
    """f evaluated on the eigenvalues of A; DomainError on non-finite values."""
    lam = A.eigenvalues
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        out = np.asarray(f(lam))
    if out.shape != lam.shape:
        out = np.broadcast_to(out, lam.shape)
    bad = ~np.isfinite(out)
    if np.any(bad):
        offending = float(lam[np.argmax(bad)])
        raise DomainError(f"function undefined at eigenvalue {offending:.17g}", eigenvalue=offending)
    return out


def apply_function(A: HermitianOperator, f: ScalarFunction) -> HermitianOperator:
    """Functional calculus f(A) = V f(Λ) V*."""
    vals = spectral_values(A, f)
    vecs = A.spectral.eigenvectors
    return HermitianOperator((vecs * vals) @ vecs.conj().T)


def compress(A: HermitianOperator, P: OrthogonalProjector, restrict: bool = False) -> HermitianOperator:
    """PAP, or its matrix on an orthonormal basis of range(P) when `restrict`."""
    if P.dim != A.dim:
        raise DimensionMismatchError(f"projector dimension {P.dim} does not match operator dimension {A.dim}")
    if restrict:
        basis = P.range_basis
        if basis.shape[1] == 0:
            raise DimensionMismatchError("cannot restrict to the range of the zero projector")
        return HermitianOperator(basis.conj().T @ A.entries @ basis)
    p = P.carrier.entries
    return HermitianOperator(p @ A.entries @ p)


def restrict_to_basis(A: HermitianOperator, basis: np.ndarray) -> HermitianOperator:
    """Q*AQ for a matrix Q with orthonormal columns."""
    if basis.shape[0] != A.dim:
        raise DimensionMismatchError(f"basis has {basis.shape[0]} rows, operator dimension is {A.dim}")
    return HermitianOperator(basis.conj().T @ A.entries @ basis)


def conjugate(A: HermitianOperator, X: Contraction) -> HermitianOperator:
    """XAX*; keeps spectrum in [0,1] when A's is."""
    if X.cols != A.dim:
        raise DimensionMismatchError(f"contraction has {X.cols} columns, operator dimension is {A.dim}")
    x = X.entries
    result = HermitianOperator(x @ A.entries @ x.conj().T)
    lam = A.eigenvalues
    if lam[0] >= -CLAMP_TOL and lam[-1] <= 1.0 + CLAMP_TOL:
        mu = result.eigenvalues
        if mu[0] < -CLAMP_TOL or mu[-1] > 1.0 + CLAMP_TOL:
            raise InternalConsistencyError(
                f"XAX* left [0,1]: spectrum [{mu[0]:.3e}, {mu[-1]:.3e}] for a contraction X"
            )
    return result


def psd_sqrt(matrix: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Square root of a Hermitian PSD matrix; PreconditionError if indefinite beyond tol."""
    op = HermitianOperator(matrix)
    lam = op.eigenvalues
    if lam.size and lam[0] < -tol:
        raise PreconditionError(f"matrix is indefinite: smallest eigenvalue {lam[0]:.3e}")
    vecs = op.spectral.eigenvectors
    return (vecs * np.sqrt(np.clip(lam, 0.0, None))) @ vecs.conj().T


def doubling_isometry(X: Contraction) -> Contraction:
    """U f = Xf ⊕ √(1 − X*X) f, an isometry with U*U = 1."""
    defect = np.eye(X.cols) - X.gram()
    root = psd_sqrt(defect)
    U = Contraction(np.vstack([X.entries, root]))
    gram_error = float(np.max(np.abs(U.gram() - np.eye(X.cols))))
    if gram_error > 1e-10:
        raise InternalConsistencyError(f"doubling isometry is not isometric: max|U*U − 1| = {gram_error:.3e}")
    return U


def block_split(A: HermitianOperator, P: OrthogonalProjector) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Blocks (A11, A12, A21, A22) of A along range(P) ⊕ range(1 − P)."""
    if P.dim != A.dim:
        raise DimensionMismatchError(f"projector dimension {P.dim} does not match operator dimension {A.dim}")
    q1, q2 = P.range_basis, P.kernel_basis
    a = A.entries
    return (q1.conj().T @ a @ q1, q1.conj().T @ a @ q2,
            q2.conj().T @ a @ q1, q2.conj().T @ a @ q2)


def schur_inverse_block_check(A: HermitianOperator, P: OrthogonalProjector) -> float:
    """‖(A11 − A12 A22⁻¹ A21)⁻¹ − (A⁻¹)11‖_F for positive definite A."""
    lam = A.eigenvalues
    if lam[0] <= 1e-10:
        raise PreconditionError(f"A must be positive definite, smallest eigenvalue {lam[0]:.3e}")
    a11, a12, a21, a22 = block_split(A, P)
    if a11.shape[0] == 0:
        return 0.0
    if a22.shape[0]:
        if np.linalg.eigvalsh(a22)[0] <= 1e-14:
            raise PreconditionError("A22 block is singular")
        schur = a11 - a12 @ np.linalg.solve(a22, a21)
    else:
        schur = a11
    q1 = P.range_basis
    inverse_block = q1.conj().T @ np.linalg.inv(A.entries) @ q1
    return float(np.linalg.norm(np.linalg.inv(schur) - inverse_block))


def commutator_norm(A: HermitianOperator, B: HermitianOperator) -> float:
    """‖AB − BA‖_F."""
    ensure_same_dim(A, B)
    a, b = A.entries, B.entries
    return float(np.linalg.norm(a @ b - b @ a))
