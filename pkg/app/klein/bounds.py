"""
Klein-type bounds on H(A,B) and the weighted Hilbert-Schmidt gaps they compare against.

All gaps are evaluated in B's eigenbasis as Σᵢ wᵢ ((A−B)²)ᵢᵢ, which equals
tr[W^{1/2}(A−B)²W^{1/2}] for W a function of B.
"""

import logging
from typing import Optional

import numpy as np

from app.entropy.relative import relative_entropy
from app.errors import InfiniteEntropyError, PreconditionError, SpectrumError
from app.linalg.core import clamp_spectrum, eig_hermitian
from app.models.entropy import KernelPolicy
from app.models.operator import HermitianOperator, ensure_same_dim
from app.models.phi import PhiSpec
from app.models.reports import KleinConstants

logger = logging.getLogger(__name__)

INTERIOR_MARGIN = 1e-6
SPECTRUM_SLACK = 1e-10


def _diagonal_of_square(A: HermitianOperator, B: HermitianOperator):
    """B's clamped eigenvalues and ((A−B)²)ᵢᵢ in B's eigenbasis."""
    ensure_same_dim(A, B)
    spec = eig_hermitian(B)
    mu = clamp_spectrum(spec.eigenvalues, what="B")
    vecs = spec.eigenvectors
    difference = vecs.conj().T @ (A.entries - B.entries) @ vecs
    row_norms = np.sum(np.abs(difference) ** 2, axis=1)
    return mu, row_norms


def hilbert_schmidt_gap(A: HermitianOperator, B: HermitianOperator, phi: PhiSpec,
                        policy: Optional[KernelPolicy] = None) -> float:
    """tr[(1+|φ′(B)|)^{1/2}(A−B)²(1+|φ′(B)|)^{1/2}]; +∞ when A−B reaches a divergent endpoint of B."""
    policy = policy or KernelPolicy.from_settings()
    mu, row_norms = _diagonal_of_square(A, B)
    mu = np.where(mu <= policy.eigen_tol, 0.0, np.where(mu >= 1.0 - policy.eigen_tol, 1.0, mu))
    weight = 1.0 + np.abs(phi.derivative(mu))
    floor = (policy.match_tol * mu.size) ** 2
    infinite = ~np.isfinite(weight)
    if np.any(infinite & (row_norms > floor)):
        return float('inf')
    return float(np.sum(np.where(infinite, 0.0, weight * row_norms)))


def upper_gap(A: HermitianOperator, B: HermitianOperator) -> float:
    """tr[W^{1/2}(A−B)²W^{1/2}] with W = B⁻² + (1−B)⁻²; B must be strictly interior."""
    mu, row_norms = _diagonal_of_square(A, B)
    if mu[0] < INTERIOR_MARGIN or mu[-1] > 1.0 - INTERIOR_MARGIN:
        raise SpectrumError(f"upper bound needs B in [{INTERIOR_MARGIN:g}, 1 − {INTERIOR_MARGIN:g}], "
                            f"got [{mu[0]:.3e}, {mu[-1]:.12g}]")
    weight = mu ** -2 + (1.0 - mu) ** -2
    return float(np.sum(weight * row_norms))


def _finite_entropy(A: HermitianOperator, B: HermitianOperator, phi: PhiSpec, policy: KernelPolicy) -> float:
    value = relative_entropy(A, B, phi, policy)
    if not value.is_finite:
        raise InfiniteEntropyError(f"H(A,B) is {value}; the bound is vacuous", value=value)
    return value.value


def klein_lower_defect(A: HermitianOperator, B: HermitianOperator, phi: PhiSpec, constants: KleinConstants,
                       policy: Optional[KernelPolicy] = None) -> float:
    """H(A,B) − C·tr[(1+|φ′(B)|)(A−B)²]."""
    policy = policy or KernelPolicy.from_settings()
    entropy = _finite_entropy(A, B, phi, policy)
    gap = hilbert_schmidt_gap(A, B, phi, policy)
    return entropy - constants.c_lower * gap


def klein_upper_defect(A: HermitianOperator, B: HermitianOperator, phi: PhiSpec, constants: KleinConstants,
                       policy: Optional[KernelPolicy] = None) -> float:
    """C·tr[(B⁻² + (1−B)⁻²)(A−B)²] − H(A,B)."""
    policy = policy or KernelPolicy.from_settings()
    gap = upper_gap(A, B)
    entropy = _finite_entropy(A, B, phi, policy)
    return constants.c_upper * gap - entropy


def _check_band(op: HermitianOperator, eps: float, what: str) -> None:
    lam = op.eigenvalues
    if lam[0] < eps - SPECTRUM_SLACK or lam[-1] > 1.0 - eps + SPECTRUM_SLACK:
        raise SpectrumError(f"spectrum of {what} [{lam[0]:.6g}, {lam[-1]:.6g}] leaves [{eps}, {1.0 - eps}]")


def lipschitz_defect(A: HermitianOperator, A_prime: HermitianOperator, B: HermitianOperator, phi: PhiSpec,
                     eps: float, constants: KleinConstants, policy: Optional[KernelPolicy] = None) -> float:
    """C_ε(‖A−A′‖₂² + ‖A′−B‖₂‖A−A′‖₂) − |H(A,B) − H(A′,B)|."""
    policy = policy or KernelPolicy.from_settings()
    if constants.eps > eps + 1e-15:
        raise PreconditionError(f"constants were derived for eps = {constants.eps}, cannot serve eps = {eps}")
    ensure_same_dim(A, A_prime, B)
    clamp_spectrum(A.eigenvalues, what="A")
    _check_band(A_prime, eps, "A′")
    _check_band(B, eps, "B")

    step = float(np.linalg.norm(A.entries - A_prime.entries))
    offset = float(np.linalg.norm(A_prime.entries - B.entries))
    change = abs(_finite_entropy(A, B, phi, policy) - _finite_entropy(A_prime, B, phi, policy))
    return constants.c_eps * (step * step + offset * step) - change
