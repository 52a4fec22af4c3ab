"""
The relative entropy H(A,B) = tr[φ(A) − φ(B) − φ′(B)(A−B)] with kernel semantics.

If φ′ diverges at an endpoint and B has eigenvalues there, H is +∞ unless A = B on
that spectral subspace (including no coupling to its complement); in that case the
trace is taken on the orthogonal complement.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import DimensionMismatchError, DomainError, PreconditionError, SpectrumError
from app.linalg.core import CLAMP_TOL, clamp_spectrum, eig_hermitian
from app.models.entropy import EntropyValue, InfiniteReason, KernelPolicy
from app.models.operator import HermitianOperator, ensure_same_dim
from app.models.phi import PhiSpec
from app.utils.trials import TrialRunner

logger = logging.getLogger(__name__)


def _kernel_matches(rotated: np.ndarray, mu: np.ndarray, mask: np.ndarray, policy: KernelPolicy) -> bool:
    """‖Π(A−B)‖_F + ‖ΠA(1−Π)‖_F ≤ match_tol·dim in B's eigenbasis."""
    dim = rotated.shape[0]
    rows = rotated[mask, :]
    difference = rows - np.diag(mu)[mask, :]
    coupling = rotated[np.ix_(mask, ~mask)]
    mismatch = float(np.linalg.norm(difference)) + float(np.linalg.norm(coupling))
    logger.debug(f"Kernel block of size {int(mask.sum())}: mismatch {mismatch:.3e}")
    return mismatch <= policy.match_tol * dim


def _trace_terms(phi: PhiSpec, eig_a: np.ndarray, mu: np.ndarray, diag_a: np.ndarray) -> Tuple[float, float, float]:
    phi_a = phi.value(eig_a)
    phi_b = phi.value(mu)
    slope = phi.derivative(mu)
    for values, source, what in ((phi_a, eig_a, "A"), (phi_b, mu, "B"), (slope, mu, "B")):
        bad = ~np.isfinite(values)
        if np.any(bad):
            offending = float(source[np.argmax(bad)])
            raise DomainError(f"{phi.label} is not finite at eigenvalue {offending:.17g} of {what}", eigenvalue=offending)
    return float(np.sum(phi_a)), float(np.sum(phi_b)), float(np.sum(slope * (diag_a - mu)))


def relative_entropy(A: HermitianOperator, B: HermitianOperator, phi: PhiSpec,
                     policy: Optional[KernelPolicy] = None) -> EntropyValue:
    """
    Compute H(A,B) for 0 ≤ A, B ≤ 1.

    Args:
        A, B: Operators of equal dimension with spectra in [0, 1]
        phi: The generating function
        policy: Endpoint and kernel-matching tolerances; settings default when omitted

    Returns:
        Finite(value ≥ 0), or Infinite(KernelMismatchAt0 | KernelMismatchAt1)
    """
    policy = policy or KernelPolicy.from_settings()
    ensure_same_dim(A, B)

    clamp_spectrum(A.eigenvalues, what="A")
    spec_b = eig_hermitian(B)
    mu = clamp_spectrum(spec_b.eigenvalues, what="B")
    vecs = spec_b.eigenvectors
    rotated = vecs.conj().T @ A.entries @ vecs

    at_0 = mu <= policy.eigen_tol
    at_1 = mu >= 1.0 - policy.eigen_tol
    mu = np.where(at_0, 0.0, np.where(at_1, 1.0, mu))

    kernel_0 = at_0 if phi.dphi_divergent_at_0 else np.zeros_like(at_0)
    kernel_1 = at_1 if phi.dphi_divergent_at_1 else np.zeros_like(at_1)
    for mask, reason in ((kernel_0, InfiniteReason.KERNEL_MISMATCH_AT_0),
                         (kernel_1, InfiniteReason.KERNEL_MISMATCH_AT_1)):
        if np.any(mask) and not _kernel_matches(rotated, mu, mask, policy):
            return EntropyValue.infinite(reason)

    keep = ~(kernel_0 | kernel_1)
    if not np.any(keep):
        return EntropyValue.finite(0.0)

    if np.all(keep):
        eig_a = clamp_spectrum(A.eigenvalues, what="A")
        block = rotated
    else:
        block = rotated[np.ix_(keep, keep)]
        eig_a = clamp_spectrum(np.linalg.eigvalsh(block), what="A on the kernel complement")
    diag_a = np.real(np.diagonal(block))

    trace_a, trace_b, cross = _trace_terms(phi, eig_a, mu[keep], diag_a)
    value = trace_a - trace_b - cross
    return EntropyValue.finite(value, scale=abs(trace_a) + abs(trace_b))


def relative_entropy_on_interval(A: HermitianOperator, B: HermitianOperator, phi: PhiSpec,
                                 interval: Tuple[float, float]) -> EntropyValue:
    """H(A,B) for spectra in an explicit interval [m, M]; no kernel semantics."""
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise PreconditionError(f"spectral interval must satisfy m < M, got [{lo}, {hi}]")
    ensure_same_dim(A, B)
    tol = CLAMP_TOL * max(1.0, abs(lo), abs(hi))
    eig_a = clamp_spectrum(A.eigenvalues, lo, hi, tol, what="A")
    spec_b = eig_hermitian(B)
    mu = clamp_spectrum(spec_b.eigenvalues, lo, hi, tol, what="B")
    vecs = spec_b.eigenvectors
    diag_a = np.real(np.einsum('ij,jk,ki->i', vecs.conj().T, A.entries, vecs))

    trace_a, trace_b, cross = _trace_terms(phi, eig_a, mu, diag_a)
    value = trace_a - trace_b - cross
    return EntropyValue.finite(value, scale=abs(trace_a) + abs(trace_b))


def entropy_S(A: HermitianOperator, phi: PhiSpec) -> float:
    """S(A) = −tr φ(A) with the continuity limits at 0 and 1."""
    eig = clamp_spectrum(A.eigenvalues, what="A")
    return float(-np.sum(phi.value(eig)))


def ssa_defect(A: HermitianOperator, dims: Sequence[int], phi: PhiSpec) -> float:
    """
    S(P₁₂AP₁₂) + S(P₂₃AP₂₃) − S(P₁₂₃AP₁₂₃) − S(P₂AP₂) for consecutive coordinate blocks.

    Compressions are restricted to their ranges; the φ(0) contributions of the
    zero-padded forms cancel between the two sides.
    """
    if len(dims) != 3 or any(int(d) < 0 for d in dims):
        raise DimensionMismatchError(f"dims must be three nonnegative block sizes, got {list(dims)}")
    d1, d2, d3 = (int(d) for d in dims)
    if d1 + d2 + d3 != A.dim:
        raise DimensionMismatchError(f"block sizes {d1}+{d2}+{d3} do not sum to dimension {A.dim}")

    a = A.entries

    def block_entropy(start: int, stop: int) -> float:
        if stop <= start:
            return 0.0
        return entropy_S(HermitianOperator(a[start:stop, start:stop]), phi)

    return (block_entropy(0, d1 + d2) + block_entropy(d1, A.dim)
            - block_entropy(0, A.dim) - block_entropy(d1, d1 + d2))


def relative_entropy_batch(pairs: Iterable[Tuple[HermitianOperator, HermitianOperator]], phi: PhiSpec,
                           policy: Optional[KernelPolicy] = None,
                           workers: Optional[int] = None) -> List[EntropyValue]:
    """Evaluate independent pairs, results ordered by input index."""
    policy = policy or KernelPolicy.from_settings()
    runner = TrialRunner(workers, label=f"entropy batch [{phi.label}]")
    return runner.map(lambda pair: relative_entropy(pair[0], pair[1], phi, policy), pairs)


def spectra_in_unit_interval(*operators: HermitianOperator) -> bool:
    """True when every operator's spectrum lies in [0, 1] within clamping tolerance."""
    try:
        for op in operators:
            clamp_spectrum(op.eigenvalues)
    except SpectrumError:
        return False
    return True
