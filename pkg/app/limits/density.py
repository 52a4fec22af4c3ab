"""
Finite-rank approximation of A relative to B.

Three stages, all carried out in B's eigenbasis, each allowed eps/3 of entropy
change and eps/9 of weighted Hilbert-Schmidt gap:

    1. cut B's near-endpoint directions with Π_η = 𝟙(η ≤ B ≤ 1−η), η by bisection
    2. push the 0 and 1 eigenvalues of Π_ηAΠ_η inward by ε′
    3. keep the fewest eigen-components of A′_η − Π_ηB
"""

import logging
from typing import Optional, Tuple

import numpy as np

from app.entropy.relative import relative_entropy
from app.errors import ConvergenceError, InfiniteEntropyError, InternalConsistencyError
from app.linalg.core import CLAMP_TOL, clamp_spectrum, eig_hermitian
from app.models.entropy import KernelPolicy
from app.models.operator import HermitianOperator, ensure_same_dim
from app.models.phi import PhiSpec
from app.models.reports import FiniteRankReport, KleinConstants

logger = logging.getLogger(__name__)

EPS_FLOOR = 1e-10
INITIAL_SHIFT = 0.25
MIN_SHIFT = 1e-16
RANK_TOL = 1e-10


class _Frame:
    """A and B expressed in B's eigenbasis, with the gap weights 1 + |φ′(μ)|."""

    def __init__(self, A: HermitianOperator, B: HermitianOperator, phi: PhiSpec, policy: KernelPolicy):
        self.B = B
        self.phi = phi
        self.policy = policy
        spec = eig_hermitian(B)
        mu = clamp_spectrum(spec.eigenvalues, what="B")
        self.mu = np.where(mu <= policy.eigen_tol, 0.0, np.where(mu >= 1.0 - policy.eigen_tol, 1.0, mu))
        self.vecs = spec.eigenvectors
        self.a = self.vecs.conj().T @ A.entries @ self.vecs
        self.b = np.diag(self.mu).astype(self.a.dtype)
        slope = phi.derivative(self.mu)
        self.kernel = ~np.isfinite(slope)
        self.slope = np.where(self.kernel, 0.0, slope)
        self.weight = np.where(self.kernel, 0.0, 1.0 + np.abs(slope))

    def operator(self, matrix: np.ndarray) -> HermitianOperator:
        full = self.vecs @ matrix @ self.vecs.conj().T
        return HermitianOperator(0.5 * (full + full.conj().T))

    def entropy(self, matrix: np.ndarray) -> float:
        return relative_entropy(self.operator(matrix), self.B, self.phi, self.policy).as_float()

    def gap(self, difference: np.ndarray) -> float:
        return float(np.sum(self.weight * np.sum(np.abs(difference) ** 2, axis=1)))


def _cut(frame: _Frame, eta: float) -> Tuple[np.ndarray, np.ndarray]:
    """B + Π_η(A−B)Π_η and the mask of range(Π_η); bounded-φ′ endpoint directions always stay in."""
    endpoint = (frame.mu == 0.0) | (frame.mu == 1.0)
    distance = np.minimum(frame.mu, 1.0 - frame.mu)
    mask = (~endpoint & (distance >= eta)) | (endpoint & ~frame.kernel)
    cut = frame.b.copy()
    cut[np.ix_(mask, mask)] = frame.a[np.ix_(mask, mask)]
    return cut, mask


def _choose_eta(frame: _Frame, base: float, entropy_budget: float, gap_budget: float):
    distance = np.minimum(frame.mu, 1.0 - frame.mu)
    interior = distance[distance > 0.0]
    etas = np.concatenate(([0.0], np.unique(interior)))

    def acceptable(index: int):
        cut, mask = _cut(frame, float(etas[index]))
        change = frame.entropy(cut) - base
        ok = abs(change) <= entropy_budget and frame.gap(frame.a - cut) <= gap_budget
        return ok, cut, mask, change

    ok, cut, mask, change = acceptable(0)
    if not ok:
        raise ConvergenceError(f"kernel cut alone changes H by {change:.3e}; eps is below the tolerance floor")
    best = (0, cut, mask, change)
    lo, hi = 0, len(etas) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        ok, cut, mask, change = acceptable(mid)
        if ok:
            best = (mid, cut, mask, change)
            lo = mid
        else:
            hi = mid - 1
    index, cut, mask, change = best
    return float(etas[index]), cut, mask, change


def _shift_endpoints(frame: _Frame, cut: np.ndarray, mask: np.ndarray, entropy_budget: float, gap_budget: float):
    """Move eigenvalues 0 → ε′ and 1 → 1−ε′ of the cut block, halving ε′ until both budgets hold."""
    block = cut[np.ix_(mask, mask)]
    if block.size == 0:
        return 0.0, cut, 0.0
    lam, vecs = np.linalg.eigh(block)
    tol = frame.policy.eigen_tol
    low, high = lam <= tol, lam >= 1.0 - tol
    if not np.any(low | high):
        return 0.0, cut, 0.0

    phi = frame.phi
    slope = frame.slope[mask]
    shift = INITIAL_SHIFT
    while shift >= MIN_SHIFT:
        moved = np.where(low, shift, np.where(high, 1.0 - shift, lam))
        new_block = (vecs * moved) @ vecs.conj().T
        delta = new_block - block
        change = (float(np.sum(phi.value(moved[low | high]) - phi.value(np.clip(lam[low | high], 0.0, 1.0))))
                  - float(np.real(np.sum(slope * np.diagonal(delta)))))
        shifted = cut.copy()
        shifted[np.ix_(mask, mask)] = new_block
        if abs(change) <= entropy_budget and frame.gap(shifted - cut) <= gap_budget:
            logger.debug(f"Endpoint shift ε′ = {shift:.3e} on {int(low.sum())}+{int(high.sum())} eigenvalues")
            return shift, shifted, change
        shift /= 2.0
    raise ConvergenceError("endpoint shift could not meet the budget above ε′ = 1e-16")


def _truncate_rank(frame: _Frame, shifted: np.ndarray, mask: np.ndarray, target: float,
                   entropy_budget: float, gap_budget: float):
    """Smallest-rank eigen-truncation of A′_η − Π_ηB keeping 0 ≤ A′ ≤ 1 within both budgets."""
    difference = (shifted - frame.b)[np.ix_(mask, mask)]
    if difference.size == 0:
        return 0, shifted, 0.0
    values, vectors = np.linalg.eigh(difference)
    order = np.argsort(-np.abs(values))
    values, vectors = values[order], vectors[:, order]

    for rank in range(len(values) + 1):
        kept = (vectors[:, :rank] * values[:rank]) @ vectors[:, :rank].conj().T
        candidate = frame.b.copy()
        candidate[np.ix_(mask, mask)] += kept
        lam = np.linalg.eigvalsh(candidate)
        if lam[0] < -CLAMP_TOL or lam[-1] > 1.0 + CLAMP_TOL:
            continue
        entropy = frame.entropy(candidate)
        if not np.isfinite(entropy):
            continue
        change = entropy - target
        if abs(change) <= entropy_budget and frame.gap(shifted - candidate) <= gap_budget:
            return rank, candidate, change
    raise InternalConsistencyError("full-rank reconstruction of A′_η failed the stage budget")


def _lipschitz_bound(shifted: np.ndarray, final: np.ndarray, frame: _Frame,
                     constants: Optional[KleinConstants]) -> Optional[float]:
    if constants is None:
        return None
    eps = constants.eps
    lam = np.linalg.eigvalsh(final)
    if lam[0] < eps or lam[-1] > 1.0 - eps or frame.mu[0] < eps or frame.mu[-1] > 1.0 - eps:
        return None
    step = float(np.linalg.norm(shifted - final))
    return constants.c_eps * (step * step + float(np.linalg.norm(final - frame.b)) * step)


def _numerical_rank(matrix: np.ndarray) -> int:
    values = np.abs(np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T)))
    return int(np.sum(values > RANK_TOL * max(1.0, float(values.max(initial=0.0)))))


def finite_rank_approximation(A: HermitianOperator, B: HermitianOperator, phi: PhiSpec, eps: float,
                              policy: Optional[KernelPolicy] = None,
                              constants: Optional[KleinConstants] = None) -> Tuple[HermitianOperator, FiniteRankReport]:
    """
    Build 0 ≤ A′ ≤ 1 with A′ − B of finite rank, tr[(1+|φ′(B)|)(A−A′)²] ≤ eps and |H(A,B) − H(A′,B)| ≤ eps.

    Args:
        A, B: Operators with spectra in [0, 1] and H(A,B) finite
        phi: The generating function
        eps: Total budget, split evenly over the three stages
        policy: Endpoint tolerances; settings default when omitted
        constants: Klein constants; when given, the report carries the Lipschitz bound
            for the rank-truncation step

    Raises:
        InfiniteEntropyError: H(A,B) is infinite
        ConvergenceError: eps below the 1e-10 floor, or a stage cannot meet its budget
    """
    policy = policy or KernelPolicy.from_settings()
    ensure_same_dim(A, B)
    if not eps >= EPS_FLOOR:
        raise ConvergenceError(f"eps = {eps} is below the achievable floor {EPS_FLOOR}")
    base_value = relative_entropy(A, B, phi, policy)
    if not base_value.is_finite:
        raise InfiniteEntropyError(f"H(A,B) is {base_value}; nothing to approximate", value=base_value)
    base = base_value.value
    entropy_budget, gap_budget = eps / 3.0, eps / 9.0
    budget = {'entropy_per_stage': entropy_budget, 'gap_per_stage': gap_budget, 'total': eps}

    if np.array_equal(A.entries, B.entries):
        report = FiniteRankReport(eps, 0.0, 0.0, 0, 0, (0.0, 0.0, 0.0), 0.0, 0.0, budget)
        return A, report

    frame = _Frame(A, B, phi, policy)
    eta, cut, mask, change_1 = _choose_eta(frame, base, entropy_budget, gap_budget)
    shift, shifted, change_2 = _shift_endpoints(frame, cut, mask, entropy_budget, gap_budget)
    target = frame.entropy(shifted)
    rank, final, change_3 = _truncate_rank(frame, shifted, mask, target, entropy_budget, gap_budget)

    A_prime = frame.operator(final)
    clamp_spectrum(A_prime.eigenvalues, what="A′")
    final_value = relative_entropy(A_prime, B, phi, policy)
    entropy_change = abs(final_value.as_float() - base)
    gap = frame.gap(frame.a - final)
    if entropy_change > eps or gap > eps:
        raise InternalConsistencyError(
            f"finite-rank approximation missed its budget: |ΔH| = {entropy_change:.3e}, gap = {gap:.3e}, eps = {eps}"
        )

    report = FiniteRankReport(
        eps=eps,
        eta=eta,
        eps_shift=shift,
        rank_vs_b=rank,
        rank_vs_a=_numerical_rank(A_prime.entries - A.entries),
        stage_changes=(float(change_1), float(change_2), float(change_3)),
        entropy_change=entropy_change,
        gap=gap,
        budget=budget,
        lipschitz_bound=_lipschitz_bound(shifted, final, frame, constants),
    )
    logger.info(f"Finite-rank approximation [{phi.label}]: rank(A′−B) = {rank}, η = {eta:.3e}, "
                f"ε′ = {shift:.3e}, |ΔH| = {entropy_change:.3e}, gap = {gap:.3e}")
    return A_prime, report
