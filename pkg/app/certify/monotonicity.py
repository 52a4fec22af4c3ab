"""
Numerical certification of operator monotonicity of φ′ and of contraction monotonicity of H.

Two equivalent conditions are checked:
    - φ′ operator monotone on (0, 1): Löwner matrices are positive semidefinite and the
      pinching inequality P(Aφ′(A))P ≥ (PAP)φ′(PAP) holds;
    - H(XAX*, XBX*) ≤ H(A, B) for every contraction X.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.config.settings import settings
from app.entropy.relative import relative_entropy
from app.errors import DimensionMismatchError, PreconditionError, SpectrumError
from app.linalg.core import apply_function, conjugate, doubling_isometry, restrict_to_basis
from app.linalg.sampling import (
    random_contraction,
    random_density,
    random_edge_density,
    random_projector,
    trial_rng,
)
from app.models.entropy import EntropyValue, KernelPolicy
from app.models.operator import Contraction, HermitianOperator, OrthogonalProjector
from app.models.phi import PhiSpec
from app.models.reports import CertReport, LownerMatrix, Verdict, Witness
from app.phi.quadrature import unit_rule
from app.utils.logging import LogContext, log_certification_event
from app.utils.trials import TrialRunner

logger = logging.getLogger(__name__)

# Points of Löwner matrices are drawn from this interval
LOWNER_INTERVAL = (0.01, 0.99)
# Interior spectrum used for contraction and pinching trials
INTERIOR_RANGE = (0.05, 0.95)
# Pinching needs 0 < A < 1 strictly
PINCHING_MARGIN = 1e-6
# Endpoint tolerance used when re-verifying a witness
WITNESS_EIGEN_TOL = 1e-13
# Gauss-Legendre nodes for the integral form of divided differences
WITNESS_NODES = 128


@dataclass
class _TrialOutcome:
    kind: str
    defect: float
    threshold: float
    witness: Optional[Witness] = None
    vacuous: bool = False
    discarded: bool = False

    @property
    def violates(self) -> bool:
        return not self.vacuous and not self.discarded and self.defect < self.threshold


def lowner_matrix_test(phi: PhiSpec, n_points: int, trials: int, seed: int,
                       workers: Optional[int] = None) -> CertReport:
    """
    Search for a Löwner matrix of φ′ with a negative eigenvalue.

    Each trial draws `n_points` uniform points in (0.01, 0.99). A trial violates when
    its smallest eigenvalue is below −1e-8·max|D|.
    """
    if n_points < 2:
        raise PreconditionError(f"n_points must be at least 2, got {n_points}")

    def run_trial(index: int) -> _TrialOutcome:
        rng = trial_rng(seed, index)
        points = np.unique(rng.uniform(*LOWNER_INTERVAL, n_points))
        if points.size < 2:
            return _TrialOutcome('lowner', math.inf, 0.0, vacuous=True)
        matrix = LownerMatrix.build(phi, points)
        smallest = matrix.min_eigenvalue()
        threshold = -settings.VIOLATION_THRESHOLD * matrix.max_abs()
        outcome = _TrialOutcome('lowner', smallest, threshold)
        if outcome.violates:
            confirmed = confirm_lowner_defect(phi, points)
            outcome.defect = confirmed
            if confirmed < threshold:
                outcome.witness = Witness('lowner', confirmed, seed, index, points=tuple(points.tolist()))
            else:
                logger.warning(f"Discarded lowner witness at trial {index}: eigenvalue {smallest:.3e} "
                               f"re-evaluated to {confirmed:.3e}")
                outcome.discarded = True
        return outcome

    def run_bound(index: int) -> _TrialOutcome:
        with LogContext(trial=index):
            return run_trial(index)

    runner = TrialRunner(workers, label=f"lowner [{phi.label}]")
    with LogContext(component='certify', phi=phi.label, seed=seed):
        outcomes = runner.map(run_bound, range(trials))
    report = _reduce(outcomes, trials, mode='lowner', phi=phi, seed=seed)
    report.details['n_points'] = n_points
    return report


def confirm_lowner_defect(phi: PhiSpec, points: Sequence[float]) -> float:
    """
    Smallest eigenvalue of the Löwner matrix with entries ∫₀¹ φ″(xⱼ + s(xᵢ − xⱼ)) ds.

    The integral form has no cancellation between close points, so it re-checks a
    negative eigenvalue found from difference quotients of φ′.
    """
    x = np.asarray(points, dtype=float)
    s, w = unit_rule(WITNESS_NODES)
    path = x[None, :, None] + s[None, None, :] * (x[:, None, None] - x[None, :, None])
    entries = phi.second_derivative(path) @ w
    entries = 0.5 * (entries + entries.T)
    return float(scipy.linalg.eigvalsh(entries)[0])


def _x_dphi(op: HermitianOperator, phi: PhiSpec) -> np.ndarray:
    """Symmetrized A·φ′(A)."""
    product = op.entries @ apply_function(op, phi.dphi).entries
    return 0.5 * (product + product.conj().T)


def pinching_defect(A: HermitianOperator, P: OrthogonalProjector, phi: PhiSpec) -> float:
    """Smallest eigenvalue of P(Aφ′(A))P − (PAP)φ′(PAP) on range(P)."""
    lam = A.eigenvalues
    if lam[0] < PINCHING_MARGIN or lam[-1] > 1.0 - PINCHING_MARGIN:
        raise SpectrumError(
            f"pinching needs spectrum in [{PINCHING_MARGIN:g}, 1 − {PINCHING_MARGIN:g}], "
            f"got [{lam[0]:.3e}, {lam[-1]:.12g}]"
        )
    if P.dim != A.dim:
        raise DimensionMismatchError(f"projector dimension {P.dim} does not match operator dimension {A.dim}")
    if P.rank == 0 or P.rank == P.dim:
        return 0.0

    basis = P.range_basis
    compressed = restrict_to_basis(A, basis)
    pinched = basis.conj().T @ _x_dphi(A, phi) @ basis
    difference = HermitianOperator(pinched - _x_dphi(compressed, phi))
    return float(difference.eigenvalues[0])


def _x_dphi_dense(a: np.ndarray, phi: PhiSpec) -> np.ndarray:
    values, vectors = scipy.linalg.eigh(a)
    product = a @ ((vectors * phi.derivative(values)) @ vectors.conj().T)
    return 0.5 * (product + product.conj().T)


def confirm_pinching_defect(A: HermitianOperator, P: OrthogonalProjector, phi: PhiSpec) -> float:
    """
    Pinching defect recomputed in an orthonormal basis adapted to range(P).

    In that basis P is an exact coordinate projector, so compression is a slice.
    """
    if P.rank == 0 or P.rank == P.dim:
        return 0.0
    basis = P.range_basis
    frame = np.hstack([basis, scipy.linalg.null_space(basis.conj().T)])
    a = frame.conj().T @ A.entries @ frame
    a = 0.5 * (a + a.conj().T)
    r = P.rank
    difference = _x_dphi_dense(a, phi)[:r, :r] - _x_dphi_dense(a[:r, :r], phi)
    return float(scipy.linalg.eigvalsh(0.5 * (difference + difference.conj().T))[0])


def _defect_from(before: EntropyValue, after: EntropyValue) -> float:
    # +∞ means the trial is vacuous, −∞ a violation
    if not before.is_finite:
        return math.inf
    if not after.is_finite:
        return -math.inf
    return before.value - after.value


def contraction_defect(A: HermitianOperator, B: HermitianOperator, X: Contraction, phi: PhiSpec,
                       policy: Optional[KernelPolicy] = None) -> float:
    """
    H(A,B) − H(XAX*, XBX*).

    Returns +∞ when H(A,B) is infinite (nothing to test) and −∞ when only the
    conjugated pair has infinite entropy.
    """
    policy = policy or KernelPolicy.from_settings()
    before = relative_entropy(A, B, phi, policy)
    if not before.is_finite:
        return math.inf
    after = relative_entropy(conjugate(A, X), conjugate(B, X), phi, policy)
    return _defect_from(before, after)


def _contraction_trial(phi: PhiSpec, dim: int, seed: int, index: int, edge: bool,
                       policy: KernelPolicy) -> _TrialOutcome:
    rng = trial_rng(seed, index)
    if edge:
        A = random_edge_density(dim, rng)
        B = random_edge_density(dim, rng)
    else:
        A = random_density(dim, INTERIOR_RANGE, rng)
        B = random_density(dim, INTERIOR_RANGE, rng)
    X = random_contraction(dim, dim, rng)

    before = relative_entropy(A, B, phi, policy)
    if not before.is_finite:
        return _TrialOutcome('contraction', math.inf, 0.0, vacuous=True)
    defect = _defect_from(before, relative_entropy(conjugate(A, X), conjugate(B, X), phi, policy))
    threshold = -settings.VIOLATION_THRESHOLD * (1.0 + abs(before.value))
    outcome = _TrialOutcome('contraction', defect, threshold)
    if outcome.violates:
        # Re-evaluate with a sharper endpoint test before believing the witness
        strict = policy.tightened(WITNESS_EIGEN_TOL)
        confirmed = contraction_defect(A, B, X, phi, strict)
        if confirmed < threshold:
            outcome.defect = confirmed
            outcome.witness = Witness('contraction', confirmed, seed, index, A=A, B=B, X=X.entries)
        else:
            logger.warning(f"Discarded contraction witness at trial {index}: defect {defect:.3e} "
                           f"re-evaluated to {confirmed:.3e}")
            outcome.defect = confirmed
            outcome.discarded = True
    return outcome


def _pinching_trial(phi: PhiSpec, dim: int, seed: int, index: int) -> _TrialOutcome:
    # Separate stream so pinching draws do not depend on the contraction mode
    rng = trial_rng(seed, index + (1 << 32))
    A = random_density(dim, INTERIOR_RANGE, rng)
    # A rank-one P cannot expose a violation
    P = random_projector(dim, max(1, (dim + 1) // 2), rng)
    defect = pinching_defect(A, P, phi)
    threshold = -settings.VIOLATION_THRESHOLD
    outcome = _TrialOutcome('pinching', defect, threshold)
    if outcome.violates:
        confirmed = confirm_pinching_defect(A, P, phi)
        outcome.defect = confirmed
        if confirmed < threshold:
            outcome.witness = Witness('pinching', confirmed, seed, index, A=A, P=P.carrier.entries)
        else:
            logger.warning(f"Discarded pinching witness at trial {index}: defect {defect:.3e} "
                           f"re-evaluated to {confirmed:.3e}")
            outcome.discarded = True
    return outcome


def search_counterexample(phi: PhiSpec, dim: int, trials: int, seed: int,
                          modes: Sequence[str] = ('contraction', 'pinching'),
                          edge: bool = False, policy: Optional[KernelPolicy] = None,
                          workers: Optional[int] = None) -> CertReport:
    """
    Randomized search for a violation of contraction monotonicity or of the pinching inequality.

    Args:
        phi: Function under test
        dim: Operator dimension
        trials: Number of trials per mode
        seed: Base seed; trial i uses the stream derived from (seed, i)
        modes: Any of 'contraction', 'pinching'
        edge: Draw contraction spectra in [0, 1] with exact endpoint eigenvalues
        policy: Kernel tolerances
        workers: Thread count for the trial loop

    Returns:
        CertReport with the most negative defect and the worst verified witness
    """
    if trials < 1:
        raise PreconditionError(f"trials must be at least 1, got {trials}")
    policy = policy or KernelPolicy.from_settings()
    runner = TrialRunner(workers, label=f"search [{phi.label}]")
    trial_fns = {
        'contraction': lambda i: _contraction_trial(phi, dim, seed, i, edge, policy),
        'pinching': lambda i: _pinching_trial(phi, dim, seed, i),
    }
    unknown = [mode for mode in modes if mode not in trial_fns]
    if unknown:
        raise PreconditionError(f"unknown search mode '{unknown[0]}'")

    def run_bound(fn, index: int) -> _TrialOutcome:
        with LogContext(trial=index):
            return fn(index)

    outcomes: List[_TrialOutcome] = []
    with LogContext(component='certify', phi=phi.label, seed=seed):
        for mode in modes:
            fn = trial_fns[mode]
            outcomes += runner.map(lambda i: run_bound(fn, i), range(trials))

    report = _reduce(outcomes, trials * len(modes), mode='+'.join(modes), phi=phi, seed=seed)
    report.details.update({'dim': dim, 'edge': edge, 'policy': policy.to_dict()})
    return report


def _reduce(outcomes: List[_TrialOutcome], trials: int, mode: str, phi: PhiSpec, seed: int) -> CertReport:
    """Fold trial outcomes in index order."""
    finite = [o for o in outcomes if not o.vacuous and math.isfinite(o.defect)]
    worst_defect = min((o.defect for o in finite), default=0.0)
    violating = [o for o in outcomes if o.violates and o.witness is not None]

    witness = None
    if violating:
        witness = min(violating, key=lambda o: o.defect).witness
        if not math.isfinite(worst_defect) or witness.defect < worst_defect:
            worst_defect = witness.defect

    per_kind: Dict[str, Any] = {}
    for o in outcomes:
        entry = per_kind.setdefault(o.kind, {'trials': 0, 'vacuous': 0, 'discarded': 0, 'violations': 0})
        entry['trials'] += 1
        entry['vacuous'] += int(o.vacuous)
        entry['discarded'] += int(o.discarded)
        entry['violations'] += int(o.violates)

    verdict = Verdict.VIOLATION if witness is not None else Verdict.CONSISTENT
    report = CertReport(verdict, trials, float(worst_defect), witness, mode=mode, phi=phi.label, seed=seed,
                        details={'per_mode': per_kind})
    log_certification_event(logger, mode, phi.label, verdict.value, trials, report.worst_defect, seed)
    return report


def doubling_consistency(A: HermitianOperator, B: HermitianOperator, X: Contraction, phi: PhiSpec,
                         policy: Optional[KernelPolicy] = None) -> float:
    """|H(UAU*, UBU*) − H(A,B)| for the doubling isometry U of X."""
    policy = policy or KernelPolicy.from_settings()
    U = doubling_isometry(X)
    before = relative_entropy(A, B, phi, policy)
    after = relative_entropy(conjugate(A, U), conjugate(B, U), phi, policy)
    if before.is_finite and after.is_finite:
        return abs(after.value - before.value)
    return 0.0 if before == after else math.inf


def contraction_chain_gaps(A: HermitianOperator, B: HermitianOperator, X1: Contraction, X2: Contraction,
                           phi: PhiSpec, policy: Optional[KernelPolicy] = None) -> Tuple[float, float]:
    """(H(A,B) − H(X₁AX₁*, X₁BX₁*), H(X₁AX₁*, X₁BX₁*) − H(XAX*, XBX*)) with X = X₂X₁."""
    policy = policy or KernelPolicy.from_settings()
    h0 = relative_entropy(A, B, phi, policy)
    A1, B1 = conjugate(A, X1), conjugate(B, X1)
    h1 = relative_entropy(A1, B1, phi, policy)
    h2 = relative_entropy(conjugate(A1, X2), conjugate(B1, X2), phi, policy)
    return _defect_from(h0, h1), _defect_from(h1, h2)


def theorem_equivalence(phi: PhiSpec, dim: int = 4, trials: int = 1000, seed: int = 0,
                        n_points: int = 3, workers: Optional[int] = None) -> Dict[str, Any]:
    """Run both certificates and report whether their verdicts agree."""
    lowner = lowner_matrix_test(phi, n_points, trials, seed, workers)
    search = search_counterexample(phi, dim, trials, seed, workers=workers)
    return {
        'phi': phi.label,
        'lowner': lowner.verdict.value,
        'search': search.verdict.value,
        'agree': lowner.verdict is search.verdict,
        'lowner_worst': lowner.worst_defect,
        'search_worst': search.worst_defect,
    }
