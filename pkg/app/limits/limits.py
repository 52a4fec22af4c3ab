"""
Projection limits: H(A,B) for oracle operators as the limit of H(P_kAP_k, P_kBP_k).

Verdicts are evidence at the examined truncation sizes, never proofs of convergence.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from app.entropy.relative import relative_entropy
from app.errors import ConvergenceError, DimensionMismatchError, MonotonicityViolationError, PreconditionError
from app.limits.oracles import ConjugatedOracle, RotatedOracle, TruncatableOperator
from app.linalg.core import conjugate
from app.linalg.sampling import random_unitary, trial_rng
from app.models.entropy import EntropyValue, KernelPolicy
from app.models.operator import Contraction, HermitianOperator
from app.models.phi import PhiSpec
from app.models.reports import LimitResult, LimitVerdict, ProjectionSchedule
from app.utils.logging import log_limit_event
from app.utils.trials import TrialRunner

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-9
MONOTONE_ERROR = 1e-8
ZERO_VALUE = 1e-12
WLSC_BLOWUP = 1e3

ContractionFamily = Callable[[int], Contraction]


def _as_schedule(schedule) -> ProjectionSchedule:
    if isinstance(schedule, ProjectionSchedule):
        return schedule
    return ProjectionSchedule(tuple(int(k) for k in schedule))


def truncated_entropy(A: TruncatableOperator, B: TruncatableOperator, phi: PhiSpec, k: int,
                      policy: Optional[KernelPolicy] = None) -> EntropyValue:
    """H(P_kAP_k, P_kBP_k) on the leading k×k blocks."""
    return relative_entropy(A.truncate(k), B.truncate(k), phi, policy)


def _check_monotone(dims: Sequence[int], values: Sequence[EntropyValue]) -> None:
    for index in range(1, len(values)):
        before, after = values[index - 1].as_float(), values[index].as_float()
        if math.isinf(before) and not math.isinf(after):
            raise MonotonicityViolationError(
                f"truncated entropy dropped from ∞ to {after:.6g} at k = {dims[index]}",
                index=index, drop=math.inf,
            )
        if math.isinf(before):
            continue
        drop = before - after
        scale = max(1.0, abs(before))
        if drop > MONOTONE_ERROR * scale:
            raise MonotonicityViolationError(
                f"truncated entropy decreased by {drop:.3e} between k = {dims[index - 1]} and k = {dims[index]}",
                index=index, drop=drop,
            )
        if drop > MONOTONE_SLACK * scale:
            logger.warning(f"Truncated entropy drop {drop:.3e} at k = {dims[index]} exceeds the round-off slack")


def _close(a: float, b: float, rel_tol: float) -> bool:
    if abs(a) <= ZERO_VALUE and abs(b) <= ZERO_VALUE:
        return True
    return abs(a - b) < rel_tol * max(abs(a), abs(b))


def entropy_limit(A: TruncatableOperator, B: TruncatableOperator, phi: PhiSpec, schedule,
                  rel_tol: float = 1e-6, policy: Optional[KernelPolicy] = None,
                  workers: Optional[int] = None) -> LimitResult:
    """
    Evaluate truncated entropies along the schedule and classify the sequence.

    Converged when the last two values agree within rel_tol; at_dim is the first
    truncation size from which every later value is within rel_tol of the limit.

    Raises:
        MonotonicityViolationError: a later truncation is smaller beyond 1e-8
    """
    schedule = _as_schedule(schedule)
    if not rel_tol > 0.0:
        raise PreconditionError(f"rel_tol must be positive, got {rel_tol}")
    policy = policy or KernelPolicy.from_settings()
    dims = schedule.dims
    runner = TrialRunner(workers, label=f"truncations [{phi.label}]")
    values = runner.map(lambda k: truncated_entropy(A, B, phi, k, policy), dims)
    _check_monotone(dims, values)

    if not all(v.is_finite for v in values):
        result = LimitResult(dims, values, LimitVerdict.INFINITE)
    elif len(values) >= 2 and _close(values[-2].value, values[-1].value, rel_tol):
        limit = values[-1].value
        start = len(values) - 1
        while start > 0 and _close(values[start - 1].value, limit, rel_tol):
            start -= 1
        result = LimitResult(dims, values, LimitVerdict.CONVERGED, limit=limit, at_dim=dims[start])
    else:
        result = LimitResult(dims, values, LimitVerdict.INCREASING)

    log_limit_event(logger, phi.label, result.verdict.value,
                    {'dims': list(dims), 'last': str(values[-1]), 'at_dim': result.at_dim})
    return result


def _require_converged(result: LimitResult, what: str) -> float:
    if not result.converged:
        raise ConvergenceError(f"{what} did not converge: verdict {result.verdict.value}, tail {_tail(result)}")
    return result.limit


def _tail(result: LimitResult) -> str:
    return ", ".join(str(v) for v in result.values[-2:])


def schedule_independence_check(A: TruncatableOperator, B: TruncatableOperator, phi: PhiSpec,
                                schedule1, schedule2, basis_rotation: Optional[np.ndarray] = None,
                                rel_tol: float = 1e-6, policy: Optional[KernelPolicy] = None) -> float:
    """
    |limit₁ − limit₂| / (1 + |limit₁|) for two schedules; the second runs in a rotated basis when given.

    Raises:
        ConvergenceError: either limit did not converge
    """
    first = _require_converged(entropy_limit(A, B, phi, schedule1, rel_tol, policy), "first schedule")
    if basis_rotation is not None:
        A, B = RotatedOracle(A, basis_rotation), RotatedOracle(B, basis_rotation)
    second = _require_converged(entropy_limit(A, B, phi, schedule2, rel_tol, policy), "second schedule")
    gap = abs(first - second) / (1.0 + abs(first))
    logger.info(f"Schedule independence [{phi.label}]: {first:.12g} vs {second:.12g}, gap {gap:.3e}")
    return gap


def projection_family() -> ContractionFamily:
    """X_k = P_k, the identity on the k-th truncation."""
    return Contraction.identity


def scaled_projection_family() -> ContractionFamily:
    """X_k = (1 − 1/k)·P_k, strict contractions converging strongly to 1."""
    return lambda k: Contraction((1.0 - 1.0 / k) * np.eye(k))


def unitary_family(seed: int = 0, real: bool = False) -> ContractionFamily:
    """X_k a seeded unitary on the k-th truncation."""
    return lambda k: random_unitary(k, trial_rng(seed, k), real=real)


def approximation_check(A: TruncatableOperator, B: TruncatableOperator, phi: PhiSpec,
                        X_family: ContractionFamily, schedule, rel_tol: float = 1e-6,
                        policy: Optional[KernelPolicy] = None) -> float:
    """
    |lim_k H(X_kA_kX_k*, X_kB_kX_k*) − H(A,B)| / (1 + |H(A,B)|) at matched truncation sizes.

    The family sequence must settle to `rel_tol` between the last two sizes. Families
    that approach the identity like 1 − c/k, such as scaled_projection_family, move by
    about 2c/k per doubling: a tolerance of 1e-2 is reached near k = 256, while 1e-6
    would need k in the millions. Pick the tolerance to match the family.

    Raises:
        ConvergenceError: the family sequence or the reference limit did not converge;
            the message names the tolerance the examined sizes do reach
    """
    schedule = _as_schedule(schedule)
    policy = policy or KernelPolicy.from_settings()
    reference = _require_converged(entropy_limit(A, B, phi, schedule, rel_tol, policy), "reference limit")

    values: List[float] = []
    for k in schedule:
        X = X_family(k)
        if X.cols != k:
            raise DimensionMismatchError(f"family member at k = {k} has {X.cols} columns")
        value = relative_entropy(conjugate(A.truncate(k), X), conjugate(B.truncate(k), X), phi, policy)
        values.append(value.as_float())

    if len(values) < 2 or not all(math.isfinite(v) for v in values[-2:]):
        raise ConvergenceError(f"approximating family did not converge: tail {values[-2:]}")
    if not _close(values[-2], values[-1], rel_tol):
        reached = abs(values[-1] - values[-2]) / max(abs(values[-2]), abs(values[-1]))
        raise ConvergenceError(
            f"approximating family did not reach rel_tol {rel_tol:g} by k = {schedule.dims[-1]}: "
            f"last relative change {reached:.3e}, so rel_tol must be at least that at these sizes"
        )
    gap = abs(values[-1] - reference) / (1.0 + abs(reference))
    log_limit_event(logger, phi.label, "Approximation", {'reference': reference, 'family_limit': values[-1], 'gap': gap})
    return gap


def conjugated_limit(A: TruncatableOperator, B: TruncatableOperator, X: Contraction, phi: PhiSpec,
                     schedule, rel_tol: float = 1e-6, policy: Optional[KernelPolicy] = None) -> LimitResult:
    """Limit of the pair conjugated by X ⊕ 1, for comparison against the unconjugated limit."""
    if X.rows != X.cols:
        raise DimensionMismatchError(f"conjugating contraction must be square, got {X.rows}×{X.cols}")
    return entropy_limit(ConjugatedOracle(A, X.entries), ConjugatedOracle(B, X.entries), phi,
                         schedule, rel_tol, policy)


def wlsc_check(A_seq: Sequence[HermitianOperator], B_seq: Sequence[HermitianOperator],
               A_lim: HermitianOperator, B_lim: HermitianOperator, phi: PhiSpec,
               policy: Optional[KernelPolicy] = None, window: Optional[int] = None,
               blowup_bound: float = WLSC_BLOWUP) -> float:
    """
    Trailing-window liminf of H(A_n,B_n) minus H(A_lim,B_lim).

    When the limit pair has infinite entropy the bound M = blowup_bound stands in for
    it, so a nonnegative result means the sequence has exceeded M.
    """
    if len(A_seq) != len(B_seq) or not A_seq:
        raise DimensionMismatchError("A_seq and B_seq must be non-empty and of equal length")
    policy = policy or KernelPolicy.from_settings()
    window = window or max(1, len(A_seq) // 2)
    values = [relative_entropy(a, b, phi, policy).as_float() for a, b in zip(A_seq, B_seq)]
    liminf = min(values[-window:])
    limit = relative_entropy(A_lim, B_lim, phi, policy)
    reference = limit.value if limit.is_finite else blowup_bound
    defect = liminf - reference
    logger.debug(f"wlsc [{phi.label}]: liminf {liminf:.6g} vs {limit} over window {window}")
    return defect
