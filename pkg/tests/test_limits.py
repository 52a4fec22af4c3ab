"""Tests for truncation oracles and projection limits."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.entropy.relative import relative_entropy
from app.errors import (
    ConfigError,
    ConvergenceError,
    DimensionMismatchError,
    MonotonicityViolationError,
    PreconditionError,
    SpectrumError,
)
from app.limits import (
    BandedOracle,
    ConjugatedOracle,
    DiagonalOracle,
    EmbeddedOracle,
    FunctionOracle,
    RotatedOracle,
    TruncatableOperator,
    approximation_check,
    conjugated_limit,
    entropy_limit,
    materialize,
    oracle_from_spec,
    projection_family,
    scaled_projection_family,
    schedule_independence_check,
    truncated_entropy,
    unitary_family,
    wlsc_check,
)
from app.linalg.sampling import haar_unitary, random_contraction, random_density, trial_rng
from app.models.operator import HermitianOperator
from app.models.reports import LimitVerdict, ProjectionSchedule
from app.phi.catalog import bregman_sum, builtin, catalog_specs
from app.phi.lowner import has_lowner

SCHEDULE = (2, 4, 8, 16, 32, 64)


def _convergent_pair():
    A = DiagonalOracle(lambda i: 0.5 + 0.4 * 2.0 ** -i)
    B = DiagonalOracle([], fill=0.5)
    return A, B


def _series(phi, n=200):
    a = [0.5 + 0.4 * 2.0 ** -i for i in range(n)]
    return bregman_sum(phi, a, [0.5] * n)


def test_truncated_entropy_of_diagonal_pair():
    A, B = _convergent_pair()
    vn = builtin('vn')
    a = A.diagonal(5)

    assert truncated_entropy(A, B, vn, 5).value == pytest.approx(bregman_sum(vn, a, [0.5] * 5), abs=1e-14)


def test_convergent_sequence_reaches_series_limit():
    A, B = _convergent_pair()
    vn = builtin('vn')

    result = entropy_limit(A, B, vn, SCHEDULE)

    assert result.verdict is LimitVerdict.CONVERGED
    assert result.limit == pytest.approx(_series(vn), rel=1e-6)
    assert result.at_dim in SCHEDULE
    assert all(b.value >= a.value - 1e-12 for a, b in zip(result.values, result.values[1:]))


def test_identical_operators_converge_to_zero():
    A, _ = _convergent_pair()

    result = entropy_limit(A, A, builtin('car'), (2, 4, 8))

    assert result.converged
    assert result.limit <= 1e-15
    assert result.at_dim == 2


def test_constant_gap_keeps_increasing():
    A, B = DiagonalOracle([], fill=0.6), DiagonalOracle([], fill=0.4)

    result = entropy_limit(A, B, builtin('vn'), (2, 4, 8, 16))

    assert result.verdict is LimitVerdict.INCREASING
    assert result.limit is None
    assert result.to_dict()['verdict'] == "Increasing"


def test_kernel_mismatch_in_a_later_block_is_detected():
    A = DiagonalOracle([0.5, 0.5, 0.5, 0.3], fill=0.5)
    B = DiagonalOracle([0.5, 0.5, 0.5, 0.0], fill=0.5)

    result = entropy_limit(A, B, builtin('vn'), (2, 3, 4, 8))

    assert result.verdict is LimitVerdict.INFINITE
    assert result.values[1].is_finite
    assert not result.values[2].is_finite
    assert result.to_dict()['last_value'] is None


def test_embedded_matrix_limit_is_its_entropy():
    A3 = random_density(3, (0.1, 0.9), seed=51)
    B3 = random_density(3, (0.1, 0.9), seed=52)
    vn = builtin('vn')

    result = entropy_limit(EmbeddedOracle(A3), EmbeddedOracle(B3), vn, (1, 2, 3, 4, 8))

    assert result.converged
    assert result.at_dim == 3
    assert result.limit == pytest.approx(relative_entropy(A3, B3, vn).value, rel=1e-10)


class _ShrinkingOracle(TruncatableOperator):
    """Not a fixed operator: its blocks are inconsistent across truncation sizes."""

    def element(self, i, j):
        return 0.5 if i == j else 0.0

    def block(self, k):
        diagonal = [0.9, 0.5] if k <= 2 else [0.5] * k
        return np.diag(diagonal)


def test_decreasing_sequence_raises():
    with pytest.raises(MonotonicityViolationError) as excinfo:
        entropy_limit(_ShrinkingOracle(), DiagonalOracle([], fill=0.5), builtin('vn'), (2, 4))

    assert excinfo.value.index == 1
    assert excinfo.value.drop > 0.0


def _banded(rng, n=16):
    return BandedOracle([rng.uniform(0.3, 0.7, n), rng.uniform(-0.1, 0.1, n)])


def _noncommuting_pair(kind, seed):
    rng = trial_rng(seed, 0)
    if kind == 'banded':
        return _banded(rng), _banded(rng)
    if kind == 'embedded':
        return (EmbeddedOracle(random_density(12, (0.05, 0.95), seed=rng)),
                EmbeddedOracle(random_density(12, (0.05, 0.95), seed=rng)))
    X = random_contraction(4, 4, rng).entries
    return ConjugatedOracle(_banded(rng), X), ConjugatedOracle(_banded(rng), X)


LOWNER_PHIS = [phi for phi in catalog_specs() if has_lowner(phi.name)]


@given(st.integers(min_value=0, max_value=2**31 - 1), st.sampled_from(['banded', 'embedded', 'conjugated']))
def test_truncated_entropy_never_decreases(seed, kind):
    A, B = _noncommuting_pair(kind, seed)

    for phi in LOWNER_PHIS:
        values = [truncated_entropy(A, B, phi, k).as_float() for k in (2, 4, 8, 16)]
        assert all(np.isfinite(values))
        for before, after in zip(values, values[1:]):
            assert after >= before - 1e-9 * max(1.0, abs(before)), f"{phi.label}: {values}"


def test_limit_argument_checks():
    A, B = _convergent_pair()

    with pytest.raises(PreconditionError):
        entropy_limit(A, B, builtin('vn'), SCHEDULE, rel_tol=0.0)
    with pytest.raises(ConfigError):
        entropy_limit(A, B, builtin('vn'), (4, 2))
    with pytest.raises(ConfigError):
        ProjectionSchedule.parse("2,x,8")


def test_schedules_agree_on_the_limit():
    A, B = _convergent_pair()

    gap = schedule_independence_check(A, B, builtin('vn'), SCHEDULE, (3, 6, 12, 24, 48, 96))

    assert gap < 3e-6


def test_rotated_basis_gives_the_same_limit():
    A = DiagonalOracle([0.3, 0.7, 0.6], fill=0.5)
    B = DiagonalOracle([], fill=0.5)
    U = haar_unitary(4, 61, real=True)

    gap = schedule_independence_check(A, B, builtin('car'), (2, 4, 8, 16), (4, 8, 16), basis_rotation=U)

    assert gap < 1e-12


def test_non_convergent_schedule_fails_independence_check():
    A, B = DiagonalOracle([], fill=0.6), DiagonalOracle([], fill=0.4)

    with pytest.raises(ConvergenceError):
        schedule_independence_check(A, B, builtin('vn'), (2, 4), (3, 6))


def test_projection_family_reproduces_the_limit():
    A, B = _convergent_pair()

    assert approximation_check(A, B, builtin('vn'), projection_family(), SCHEDULE) < 1e-12


def test_unitary_family_reproduces_the_limit():
    A, B = _convergent_pair()

    assert approximation_check(A, B, builtin('vn'), unitary_family(seed=3), SCHEDULE) < 1e-9


def test_scaled_projections_approach_the_limit():
    A, B = _convergent_pair()
    schedule = ProjectionSchedule.geometric(4, 256)

    gap = approximation_check(A, B, builtin('vn'), scaled_projection_family(), schedule, rel_tol=1e-2)

    assert gap < 3e-2


def test_scaled_projections_cannot_meet_a_tight_tolerance():
    A, B = _convergent_pair()
    schedule = ProjectionSchedule.geometric(4, 256)

    # H_k = (1 − 1/k)²·H(A_k, B_k): the last doubling still moves by about 2/256
    with pytest.raises(ConvergenceError, match=r"did not reach rel_tol 1e-06 by k = 256"):
        approximation_check(A, B, builtin('vn'), scaled_projection_family(), schedule, rel_tol=1e-6)


def test_conjugated_limit_does_not_exceed_original():
    A, B = _convergent_pair()
    X = random_contraction(3, 3, seed=71)
    vn = builtin('vn')
    schedule = (4, 8, 16, 32, 64)

    base = entropy_limit(A, B, vn, schedule)
    conjugated = conjugated_limit(A, B, X, vn, schedule)

    assert conjugated.converged
    assert conjugated.limit <= base.limit + 3e-6 * (1.0 + base.limit)


def test_wlsc_constant_sequence_has_zero_defect():
    A = random_density(3, (0.1, 0.9), seed=81)
    B = random_density(3, (0.1, 0.9), seed=82)

    assert abs(wlsc_check([A] * 4, [B] * 4, A, B, builtin('vn'))) < 1e-12


def test_wlsc_interior_sequence():
    B = HermitianOperator.diag([0.5, 0.4, 0.6])
    delta = np.diag([0.1, -0.1, 0.0])
    A_seq = [HermitianOperator(B.entries + delta / n) for n in range(1, 9)]

    assert wlsc_check(A_seq, [B] * len(A_seq), B, B, builtin('car')) >= -1e-8


def test_wlsc_emerging_kernel_blows_up():
    A = HermitianOperator.diag([0.5, 0.5])
    B_seq = [HermitianOperator.diag([1.0 / n, 0.5 + 1.0 / n]) for n in (10 ** k for k in range(2, 10))]
    B_lim = HermitianOperator.diag([0.0, 0.5])

    defect = wlsc_check([A] * len(B_seq), B_seq, A, B_lim, builtin('power_neg', [0.5]), window=2)

    assert defect >= 0.0


def test_wlsc_sequence_lengths_must_match():
    A = HermitianOperator.diag([0.5])

    with pytest.raises(DimensionMismatchError):
        wlsc_check([A, A], [A], A, A, builtin('vn'))


def test_banded_oracle_fills_lower_triangle():
    oracle = BandedOracle([[0.5, 0.5, 0.5], [0.1, 0.2]])
    block = oracle.truncate(3).entries

    assert block[1, 0] == pytest.approx(0.1)
    assert block[2, 1] == pytest.approx(0.2)
    assert block[2, 0] == 0.0


def test_oracle_truncation_checks():
    with pytest.raises(DimensionMismatchError):
        DiagonalOracle([0.5]).truncate(0)
    with pytest.raises(SpectrumError):
        DiagonalOracle([1.5]).truncate(1)
    with pytest.raises(PreconditionError):
        FunctionOracle(lambda i, j: [0.5][i] if i == j else 0.0).truncate(2)


def test_conjugated_oracle_needs_a_contraction():
    with pytest.raises(PreconditionError):
        ConjugatedOracle(DiagonalOracle([], fill=0.5), 2.0 * np.eye(2))
    with pytest.raises(PreconditionError):
        RotatedOracle(DiagonalOracle([], fill=0.5), 0.5 * np.eye(2))


def test_oracle_from_spec_and_materialize():
    diagonal = oracle_from_spec({'kind': 'diagonal', 'entries': [0.2, 0.4], 'fill': 0.5})
    embedded = oracle_from_spec({'kind': 'embedded', 'entries': [[0.3, 0.1], [0.1, 0.3]]})

    first, second = materialize([diagonal, embedded], 3)

    assert np.allclose(np.diag(first.entries), [0.2, 0.4, 0.5])
    assert second.entries[2, 2] == 0.0
    with pytest.raises(PreconditionError):
        oracle_from_spec({'kind': 'sparse', 'entries': []})
