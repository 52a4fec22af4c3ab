"""Tests for the relative entropy, its kernel semantics and the closed-form oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.entropy.oracles import gaussian_kl_oracle, gaussian_matrix_entropy, vn_identity_defect
from app.entropy.relative import (
    entropy_S,
    relative_entropy,
    relative_entropy_batch,
    relative_entropy_on_interval,
    spectra_in_unit_interval,
    ssa_defect,
)
from app.errors import ConfigError, DimensionMismatchError, InternalConsistencyError, SpectrumError
from app.linalg.sampling import make_rng, random_density, random_spd, random_unitary
from app.models.entropy import EntropyValue, InfiniteReason, KernelPolicy
from app.models.operator import HermitianOperator
from app.phi.catalog import bregman_scalar, bregman_sum, builtin, catalog_specs

seeds = st.integers(min_value=0, max_value=2**31 - 1)


@given(seeds, st.integers(min_value=1, max_value=6))
def test_commuting_pairs_match_scalar_bregman(seed, dim):
    rng = make_rng(seed)
    a, b = rng.uniform(0.0, 1.0, dim), rng.uniform(0.0, 1.0, dim)
    A, B = HermitianOperator.diag(a), HermitianOperator.diag(b)

    for phi in catalog_specs():
        value = relative_entropy(A, B, phi)
        assert value.is_finite
        assert abs(value.value - bregman_sum(phi, a, b)) <= 1e-10 * dim


@given(seeds)
def test_relative_entropy_is_nonnegative_and_faithful(seed):
    A = random_density(4, seed=seed)
    B = random_density(4, (0.01, 0.99), seed=seed + 1)

    for phi in catalog_specs():
        assert relative_entropy(A, B, phi).value >= 0.0
        assert relative_entropy(A, A, phi).value <= 1e-12


def test_kernel_mismatch_at_zero_is_infinite():
    value = relative_entropy(HermitianOperator.diag([0.3, 0.5]), HermitianOperator.diag([0.0, 0.5]), builtin('vn'))

    assert not value.is_finite
    assert value.reason is InfiniteReason.KERNEL_MISMATCH_AT_0
    assert value.to_dict() == {'kind': 'infinite', 'value': None, 'reason': 'KernelMismatchAt0'}


def test_kernel_mismatch_at_one_is_infinite():
    value = relative_entropy(HermitianOperator.diag([0.5, 0.5]), HermitianOperator.diag([1.0, 0.5]), builtin('car'))

    assert value.reason is InfiniteReason.KERNEL_MISMATCH_AT_1


def test_matching_kernel_is_dropped_from_the_trace():
    vn = builtin('vn')
    value = relative_entropy(HermitianOperator.diag([0.0, 0.3]), HermitianOperator.diag([0.0, 0.5]), vn)

    assert value.value == pytest.approx(bregman_scalar(vn, 0.3, 0.5), abs=1e-14)


def test_matching_kernel_in_a_rotated_basis():
    vn = builtin('vn')
    U = random_unitary(3, seed=11).entries
    A = HermitianOperator(U @ np.diag([0.0, 0.3, 0.6]) @ U.conj().T)
    B = HermitianOperator(U @ np.diag([0.0, 0.5, 0.4]) @ U.conj().T)
    expected = bregman_scalar(vn, 0.3, 0.5) + bregman_scalar(vn, 0.6, 0.4)

    assert relative_entropy(A, B, vn).value == pytest.approx(expected, abs=1e-9)


def test_small_mismatch_on_kernel_is_detected():
    value = relative_entropy(HermitianOperator.diag([1e-6, 0.5]), HermitianOperator.diag([0.0, 0.5]), builtin('vn'))

    assert not value.is_finite


def test_bounded_derivative_ignores_kernel_semantics():
    value = relative_entropy(HermitianOperator.diag([0.3, 0.5]), HermitianOperator.diag([0.0, 0.5]),
                             builtin('power_pos', [1.5]))

    assert value.value == pytest.approx(0.3 ** 1.5, abs=1e-14)


def test_eigenvalue_within_tolerance_counts_as_endpoint():
    A = HermitianOperator.diag([0.3, 0.5])
    B = HermitianOperator.diag([1e-12, 0.5])

    assert not relative_entropy(A, B, builtin('vn')).is_finite
    assert relative_entropy(A, B, builtin('vn'), KernelPolicy(eigen_tol=1e-13)).is_finite


def test_dimension_and_spectrum_checks():
    with pytest.raises(DimensionMismatchError):
        relative_entropy(HermitianOperator.diag([0.5]), HermitianOperator.diag([0.5, 0.5]), builtin('vn'))
    with pytest.raises(SpectrumError):
        relative_entropy(HermitianOperator.diag([1.1, 0.5]), HermitianOperator.diag([0.5, 0.5]), builtin('vn'))


def test_interval_form_outside_unit_interval():
    gaussian = builtin('gaussian')
    A, B = HermitianOperator.diag([2.0, 3.0]), HermitianOperator.diag([1.0, 4.0])
    expected = bregman_scalar(gaussian, 2.0, 1.0) + bregman_scalar(gaussian, 3.0, 4.0)

    value = relative_entropy_on_interval(A, B, gaussian, (1.0, 4.0))

    assert value.value == pytest.approx(expected, rel=1e-12)


@given(seeds)
def test_vn_matches_umegaki_identity(seed):
    A = random_density(5, (0.01, 0.99), seed=seed)
    B = random_density(5, (0.01, 0.99), seed=seed + 1)

    assert vn_identity_defect(A, B) <= 1e-9 * 5


@given(seeds, st.integers(min_value=2, max_value=8))
def test_gaussian_kl_oracle(seed, dim):
    A = random_spd(dim, seed)
    B = random_spd(dim, seed + 1)

    assert abs(gaussian_matrix_entropy(A, B) - gaussian_kl_oracle(A, B)) <= 1e-9 * dim


@given(seeds, st.sampled_from([(1, 2, 1), (2, 1, 1), (1, 1, 2)]))
def test_strong_subadditivity(seed, dims):
    A = random_density(4, (0.05, 0.95), seed=seed)

    for phi in catalog_specs():
        assert ssa_defect(A, dims, phi) >= -1e-9


SSA_SEEDS = range(10_000)


def _ssa_defects(phi):
    for seed in SSA_SEEDS:
        yield seed, ssa_defect(random_density(6, seed=seed), (2, 2, 2), phi)


def test_ssa_fails_for_non_monotone_derivative():
    x4 = builtin('x4')

    witness = next(((seed, d) for seed, d in _ssa_defects(x4) if d < -1e-9), None)

    assert witness is not None, "no negative SSA defect for x4 in 10^4 seeds"


def test_ssa_holds_on_the_same_seeds_for_vn():
    worst = min(_ssa_defects(builtin('vn')), key=lambda item: item[1])

    assert worst[1] >= -1e-9, f"seed {worst[0]}"


def test_ssa_rejects_bad_blocks():
    with pytest.raises(DimensionMismatchError):
        ssa_defect(random_density(4, seed=1), (1, 1, 1), builtin('vn'))


def test_entropy_of_projector_is_zero():
    assert entropy_S(HermitianOperator.diag([0.0, 1.0]), builtin('car')) == 0.0


def test_batch_preserves_input_order():
    pairs = [(random_density(3, seed=i), random_density(3, (0.1, 0.9), seed=100 + i)) for i in range(6)]
    vn = builtin('vn')

    batch = relative_entropy_batch(pairs, vn, workers=3)

    assert [v.value for v in batch] == [relative_entropy(a, b, vn).value for a, b in pairs]


def test_spectra_in_unit_interval():
    assert spectra_in_unit_interval(HermitianOperator.diag([0.0, 1.0]))
    assert not spectra_in_unit_interval(HermitianOperator.diag([-0.1, 0.5]))


def test_roundoff_negatives_are_clamped():
    assert EntropyValue.finite(-1e-12).value == 0.0
    with pytest.raises(InternalConsistencyError):
        EntropyValue.finite(-1e-3)
    assert EntropyValue.finite(0.25).to_dict() == {'kind': 'finite', 'value': 0.25}
    assert math.isinf(EntropyValue.infinite(InfiniteReason.KERNEL_MISMATCH_AT_1).as_float())


def test_kernel_policy_bounds():
    with pytest.raises(ConfigError):
        KernelPolicy(eigen_tol=0.0)
    with pytest.raises(ConfigError):
        KernelPolicy(match_tol=1e-3)
