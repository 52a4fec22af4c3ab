"""Tests for the operator types and the finite-dimensional linear algebra."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.errors import DimensionMismatchError, DomainError, PreconditionError
from app.linalg.core import (
    apply_function,
    commutator_norm,
    compress,
    conjugate,
    doubling_isometry,
    eig_hermitian,
    schur_inverse_block_check,
)
from app.linalg.sampling import (
    random_contraction,
    random_density,
    random_projector,
    random_spd,
    random_unitary,
)
from app.models.operator import Contraction, HermitianOperator, OrthogonalProjector


def test_eig_of_rank_one_projector():
    A = HermitianOperator([[0.5, 0.5], [0.5, 0.5]])
    spec = eig_hermitian(A)

    assert np.allclose(spec.eigenvalues, [0.0, 1.0], atol=1e-14)
    assert spec.unitarity_defect() < 1e-12


def test_hermitian_rejects_asymmetric_matrix():
    with pytest.raises(PreconditionError):
        HermitianOperator([[0.5, 0.1], [0.2, 0.5]])


def test_hermitian_rejects_non_square_and_oversized():
    with pytest.raises(DimensionMismatchError):
        HermitianOperator(np.zeros((2, 3)))
    with pytest.raises(DimensionMismatchError):
        HermitianOperator(np.zeros((513, 513)))


def test_complex_hermitian_keeps_imaginary_part():
    A = HermitianOperator([[0.5, 0.1j], [-0.1j, 0.5]])

    assert not A.is_real
    assert "im" in A.to_dict()
    assert np.allclose(A.eigenvalues, [0.4, 0.6])


def test_apply_function_on_diagonal():
    A = HermitianOperator.diag([0.25, 0.5])
    result = apply_function(A, lambda x: x * np.log(x))

    assert np.allclose(np.diag(result.entries), [0.25 * np.log(0.25), 0.5 * np.log(0.5)])


def test_apply_function_reports_offending_eigenvalue():
    with pytest.raises(DomainError) as excinfo:
        apply_function(HermitianOperator.diag([0.0, 0.5]), np.log)

    assert excinfo.value.eigenvalue == 0.0


def test_compress_identity_and_zero_projectors():
    A = random_density(3, seed=1)

    assert np.allclose(compress(A, OrthogonalProjector.identity(3)).entries, A.entries)
    assert np.allclose(compress(A, OrthogonalProjector.zero(3)).entries, 0.0)


def test_compress_restrict_to_coordinates():
    A = HermitianOperator([[0.3, 0.1, 0.0], [0.1, 0.5, 0.2], [0.0, 0.2, 0.7]])
    block = compress(A, OrthogonalProjector.coordinate(3, [0, 2]), restrict=True)

    assert block.dim == 2
    assert np.allclose(sorted(np.diag(block.entries)), [0.3, 0.7])


def test_conjugate_by_coordinate_isometry():
    A = HermitianOperator([[0.3, 0.1], [0.1, 0.6]])
    X = Contraction([[1.0, 0.0]])

    assert np.allclose(conjugate(A, X).entries, [[0.3]])


def test_conjugate_by_unitary_keeps_spectrum():
    A = random_density(4, seed=2)
    U = random_unitary(4, seed=3)

    assert np.allclose(conjugate(A, U).eigenvalues, A.eigenvalues, atol=1e-12)


@given(st.integers(min_value=0, max_value=10_000))
def test_conjugate_by_contraction_stays_in_unit_interval(seed):
    A = random_density(4, seed=seed)
    X = random_contraction(3, 4, seed + 1)
    lam = conjugate(A, X).eigenvalues

    assert lam[0] >= -1e-10
    assert lam[-1] <= 1.0 + 1e-10


def test_contraction_rejects_large_norm():
    with pytest.raises(PreconditionError):
        Contraction(1.5 * np.eye(2))


def test_projector_rejects_non_idempotent():
    with pytest.raises(PreconditionError):
        OrthogonalProjector(HermitianOperator.diag([0.5, 1.0]))


def test_random_projector_rank_and_complement():
    P = random_projector(5, 2, seed=4)

    assert P.rank == 2
    assert P.complement().rank == 3
    assert np.allclose(P.carrier.entries + P.complement().carrier.entries, np.eye(5), atol=1e-12)


def test_doubling_isometry_is_isometric():
    X = random_contraction(3, 3, seed=5)
    U = doubling_isometry(X)

    assert (U.rows, U.cols) == (6, 3)
    assert np.allclose(U.gram(), np.eye(3), atol=1e-10)


def test_schur_complement_matches_inverse_block():
    A = random_spd(5, seed=6)
    P = OrthogonalProjector.coordinate(5, [0, 1])

    assert schur_inverse_block_check(A, P) < 1e-9


def test_sampling_is_deterministic_in_the_seed():
    first = random_density(4, (0.1, 0.9), seed=7)
    second = random_density(4, (0.1, 0.9), seed=7)

    assert np.array_equal(first.entries, second.entries)
    assert 0.1 <= first.eigenvalues[0] and first.eigenvalues[-1] <= 0.9


def test_commuting_operators_have_zero_commutator():
    A = HermitianOperator.diag([0.1, 0.2])
    B = HermitianOperator.diag([0.3, 0.4])

    assert commutator_norm(A, B) == 0.0
    assert commutator_norm(A, HermitianOperator([[0.5, 0.1], [0.1, 0.5]])) > 0.0
