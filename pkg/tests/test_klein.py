"""Tests for the Klein constants, the Klein-type bounds and the trace-positivity lemma."""

import numpy as np
import pytest

from app.certify.klein_lemma import klein_trace_positivity, scalar_grid_minimum
from app.entropy.relative import relative_entropy
from app.errors import InfiniteEntropyError, PreconditionError, SpectrumError
from app.klein.bounds import (
    hilbert_schmidt_gap,
    klein_lower_defect,
    klein_upper_defect,
    lipschitz_defect,
    upper_gap,
)
from app.klein.constants import derive_constants, derive_lower_constant, smooth_upper_constant
from app.klein.survey import klein_survey
from app.linalg.sampling import haar_unitary, random_density
from app.models.operator import HermitianOperator
from app.phi.catalog import builtin

GRID = 200


@pytest.mark.parametrize("name", ['vn', 'neg_log_shift'])
def test_constants_are_positive_and_stable(name):
    constants = derive_constants(builtin(name), grid=GRID)

    assert constants.c_lower > 0.0
    assert constants.c_upper > 0.0
    assert constants.c_eps > 0.0
    assert constants.stable
    assert max(constants.metadata['relative_changes']) < 0.05


def test_vn_lower_constant_near_quadratic_limit():
    # inf of the lower ratio is 1/4, reached as x, y → 1
    assert derive_lower_constant(builtin('vn'), GRID) == pytest.approx(0.9 * 0.25, rel=0.02)


def test_lower_constant_needs_strict_convexity():
    with pytest.raises(PreconditionError):
        derive_lower_constant(builtin('power_pos', [1.0]), GRID)


def test_smooth_upper_constant_only_for_bounded_curvature():
    assert smooth_upper_constant(builtin('x4')) == pytest.approx(3.0 / (2.0 * 0.9))
    assert smooth_upper_constant(builtin('vn')) is None


def test_klein_bounds_hold_on_random_pairs(catalog_phi):
    constants = derive_constants(catalog_phi, grid=GRID)

    for seed in range(8):
        A = random_density(4, (0.0, 1.0), seed=seed)
        B = random_density(4, (0.1, 0.9), seed=1000 + seed)
        A_prime = random_density(4, (0.1, 0.9), seed=2000 + seed)

        assert klein_lower_defect(A, B, catalog_phi, constants) >= -1e-8
        assert klein_upper_defect(A, B, catalog_phi, constants) >= -1e-8
        assert lipschitz_defect(A, A_prime, B, catalog_phi, 0.1, constants) >= -1e-8


def test_hilbert_schmidt_gap_on_commuting_pair():
    A = HermitianOperator.diag([0.3, 0.6])
    B = HermitianOperator.diag([0.5, 0.5])
    weight = 1.0 + abs(1.0 + np.log(0.5))

    assert hilbert_schmidt_gap(A, B, builtin('vn')) == pytest.approx(weight * (0.04 + 0.01), rel=1e-12)


def test_hilbert_schmidt_gap_is_infinite_across_divergent_kernel():
    A = HermitianOperator.diag([0.3, 0.5])
    B = HermitianOperator.diag([0.0, 0.5])

    assert hilbert_schmidt_gap(A, B, builtin('vn')) == float('inf')
    assert np.isfinite(hilbert_schmidt_gap(A, B, builtin('power_pos')))


def test_lower_defect_refuses_infinite_entropy():
    constants = derive_constants(builtin('vn'), grid=GRID)

    with pytest.raises(InfiniteEntropyError):
        klein_lower_defect(HermitianOperator.diag([0.3, 0.5]), HermitianOperator.diag([0.0, 0.5]),
                           builtin('vn'), constants)


def test_upper_gap_needs_interior_b():
    with pytest.raises(SpectrumError):
        upper_gap(HermitianOperator.diag([0.3, 0.5]), HermitianOperator.diag([0.0, 0.5]))


def test_lipschitz_defect_checks_the_band():
    constants = derive_constants(builtin('vn'), grid=GRID, eps=0.1)
    A = HermitianOperator.diag([0.3, 0.5])
    B = HermitianOperator.diag([0.5, 0.5])

    with pytest.raises(SpectrumError):
        lipschitz_defect(A, HermitianOperator.diag([0.05, 0.5]), B, builtin('vn'), 0.1, constants)
    with pytest.raises(PreconditionError):
        lipschitz_defect(A, A, B, builtin('vn'), 0.05, constants)


def test_trace_positivity_of_squared_difference():
    A = random_density(3, seed=41)
    B = random_density(3, seed=42)
    f_list = [lambda x: x ** 2, lambda x: x, lambda x: 1.0]
    g_list = [lambda y: 1.0, lambda y: -2.0 * y, lambda y: y ** 2]

    total = klein_trace_positivity(f_list, g_list, A, B, (0.0, 1.0))

    assert total == pytest.approx(np.linalg.norm(A.entries - B.entries) ** 2, abs=1e-12)
    assert scalar_grid_minimum(f_list, g_list, (0.0, 1.0)) == pytest.approx(0.0, abs=1e-15)


def test_trace_positivity_rejects_failing_scalar_hypothesis():
    A = random_density(2, seed=43)

    with pytest.raises(PreconditionError):
        klein_trace_positivity([lambda x: x], [lambda y: -1.0], A, A, (0.0, 1.0))


def test_survey_reports_bounds_hold():
    result = klein_survey(builtin('vn'), dim=3, trials=4, seed=1, grid=100)

    assert result['verdict'] == "BoundsHold"
    assert set(result['defects']) == {'lower', 'upper', 'lipschitz'}
    assert result['defects']['lower']['violations'] == 0
    assert result['defects']['upper']['witness']['seed'] == 1


def test_power_pos_2_lower_constant():
    # ratio is 1/(1 + 2y), smallest at y = 1
    assert derive_lower_constant(builtin('power_pos', [2.0]), GRID) == pytest.approx(0.9 / 3.0, rel=1e-9)


@pytest.mark.parametrize("name", ['vn', 'neg_log_shift'])
def test_constants_stable_from_500_to_1000(name):
    constants = derive_constants(builtin(name), grid=500)

    assert constants.metadata['refined_grid'] == 1000
    assert constants.stable
    assert max(constants.metadata['relative_changes']) < 0.05


def test_entropy_is_locally_quadratic(catalog_phi):
    B = random_density(4, (0.2, 0.8), seed=11)
    direction = random_density(4, seed=12).entries - 0.5 * np.eye(4)

    def ratio(t):
        A = HermitianOperator(B.entries + t * direction)
        return relative_entropy(A, B, catalog_phi).value / t ** 2

    assert ratio(1e-3) > 0.0
    assert ratio(1e-4) == pytest.approx(ratio(1e-3), rel=1e-2)


def test_rank_one_perturbation_gap_is_quadratic():
    vn = builtin('vn')
    B = random_density(4, (0.2, 0.8), seed=5)
    v = haar_unitary(4, 6)[:, :1]
    projector = v @ v.conj().T
    constants = derive_constants(vn, grid=GRID)

    scaled = []
    for t in (1e-1, 1e-2, 1e-3):
        A = HermitianOperator(B.entries + t * projector)
        scaled.append(hilbert_schmidt_gap(A, B, vn) / t ** 2)
        assert klein_lower_defect(A, B, vn, constants) >= -1e-8

    assert scaled[0] > 0.0
    assert scaled[1] == pytest.approx(scaled[0], rel=1e-9)
    assert scaled[2] == pytest.approx(scaled[0], rel=1e-9)
