"""Tests for Riccati residuals and the fixed-point solver."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from saddle_rotor import riccati
from saddle_rotor.blockform import assemble, random_saddle_point
from saddle_rotor.exceptions import FitError, SingularityError, SymmetryError
from saddle_rotor.stokes import laplacian_eigenvalues
from saddle_rotor.subspace import AngularOperator, spectral_angular

from .conftest import CANONICAL_X, GOLDEN_X

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_operator_residual_examples(canonical, uncoupled):
    exact = AngularOperator(np.array([[CANONICAL_X]]))
    assert riccati.riccati_residual_operator(canonical, exact) <= 1e-14
    zero = AngularOperator(np.zeros((1, 1)))
    assert riccati.riccati_residual_operator(uncoupled, zero) == 0.0
    assert riccati.riccati_residual_operator(canonical,
                                             zero) == pytest.approx(1.0)


def test_operator_residual_checks_structure(canonical):
    with pytest.raises(SymmetryError):
        riccati.riccati_residual_operator(canonical, np.eye(2))
    with pytest.raises(SymmetryError):
        riccati.riccati_residual_operator(canonical,
                                          np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_angular_residual_examples(canonical, golden, random_spm):
    assert riccati.riccati_residual_angular(canonical, [[CANONICAL_X]]) <= \
        1e-14
    assert riccati.riccati_residual_angular(golden, [[GOLDEN_X]]) <= 1e-14
    zero = np.zeros_like(random_spm.w)
    assert riccati.riccati_residual_angular(random_spm, zero) == \
        pytest.approx(np.linalg.norm(random_spm.w, 2))


@given(seeds)
def test_operator_and_angular_forms_agree(seed):
    rng = np.random.default_rng(seed)
    spm = random_saddle_point(rng, 4, 3)
    angular = AngularOperator(rng.standard_normal((3, 4)))
    operator = riccati.riccati_residual_operator(spm, angular)
    block = riccati.riccati_residual_angular(spm, angular)
    assert operator <= 2.0 * block + 1e-12
    assert block <= 2.0 * operator + 1e-12


@given(seeds)
def test_spectral_x_solves_riccati(seed):
    rng = np.random.default_rng(seed)
    spm = random_saddle_point(rng, 5, 4, coupling=2.0, kernel_plus=1)
    angular = spectral_angular(spm).angular
    assert riccati.riccati_residual_angular(spm, angular) <= 1e-9 * spm.norm


def test_fixed_point_canonical(canonical):
    report = riccati.fixed_point_solve(canonical)
    assert report.converged
    assert report.iterations <= 30
    assert report.final_residual <= 1e-10 * canonical.norm
    assert report.oracle_distance <= 1e-10
    assert report.solution.x[0, 0] == pytest.approx(CANONICAL_X, abs=1e-10)
    # iterates 0, 0.5, 0.41667
    assert report.oracle_history[0] == pytest.approx(CANONICAL_X)
    assert report.oracle_history[1] == pytest.approx(0.5 - CANONICAL_X)
    assert report.oracle_history[2] == pytest.approx(5.0 / 12.0 - CANONICAL_X)


def test_fixed_point_undamped_oscillates(canonical):
    report = riccati.fixed_point_solve(canonical, damping=1.0, max_iter=20)
    assert not report.converged
    assert report.iterations == 20
    assert_allclose(report.oracle_history[:4], [
        CANONICAL_X, 1.0 - CANONICAL_X, CANONICAL_X, 1.0 - CANONICAL_X
    ])
    rows = report.history_rows()
    assert len(rows) == 21
    assert rows[0][0] == 0


def test_fixed_point_uncoupled_converges_at_once(uncoupled):
    report = riccati.fixed_point_solve(uncoupled)
    assert report.converged
    assert report.iterations == 0
    assert_allclose(report.solution.x, [[0.0]])


def test_fixed_point_refuses_singular_a_plus(kernel_three):
    with pytest.raises(SingularityError, match="A\\+ > 0"):
        riccati.fixed_point_solve(kernel_three)


def test_fixed_point_rejects_bad_damping(canonical):
    with pytest.raises(ValueError):
        riccati.fixed_point_solve(canonical, damping=0.0)
    with pytest.raises(ValueError):
        riccati.fixed_point_solve(canonical, damping=1.5)


def test_fixed_point_report_as_dict(golden):
    data = riccati.fixed_point_solve(golden).as_dict()
    assert data["converged"]
    assert data["normX"] == pytest.approx(GOLDEN_X, abs=1e-9)


def test_fixed_point_identity_corrected_sign(rng):
    printed = []
    for _ in range(20):
        spm = random_saddle_point(rng, 4, 3, plus_shift=1.0)
        angular = spectral_angular(spm).angular
        assert riccati.fixed_point_identity(spm, angular) <= 1e-9 * max(
            1.0, angular.norm_x)
        printed.append(
            riccati.fixed_point_identity(spm, angular, printed_sign=True))
    assert max(printed) > 1e-6


def test_fixed_point_map_scalar(canonical):
    for x in (0.0, 0.25, 1.0):
        assert riccati.fixed_point_map(canonical, [[x]])[0, 0] == \
            pytest.approx((1.0 - x) / (1.0 + x))


def test_perturbation_sweep(random_spm, rng):
    angular = spectral_angular(random_spm).angular
    steps = riccati.perturbation_sweep(random_spm, angular,
                                       [0.0, 1e-6, 1e-3], rng)
    scale = random_spm.norm
    assert steps[0].residual <= 1e-9 * scale
    assert steps[0].reduction <= 1e-9 * scale
    assert steps[2].residual > steps[1].residual > steps[0].residual
    assert steps[2].reduction > steps[1].reduction


def test_schatten_norm():
    assert riccati.schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        riccati.schatten_norm(np.eye(2), 0.5)


def test_decay_exponent_exact_power_laws():
    ks = np.arange(1, 101, dtype=float)
    assert riccati.decay_exponent(1.0 / ks, (1, 100)) == pytest.approx(
        -1.0, abs=1e-6)
    assert riccati.decay_exponent(3.0 * ks**-0.5,
                                  (1, 100)) == pytest.approx(-0.5, abs=1e-12)


def test_decay_exponent_errors():
    with pytest.raises(FitError):
        riccati.decay_exponent([1.0, 0.5, 0.0], (1, 3))
    with pytest.raises(FitError):
        riccati.decay_exponent([1.0, 0.5], (1, 5))


def test_laplacian_inverse_root_decay():
    lambdas = laplacian_eigenvalues(31, 200)
    sigmas = 1.0 / np.sqrt(lambdas)
    assert riccati.decay_exponent(sigmas, (10, 200)) == pytest.approx(
        -0.5, abs=0.1)


def test_golden_problem_assembles():
    spm = assemble([[1.0]], [[0.0]], [[1.0]])
    assert spectral_angular(spm).angular.norm_x == pytest.approx(
        (math.sqrt(5.0) - 1.0) / 2.0, abs=1e-12)
