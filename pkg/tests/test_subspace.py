"""Tests for graph subspaces and the direct rotation."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from saddle_rotor import corelin, subspace
from saddle_rotor.blockform import BlockDecomposition, random_saddle_point
from saddle_rotor.exceptions import GraphSubspaceError, InvariantViolation
from saddle_rotor.spectral import plus_projector
from saddle_rotor.subspace import AngularOperator

from .conftest import CANONICAL_X, GOLDEN_X

seeds = st.integers(min_value=0, max_value=2**32 - 1)
DEC = BlockDecomposition(1, 1)


def rotation(angle):
    """Plane rotation by angle."""
    return np.array([[math.cos(angle), -math.sin(angle)],
                     [math.sin(angle), math.cos(angle)]])


def test_graph_projector_examples():
    projector, complement = subspace.graph_projector(AngularOperator(
        np.ones((1, 1))))
    assert_allclose(projector, 0.5 * np.ones((2, 2)))
    assert_allclose(complement, 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]]))
    projector, _ = subspace.graph_projector(AngularOperator(np.zeros((1, 1))))
    assert_allclose(projector, np.diag([1.0, 0.0]))
    projector, _ = subspace.graph_projector(
        AngularOperator(np.array([[CANONICAL_X]])))
    assert projector[0, 0] == pytest.approx(1.0 / (4.0 - 2.0 * math.sqrt(2.0)))
    assert corelin.is_orthogonal_projector(projector)


def test_angular_from_projector_examples(canonical):
    assert_allclose(
        subspace.angular_from_projector(0.5 * np.ones((2, 2)), DEC).x, [[1.0]])
    assert_allclose(
        subspace.angular_from_projector(np.diag([1.0, 0.0]), DEC).x, [[0.0]])
    graph = subspace.spectral_angular(canonical)
    assert graph.angular.norm_x == pytest.approx(CANONICAL_X, abs=1e-12)
    assert graph.angular.is_contraction


def test_angular_from_projector_rejects_non_graph():
    with pytest.raises(GraphSubspaceError):
        subspace.angular_from_projector(np.diag([0.0, 1.0]), DEC)


def test_complement_is_graph_over_minus(rng):
    angular = AngularOperator(rng.standard_normal((3, 4)))
    _, complement = subspace.graph_projector(angular)
    basis = np.vstack([subspace.complement_angular(angular), np.eye(3)])
    assert_allclose(complement, corelin.range_projector(basis), atol=1e-12)


def test_operator_angle_examples(canonical):
    coordinate = np.diag([1.0, 0.0])
    angle = subspace.operator_angle(coordinate, 0.5 * np.ones((2, 2)))
    assert angle.max_angle == pytest.approx(math.pi / 4.0)
    assert math.sin(angle.max_angle)**2 == pytest.approx(0.5)
    assert subspace.operator_angle(coordinate,
                                   coordinate).max_angle == pytest.approx(0.0)
    graph = subspace.spectral_angular(canonical)
    angle = subspace.operator_angle(coordinate, graph.projector)
    assert angle.max_angle == pytest.approx(math.pi / 8.0, abs=1e-12)
    assert math.tan(angle.max_angle) == pytest.approx(graph.angular.norm_x)


def test_direct_rotation_closed_examples():
    assert_allclose(
        subspace.direct_rotation_closed(AngularOperator(np.zeros((1, 1)))).u,
        np.eye(2))
    assert_allclose(
        subspace.direct_rotation_closed(AngularOperator(np.ones((1, 1)))).u,
        rotation(math.pi / 4.0))
    closed = subspace.direct_rotation_closed(
        AngularOperator(np.array([[CANONICAL_X]])))
    assert_allclose(closed.u, rotation(math.pi / 8.0), atol=1e-12)
    assert_allclose(closed.u, [[0.92388, -0.38268], [0.38268, 0.92388]],
                    atol=1e-5)


def test_direct_rotation_polar_examples():
    polar = subspace.direct_rotation_polar(AngularOperator(np.ones((1, 1))))
    assert_allclose(polar.u, rotation(math.pi / 4.0), atol=1e-14)
    polar = subspace.direct_rotation_polar(AngularOperator(np.zeros((1, 1))))
    assert_allclose(polar.u, np.eye(2), atol=1e-15)


@given(seeds, st.floats(min_value=0.01, max_value=10.0))
def test_rotations_agree_for_random_x(seed, scale):
    rng = np.random.default_rng(seed)
    angular = AngularOperator(scale * rng.standard_normal((5, 3)))
    closed = subspace.direct_rotation_closed(angular)
    polar = subspace.direct_rotation_polar(angular)
    assert closed.distance(polar) <= 1e-10
    assert closed.orthogonality_defect <= 1e-12
    assert closed.polar_defect <= 1e-10 * (1.0 + angular.norm_x)
    assert closed.min_diagonal_eig >= -1e-12


def test_block_diagonalize_canonical(canonical):
    graph = subspace.spectral_angular(canonical)
    closed = subspace.direct_rotation_closed(graph.angular)
    result = subspace.block_diagonalize(canonical, closed)
    root2 = math.sqrt(2.0)
    assert_allclose(result.bhat, np.diag([root2, -root2]), atol=1e-12)
    assert result.off_diag_residual <= 1e-12
    assert subspace.spectrum_mismatch(canonical, result) <= 1e-12


def test_block_diagonalize_golden(golden):
    graph = subspace.spectral_angular(golden)
    assert graph.angular.x[0, 0] == pytest.approx(GOLDEN_X, abs=1e-12)
    result = subspace.block_diagonalize(
        golden, subspace.direct_rotation_closed(graph.angular))
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    assert_allclose(np.diag(result.bhat), [phi, 1.0 - phi], atol=1e-12)


def test_block_diagonalize_uncoupled(uncoupled):
    graph = subspace.spectral_angular(uncoupled)
    closed = subspace.direct_rotation_closed(graph.angular)
    assert_allclose(closed.u, np.eye(2), atol=1e-15)
    result = subspace.block_diagonalize(uncoupled, closed)
    assert_allclose(result.bhat, uncoupled.matrix, atol=1e-15)
    assert result.off_diag_residual == pytest.approx(0.0, abs=1e-15)


def test_block_diagonalize_strict_raises(canonical):
    with pytest.raises(InvariantViolation) as info:
        subspace.block_diagonalize(canonical, np.eye(2))
    assert info.value.diagnostics["off_diag_residual"] == pytest.approx(1.0)
    loose = subspace.block_diagonalize(canonical, np.eye(2), strict=False)
    assert not loose.passed


@given(seeds, st.integers(min_value=0, max_value=2),
       st.integers(min_value=0, max_value=2))
def test_random_block_diagonalization(seed, kernel_plus, kernel_minus):
    rng = np.random.default_rng(seed)
    spm = random_saddle_point(rng, 6, 5, coupling=2.0,
                              kernel_plus=kernel_plus,
                              kernel_minus=kernel_minus)
    graph = subspace.spectral_angular(spm)
    assert graph.angular.norm_x <= 1.0 + 1e-10
    coordinate = plus_projector(spm.dec)
    assert corelin.projector_distance(graph.projector,
                                      coordinate) <= math.sqrt(2.0) / 2.0 + \
        1e-10
    closed = subspace.direct_rotation_closed(graph.angular)
    result = subspace.block_diagonalize(spm, closed)
    assert result.off_diag_residual <= 1e-9 * spm.norm
    assert subspace.spectrum_mismatch(spm, result) <= 1e-9 * spm.norm
    moved, commuted = subspace.intertwining_defect(closed.u, coordinate,
                                                   graph.projector)
    assert max(moved, commuted) <= 1e-10


def test_similarity_identities(canonical, uncoupled):
    exact = subspace.similarity_identity_residuals(
        canonical, AngularOperator(np.array([[CANONICAL_X]])))
    assert exact.worst <= 1e-12
    zero = subspace.similarity_identity_residuals(
        uncoupled, AngularOperator(np.zeros((1, 1))))
    assert zero.worst == pytest.approx(0.0, abs=1e-15)
    small = subspace.similarity_identity_residuals(
        canonical, AngularOperator(np.array([[CANONICAL_X + 1e-3]])))
    larger = subspace.similarity_identity_residuals(
        canonical, AngularOperator(np.array([[CANONICAL_X + 2e-3]])))
    assert 1e-4 * canonical.norm <= small.worst <= 1e-2 * canonical.norm
    assert larger.worst / small.worst == pytest.approx(2.0, rel=0.05)


def test_graph_restriction_spectrum(random_spm):
    graph = subspace.spectral_angular(random_spm)
    result = subspace.block_diagonalize(
        random_spm, subspace.direct_rotation_closed(graph.angular))
    restricted = np.sort(
        np.linalg.eigvals(subspace.graph_restriction(random_spm,
                                                     graph.angular)).real)
    assert_allclose(restricted,
                    corelin.eigvalsh(result.bhat_plus),
                    atol=1e-9 * random_spm.norm)
