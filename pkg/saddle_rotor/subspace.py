"""Graph subspaces, angular operators and the direct rotation."""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from . import corelin
from .blockform import BlockDecomposition, SaddlePointMatrix
from .const import CROSS_CHECK_TOL, GRAPH_COND_LIMIT
from .exceptions import ConsistencyError, GraphSubspaceError, InvariantViolation
from .spectral import SpectralSplit, spectral_split

_LOGGER: logging.Logger = logging.getLogger(__package__)

DIAGONALIZATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class AngularOperator:
    """Angular operator X: H+ -> H- (shape dim_minus x dim_plus)."""

    x: np.ndarray

    @cached_property
    def norm_x(self) -> float:
        """Return ||X||."""
        return corelin.spectral_norm(self.x)

    @property
    def dec(self) -> BlockDecomposition:
        """Decomposition the graph lives in."""
        return BlockDecomposition(self.x.shape[1], self.x.shape[0])

    @property
    def is_contraction(self) -> bool:
        """Return ||X|| <= 1."""
        return self.norm_x <= 1.0 + CROSS_CHECK_TOL

    @property
    def tan_angle(self) -> float:
        """tan of the largest angle between graph(X) and H+."""
        return self.norm_x

    @cached_property
    def y(self) -> np.ndarray:
        """Return Y = [[0, -X^T], [X, 0]]."""
        dec = self.dec
        skew = np.zeros((dec.size, dec.size))
        skew[dec.minus, dec.plus] = self.x
        skew[dec.plus, dec.minus] = -self.x.T
        return skew


def complement_angular(angular: AngularOperator) -> np.ndarray:
    """L- is the graph of -X^T over H-."""
    return -angular.x.T


def graph_projector(angular: AngularOperator):
    """Return (Q, Q_perp) for the graph of X."""
    x = angular.x
    dec = angular.dec
    inner = np.linalg.inv(np.eye(dec.dim_plus) + x.T @ x)
    proj = np.empty((dec.size, dec.size))
    proj[dec.plus, dec.plus] = inner
    proj[dec.plus, dec.minus] = inner @ x.T
    proj[dec.minus, dec.plus] = x @ inner
    proj[dec.minus, dec.minus] = x @ inner @ x.T
    proj = 0.5 * (proj + proj.T)
    return proj, np.eye(dec.size) - proj


def angular_from_projector(projector, dec: BlockDecomposition
                          ) -> AngularOperator:
    """Return X = Q21 Q11^{-1}."""
    projector = corelin.as_matrix(projector, "projector")
    block = corelin.eigh(projector[dec.plus, dec.plus], "Q11")
    smallest, largest = block.values[0], block.values[-1]
    if smallest <= 0.0 or largest > GRAPH_COND_LIMIT * smallest:
        raise GraphSubspaceError(
            f"not a graph subspace over H+: Q11 has eigenvalues in "
            f"[{smallest:.3e}, {largest:.3e}]")
    inverse = (block.vectors / block.values) @ block.vectors.T
    return AngularOperator(projector[dec.minus, dec.plus] @ inverse)


@dataclass(frozen=True, eq=False)
class OperatorAngle:
    """Operator angle Theta (on H, zero off ran(P)) and ||Theta||."""

    theta: np.ndarray
    max_angle: float


def operator_angle(first, second) -> OperatorAngle:
    """Theta with sin^2(Theta) = P Q_perp restricted to ran(P)."""
    first = corelin.as_matrix(first, "P")
    second = corelin.as_matrix(second, "Q")
    size = first.shape[0]
    dec = corelin.eigh(first, "P")
    range_basis = dec.vectors[:, dec.values > 0.5]
    if range_basis.shape[1] == 0:
        return OperatorAngle(np.zeros((size, size)), 0.0)
    sine2 = corelin.eigh(range_basis.T @ (np.eye(size) - second) @ range_basis,
                         "P Q_perp P")
    angles = np.arcsin(np.sqrt(np.clip(sine2.values, 0.0, 1.0)))
    frame = range_basis @ sine2.vectors
    return OperatorAngle((frame * angles) @ frame.T, float(np.max(angles)))


@dataclass(frozen=True, eq=False)
class DirectRotation:
    """Orthogonal U with U P = Q U and PSD diagonal blocks."""

    u: np.ndarray
    y: np.ndarray
    abs_factor: np.ndarray
    dec: BlockDecomposition

    @property
    def orthogonality_defect(self) -> float:
        """Return ||U^T U - I||."""
        return corelin.spectral_norm(self.u.T @ self.u - np.eye(self.dec.size))

    @property
    def polar_defect(self) -> float:
        """Return ||U |I+Y| - (I+Y)||."""
        return corelin.spectral_norm(self.u @ self.abs_factor -
                                     np.eye(self.dec.size) - self.y)

    @property
    def min_diagonal_eig(self) -> float:
        """Smallest eigenvalue over both diagonal blocks of U."""
        lows = []
        for part in (self.dec.plus, self.dec.minus):
            block = self.u[part, part]
            lows.append(corelin.eigvalsh(0.5 * (block + block.T))[0])
        return float(min(lows))

    def distance(self, other: "DirectRotation") -> float:
        """Return ||U - U'||."""
        return corelin.spectral_norm(self.u - other.u)


def direct_rotation_closed(angular: AngularOperator) -> DirectRotation:
    """Direct rotation from H+ onto graph(X), four-block closed form."""
    x = angular.x
    dec = angular.dec
    gram_plus = np.eye(dec.dim_plus) + x.T @ x
    gram_minus = np.eye(dec.dim_minus) + x @ x.T
    c_plus = corelin.psd_inv_sqrt(gram_plus, "I + X^T X")
    c_minus = corelin.psd_inv_sqrt(gram_minus, "I + X X^T")
    rotation = np.block([[c_plus, -x.T @ c_minus], [x @ c_plus, c_minus]])
    abs_factor = scipy.linalg.block_diag(corelin.psd_sqrt(gram_plus),
                                         corelin.psd_sqrt(gram_minus))
    return DirectRotation(rotation, angular.y, abs_factor, dec)


def direct_rotation_polar(angular: AngularOperator,
                          cross_check: bool = True) -> DirectRotation:
    """Orthogonal factor of the polar decomposition I + Y = U |I + Y|."""
    dec = angular.dec
    shifted = np.eye(dec.size) + angular.y
    rotation = corelin.polar_orthogonal(shifted)
    result = DirectRotation(rotation, angular.y,
                            corelin.psd_sqrt(shifted.T @ shifted, "|I+Y|^2"),
                            dec)
    if cross_check:
        gap = result.distance(direct_rotation_closed(angular))
        if gap > CROSS_CHECK_TOL:
            raise ConsistencyError(
                f"polar and closed-form rotations differ by {gap:.3e}")
    return result


def intertwining_defect(rotation, first, second):
    """Return (||Q U P - U P||, ||U P - Q U||)."""
    moved = rotation @ first
    return (corelin.spectral_norm(second @ moved - moved),
            corelin.spectral_norm(moved - second @ rotation))


def off_diagonal_norm(matrix, dec: BlockDecomposition) -> float:
    """Spectral norm of the off-diagonal blocks of matrix."""
    return max(corelin.spectral_norm(matrix[dec.plus, dec.minus]),
               corelin.spectral_norm(matrix[dec.minus, dec.plus]))


@dataclass(frozen=True, eq=False)
class BlockDiagonalization:
    """U^T B U with its diagonal blocks B^+ and B^-."""

    bhat: np.ndarray
    off_diag_residual: float
    bhat_plus: np.ndarray
    bhat_minus: np.ndarray
    scale: float

    @property
    def min_eig_plus(self) -> float:
        """Smallest eigenvalue of B^+."""
        return float(corelin.eigvalsh(self.bhat_plus, "B^+")[0])

    @property
    def min_eig_minus(self) -> float:
        """Smallest eigenvalue of B^-."""
        return float(corelin.eigvalsh(self.bhat_minus, "B^-")[0])

    @property
    def passed(self) -> bool:
        """Block diagonal with non-negative blocks, within tolerance."""
        slack = DIAGONALIZATION_TOL * self.scale
        return (self.off_diag_residual <= slack and
                self.min_eig_plus >= -slack and self.min_eig_minus >= -slack)

    def combined_spectrum(self) -> np.ndarray:
        """Sorted eig(B^+) together with -eig(B^-)."""
        return np.sort(np.concatenate([
            corelin.eigvalsh(self.bhat_plus, "B^+"),
            -corelin.eigvalsh(self.bhat_minus, "B^-")
        ]))


def block_diagonalize(spm: SaddlePointMatrix, rotation,
                      strict: bool = True) -> BlockDiagonalization:
    """Return U^T B U split into B^+ and B^-."""
    rotation = getattr(rotation, "u", rotation)
    dec = spm.dec
    bhat = rotation.T @ spm.matrix @ rotation
    bhat = 0.5 * (bhat + bhat.T)
    result = BlockDiagonalization(bhat=bhat,
                                  off_diag_residual=off_diagonal_norm(
                                      bhat, dec),
                                  bhat_plus=bhat[dec.plus, dec.plus],
                                  bhat_minus=-bhat[dec.minus, dec.minus],
                                  scale=max(spm.norm, 1e-300))
    if strict and not result.passed:
        raise InvariantViolation(
            f"U^T B U is not block diagonal: off-diagonal residual "
            f"{result.off_diag_residual:.3e}", {
                "off_diag_residual": result.off_diag_residual,
                "min_eig_plus": result.min_eig_plus,
                "min_eig_minus": result.min_eig_minus,
            })
    return result


def spectrum_mismatch(spm: SaddlePointMatrix,
                      result: BlockDiagonalization) -> float:
    """Largest deviation between eig(B) and eig(B^+) u -eig(B^-)."""
    return float(
        np.max(np.abs(result.combined_spectrum() - spm.spectrum.values)))


@dataclass(frozen=True)
class SimilarityReport:
    """Residuals of the similarity identities behind the Riccati equation."""

    plus_identity: float
    minus_identity: float
    transformed_off_diagonal: float
    transformed_deviation: float

    @property
    def worst(self) -> float:
        """Largest of the four residuals."""
        return max(self.plus_identity, self.minus_identity,
                   self.transformed_off_diagonal, self.transformed_deviation)


def similarity_identity_residuals(spm: SaddlePointMatrix,
                                  angular: AngularOperator
                                 ) -> SimilarityReport:
    """
    Residuals of (A+V)(I+Y) = (I+Y)(A+VY), (I-Y)(A+V) = (A-YV)(I-Y).

    Also reports how far (I-Y) B (I-Y)^{-1} is from block diagonal and from
    A - YV.
    """
    eye = np.eye(spm.size)
    diag, off, skew = spm.diagonal, spm.off_diagonal, angular.y
    full = spm.matrix
    plus_identity = corelin.spectral_norm(full @ (eye + skew) - (eye + skew) @
                                          (diag + off @ skew))
    minus_identity = corelin.spectral_norm((eye - skew) @ full -
                                           (diag - skew @ off) @ (eye - skew))
    left = (eye - skew) @ full
    transformed = scipy.linalg.solve((eye - skew).T, left.T).T
    return SimilarityReport(
        plus_identity=plus_identity,
        minus_identity=minus_identity,
        transformed_off_diagonal=off_diagonal_norm(transformed, spm.dec),
        transformed_deviation=corelin.spectral_norm(transformed -
                                                    (diag - skew @ off)))


def graph_restriction(spm: SaddlePointMatrix,
                      angular: AngularOperator) -> np.ndarray:
    """B on graph(X) in H+ coordinates: A+ + W^T X."""
    return spm.a_plus + spm.w.T @ angular.x


@dataclass(frozen=True, eq=False)
class SpectralGraph:
    """Spectral split of B with L+ as a graph over H+."""

    split: SpectralSplit
    projector: np.ndarray
    angular: AngularOperator


def spectral_angular(spm: SaddlePointMatrix,
                     zero_tol: float = None,
                     split: SpectralSplit = None) -> SpectralGraph:
    """Angular operator of the spectral subspace L+."""
    if split is None:
        split = spectral_split(spm, zero_tol)
    projector = split.projector_plus
    angular = angular_from_projector(projector, spm.dec)
    _LOGGER.debug("Spectral angular operator: ||X|| = %.6e", angular.norm_x)
    return SpectralGraph(split, projector, angular)
