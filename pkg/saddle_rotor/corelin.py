"""Dense linear-algebra kernel.

Thin, checked wrappers around LAPACK (via scipy.linalg) for the handful of
matrix functions the rest of the package needs: symmetric eigensolves,
singular values, PSD square roots and the orthogonal polar factor.
Every operator is a dense float64 ndarray.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .const import PSD_REJECT_TOL, PSD_TOL, SYM_TOL
from .exceptions import (DimensionError, IndefiniteError, SingularityError,
                         SymmetryError)

_LOGGER: logging.Logger = logging.getLogger(__package__)


@dataclass(frozen=True)
class EigDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return V diag(values) V^T."""
        return (self.vectors * self.values) @ self.vectors.T


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array."""
    try:
        matrix = np.array(data, dtype=float)
    except (TypeError, ValueError) as exception:
        raise DimensionError(
            f"{name} is not a rectangular numeric array: {exception}"
        ) from exception
    if matrix.ndim != 2:
        raise DimensionError(
            f"{name} must be two-dimensional, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DimensionError(f"{name} has non-finite entries")
    return matrix


def symmetrize(matrix, name: str = "matrix",
               sym_tol: float = SYM_TOL) -> np.ndarray:
    """Check near-symmetry and return (S + S^T)/2."""
    matrix = as_matrix(matrix, name)
    rows, cols = matrix.shape
    if rows != cols:
        raise DimensionError(f"{name} must be square, got {rows}x{cols}")
    scale = np.linalg.norm(matrix)
    defect = np.linalg.norm(matrix - matrix.T)
    if defect > sym_tol * scale:
        raise SymmetryError(
            f"{name} is not symmetric: |S - S^T| = {defect:.3e}, "
            f"|S| = {scale:.3e}")
    return 0.5 * (matrix + matrix.T)


def eigh(matrix, name: str = "matrix") -> EigDecomposition:
    """Symmetric eigendecomposition with ascending eigenvalues."""
    sym = symmetrize(matrix, name)
    if sym.shape[0] == 0:
        return EigDecomposition(np.zeros(0), np.zeros((0, 0)))
    values, vectors = scipy.linalg.eigh(sym)
    return EigDecomposition(values, vectors)


def eigvalsh(matrix, name: str = "matrix") -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix."""
    sym = symmetrize(matrix, name)
    if sym.shape[0] == 0:
        return np.zeros(0)
    return scipy.linalg.eigvalsh(sym)


def singular_values(matrix) -> np.ndarray:
    """Singular values in nonincreasing order."""
    matrix = as_matrix(matrix)
    if matrix.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(matrix)


def spectral_norm(matrix) -> float:
    """Largest singular value; zero for empty matrices."""
    sigmas = singular_values(matrix)
    return float(sigmas[0]) if sigmas.size else 0.0


def symmetric_norm(matrix) -> float:
    """Spectral norm of a symmetric matrix via its eigenvalues."""
    values = eigvalsh(matrix)
    return float(np.max(np.abs(values))) if values.size else 0.0


def projector_distance(first, second) -> float:
    """Subspace distance ||P - Q|| of two orthogonal projectors."""
    return symmetric_norm(as_matrix(first) - as_matrix(second))


def psd_function(matrix, func, name: str = "matrix") -> np.ndarray:
    """Apply func to the spectrum of a PSD matrix."""
    dec = eigh(matrix, name)
    if dec.values.size == 0:
        return np.zeros((0, 0))
    scale = float(np.max(np.abs(dec.values)))
    if dec.values[0] < -PSD_REJECT_TOL * scale:
        raise IndefiniteError(
            f"{name} is not positive semi-definite: smallest eigenvalue "
            f"{dec.values[0]:.3e}")
    values = np.clip(dec.values, 0.0, None)
    return (dec.vectors * func(values)) @ dec.vectors.T


def psd_sqrt(matrix, name: str = "matrix") -> np.ndarray:
    """Return the PSD square root."""
    return psd_function(matrix, np.sqrt, name)


def psd_inv_sqrt(matrix, name: str = "matrix") -> np.ndarray:
    """Return S^{-1/2}; refuses (never regularizes) near-singular S."""
    dec = eigh(matrix, name)
    if dec.values.size == 0:
        return np.zeros((0, 0))
    scale = float(np.max(np.abs(dec.values)))
    if scale == 0.0 or dec.values[0] < PSD_TOL * scale:
        raise SingularityError(
            f"{name} is singular for an inverse square root: smallest "
            f"eigenvalue {dec.values[0]:.3e}, threshold {PSD_TOL * scale:.3e}")
    return (dec.vectors / np.sqrt(dec.values)) @ dec.vectors.T


def polar_orthogonal(matrix) -> np.ndarray:
    """Orthogonal factor U = M (M^T M)^{-1/2} of an invertible M."""
    matrix = as_matrix(matrix)
    rows, cols = matrix.shape
    if rows != cols:
        raise DimensionError(f"polar factor needs a square matrix, "
                             f"got {rows}x{cols}")
    if rows == 0:
        return np.zeros((0, 0))
    sigmas = scipy.linalg.svdvals(matrix)
    if sigmas[0] == 0.0 or sigmas[-1] < PSD_TOL * sigmas[0]:
        raise SingularityError(
            f"matrix is rank deficient: smallest singular value "
            f"{sigmas[-1]:.3e}")
    unitary, _ = scipy.linalg.polar(matrix, side="right")
    return unitary


def range_projector(basis, dim: int = None) -> np.ndarray:
    """Orthogonal projector onto the column span of basis."""
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[1] == 0:
        size = dim if dim is not None else basis.shape[0]
        return np.zeros((size, size))
    ortho = scipy.linalg.orth(basis)
    return ortho @ ortho.T


def is_orthogonal_projector(matrix, tol: float = 1e-10) -> bool:
    """Check P^2 = P and P^T = P."""
    matrix = as_matrix(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        return False
    idem = np.linalg.norm(matrix @ matrix - matrix)
    sym = np.linalg.norm(matrix - matrix.T)
    return idem <= tol * max(1.0, matrix.shape[0]) and sym <= tol
