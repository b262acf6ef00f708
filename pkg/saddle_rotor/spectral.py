"""Spectral splitting H = L+ (+) L- of a saddle-point matrix."""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import corelin
from .blockform import BlockDecomposition, SaddlePointMatrix
from .const import AMBIGUOUS_FACTOR, DEFAULT_REGULARIZATION, KERNEL_RCOND, ZERO_TOL
from .exceptions import ClassificationError

_LOGGER: logging.Logger = logging.getLogger(__package__)


@dataclass(frozen=True, eq=False)
class SpectralSplit:  # pylint: disable=too-many-instance-attributes
    """Orthonormal bases of L+- and of the kernel pieces Ker(B) cap H+-."""

    basis_plus: np.ndarray
    basis_minus: np.ndarray
    kernel_plus: np.ndarray
    kernel_minus: np.ndarray
    kernel: np.ndarray
    eigenvalues: np.ndarray
    zero_tol: float

    @property
    def counts(self) -> tuple:
        """Return (#positive, #negative, #zero) eigenvalues."""
        values = self.eigenvalues
        return (int(np.sum(values > self.zero_tol)),
                int(np.sum(values < -self.zero_tol)), self.kernel.shape[1])

    @property
    def kernel_dims(self) -> tuple:
        """Return (dim Ker(B) cap H+, dim Ker(B) cap H-)."""
        return self.kernel_plus.shape[1], self.kernel_minus.shape[1]

    @property
    def projector_plus(self) -> np.ndarray:
        """Orthogonal projector onto L+."""
        return self.basis_plus @ self.basis_plus.T

    @property
    def projector_minus(self) -> np.ndarray:
        """Orthogonal projector onto L-."""
        return self.basis_minus @ self.basis_minus.T


def default_zero_tol(spm: SaddlePointMatrix, relative: float = ZERO_TOL
                    ) -> float:
    """Return relative * ||B||."""
    return relative * spm.norm


def plus_projector(dec: BlockDecomposition) -> np.ndarray:
    """Coordinate projector P onto H+."""
    return np.diag(np.concatenate([np.ones(dec.dim_plus),
                                   np.zeros(dec.dim_minus)]))


def null_space(matrix, tol: float) -> np.ndarray:
    """Orthonormal null space; singular values <= tol (absolute) count as 0."""
    matrix = np.asarray(matrix, dtype=float)
    cols = matrix.shape[1]
    if cols == 0:
        return np.zeros((0, 0))
    if matrix.shape[0] == 0:
        return np.eye(cols)
    _, sigmas, vh = scipy.linalg.svd(matrix, full_matrices=True)
    rank = int(np.sum(sigmas > tol))
    return vh[rank:].T


def _embed(block, dec: BlockDecomposition, part: slice) -> np.ndarray:
    """Place block-coordinate columns into H."""
    full = np.zeros((dec.size, block.shape[1]))
    full[part, :] = block
    return full


def _kernel_blocks(kernel, dec: BlockDecomposition):
    """Rotate a kernel basis into coordinate-block form (kernel_plus, kernel_minus)."""
    empty = np.zeros((dec.size, 0))
    if kernel.shape[1] == 0:
        return empty, empty
    pieces = []
    for own, other in ((dec.plus, dec.minus), (dec.minus, dec.plus)):
        coeffs = null_space(kernel[other, :], KERNEL_RCOND)
        if coeffs.shape[1] == 0:
            pieces.append(empty)
            continue
        block = scipy.linalg.orth((kernel @ coeffs)[own, :])
        pieces.append(_embed(block, dec, own))
    return pieces[0], pieces[1]


def spectral_split(spm: SaddlePointMatrix, zero_tol: float = None
                  ) -> SpectralSplit:
    """Split H into the semi-definite reducing subspaces L+ and L-."""
    if zero_tol is None:
        zero_tol = default_zero_tol(spm)
    values = spm.spectrum.values
    vectors = spm.spectrum.vectors
    magnitude = np.abs(values)
    # open band: |lambda| = 10 * zero_tol is a clean nonzero eigenvalue
    ambiguous = (magnitude > zero_tol) & (magnitude <
                                          AMBIGUOUS_FACTOR * zero_tol)
    if np.any(ambiguous):
        offending = float(values[np.argmax(ambiguous)])
        raise ClassificationError(
            f"eigenvalue {offending:.6e} lies in the ambiguous band "
            f"({zero_tol:.3e}, {AMBIGUOUS_FACTOR * zero_tol:.3e})", offending)
    positive = values > zero_tol
    negative = values < -zero_tol
    kernel = vectors[:, ~(positive | negative)]
    k_plus, k_minus = _kernel_blocks(kernel, spm.dec)
    _LOGGER.debug("Classified eigenvalues: %s positive, %s negative, %s zero",
                  int(positive.sum()), int(negative.sum()), kernel.shape[1])
    return SpectralSplit(basis_plus=np.hstack([vectors[:, positive], k_plus]),
                         basis_minus=np.hstack([vectors[:, negative],
                                                k_minus]),
                         kernel_plus=k_plus,
                         kernel_minus=k_minus,
                         kernel=kernel,
                         eigenvalues=values,
                         zero_tol=zero_tol)


@dataclass(frozen=True)
class KernelReport:
    """Outcome of the kernel splitting check."""

    dim_kernel: int
    dim_plus: int
    dim_minus: int
    block_residual: float
    residual: float
    zero_tol: float

    @property
    def kernel_dims(self) -> tuple:
        """Return (dim Ker(B) cap H+, dim Ker(B) cap H-)."""
        return self.dim_plus, self.dim_minus

    @property
    def passed(self) -> bool:
        """Ker(B) = (Ker(B) cap H+) (+) (Ker(B) cap H-)."""
        return (self.dim_kernel == self.dim_plus + self.dim_minus and
                self.block_residual <= self.zero_tol and
                self.residual <= self.zero_tol)


def _max_column_norm(matrix) -> float:
    return (float(np.max(np.linalg.norm(matrix, axis=0)))
            if matrix.shape[1] else 0.0)


def kernel_split_check(spm: SaddlePointMatrix,
                       split: SpectralSplit) -> KernelReport:
    """
    Verify that the kernel splits along H+ (+) H-.

    Both coordinate blocks of every kernel vector of B must lie in the
    kernel on their own: ||B P+ v|| and ||B P- v|| stay below zero_tol.
    """
    dec = spm.dec
    kernel = split.kernel
    plus_part = np.zeros_like(kernel)
    plus_part[dec.plus, :] = kernel[dec.plus, :]
    minus_part = kernel - plus_part
    block_residual = max(_max_column_norm(spm.matrix @ plus_part),
                         _max_column_norm(spm.matrix @ minus_part))
    pieces = np.hstack([split.kernel_plus, split.kernel_minus])
    report = KernelReport(dim_kernel=kernel.shape[1],
                          dim_plus=split.kernel_plus.shape[1],
                          dim_minus=split.kernel_minus.shape[1],
                          block_residual=block_residual,
                          residual=_max_column_norm(spm.matrix @ pieces),
                          zero_tol=split.zero_tol)
    if not report.passed:
        _LOGGER.error("Kernel does not split: %s", report)
    return report


def kernel_characterization(spm: SaddlePointMatrix, zero_tol: float = None):
    """
    Return (Null(A+) cap Null(W), Null(A-) cap Null(W^T)).

    Bases are in block coordinates (dim_plus x k and dim_minus x l).
    """
    if zero_tol is None:
        zero_tol = default_zero_tol(spm)
    plus = null_space(np.vstack([spm.a_plus, spm.w]), zero_tol)
    minus = null_space(np.vstack([spm.a_minus, spm.w.T]), zero_tol)
    return plus, minus


def embedded_characterization(spm: SaddlePointMatrix, zero_tol: float = None):
    """kernel_characterization with bases placed into H."""
    plus, minus = kernel_characterization(spm, zero_tol)
    return (_embed(plus, spm.dec, spm.dec.plus),
            _embed(minus, spm.dec, spm.dec.minus))


def regularized_projection(spm: SaddlePointMatrix, n: float,
                           zero_tol: float = None) -> np.ndarray:
    """Return E_{B + J/n}(R+)."""
    if n <= 0:
        raise ValueError(f"regularization parameter must be positive, got {n}")
    if zero_tol is None:
        zero_tol = default_zero_tol(spm)
    dec = corelin.eigh(spm.matrix + spm.involution / n, "B_n")
    close = np.abs(dec.values) <= zero_tol
    if np.any(close):
        offending = float(dec.values[np.argmax(close)])
        raise ClassificationError(
            f"B_n (n={n}) has eigenvalue {offending:.3e} within "
            f"{zero_tol:.3e} of zero", offending)
    positive = dec.vectors[:, dec.values > 0]
    return positive @ positive.T


@dataclass(frozen=True)
class RegularizationStep:
    """Distances of E_{B_n}(R+) to the limit and to H+."""

    n: float
    to_limit: float
    to_plus: float


def regularization_sweep(spm: SaddlePointMatrix,
                         ns=DEFAULT_REGULARIZATION,
                         split: SpectralSplit = None) -> list:
    """Track E_{B_n}(R+) along a sequence of n."""
    if split is None:
        split = spectral_split(spm)
    limit = split.projector_plus
    coordinate = plus_projector(spm.dec)
    steps = []
    for n in ns:
        projector = regularized_projection(spm, n, split.zero_tol)
        steps.append(
            RegularizationStep(
                n=float(n),
                to_limit=corelin.projector_distance(projector, limit),
                to_plus=corelin.projector_distance(projector, coordinate)))
        _LOGGER.debug("Regularization n=%s: %s", n, steps[-1])
    return steps


def reduction_defect(matrix, projector) -> float:
    """Return ||QB - BQ||."""
    return corelin.spectral_norm(projector @ matrix - matrix @ projector)


def semidefiniteness(spm: SaddlePointMatrix, basis) -> float:
    """Smallest eigenvalue of B compressed to span(basis)."""
    if basis.shape[1] == 0:
        return 0.0
    compressed = basis.T @ spm.matrix @ basis
    return float(corelin.eigvalsh(compressed, "compressed B")[0])


def kernel_reduces_diagonal(spm: SaddlePointMatrix,
                            split: SpectralSplit) -> float:
    """Return ||A K - K (K^T A K)||: span(K) reduces A."""
    pieces = np.hstack([split.kernel_plus, split.kernel_minus])
    if pieces.shape[1] == 0:
        return 0.0
    moved = spm.diagonal @ pieces
    return corelin.spectral_norm(moved - pieces @ (pieces.T @ moved))
