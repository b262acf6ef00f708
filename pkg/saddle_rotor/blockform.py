"""Saddle-point block matrices B = [[A+, W^T], [W, -A-]]."""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from . import corelin
from .const import PSD_REJECT_TOL
from .exceptions import DimensionError, IndefiniteError

_LOGGER: logging.Logger = logging.getLogger(__package__)


@dataclass(frozen=True)
class BlockDecomposition:
    """Dimensions of H+ and H-."""

    dim_plus: int
    dim_minus: int

    def __post_init__(self):
        if self.dim_plus < 1 or self.dim_minus < 1:
            raise DimensionError(
                f"both blocks need dimension >= 1, got "
                f"({self.dim_plus}, {self.dim_minus})")

    @property
    def size(self) -> int:
        """Return dim H."""
        return self.dim_plus + self.dim_minus

    @property
    def plus(self) -> slice:
        """Coordinates of H+."""
        return slice(0, self.dim_plus)

    @property
    def minus(self) -> slice:
        """Coordinates of H-."""
        return slice(self.dim_plus, self.size)


@dataclass(frozen=True, eq=False)
class SaddlePointMatrix:  # pylint: disable=too-many-instance-attributes
    """Immutable saddle-point matrix with its diagonal/off-diagonal parts."""

    dec: BlockDecomposition
    a_plus: np.ndarray
    a_minus: np.ndarray
    w: np.ndarray

    @cached_property
    def matrix(self) -> np.ndarray:
        """Return B = A + V."""
        return self.diagonal + self.off_diagonal

    @cached_property
    def diagonal(self) -> np.ndarray:
        """Return A = diag(A+, -A-)."""
        return scipy.linalg.block_diag(self.a_plus, -self.a_minus)

    @cached_property
    def off_diagonal(self) -> np.ndarray:
        """Return V = [[0, W^T], [W, 0]]."""
        size = self.dec.size
        off = np.zeros((size, size))
        off[self.dec.minus, self.dec.plus] = self.w
        off[self.dec.plus, self.dec.minus] = self.w.T
        return off

    @cached_property
    def abs_diagonal(self) -> np.ndarray:
        """Return |A| = diag(A+, A-), blockwise."""
        return scipy.linalg.block_diag(self.a_plus, self.a_minus)

    @cached_property
    def involution(self) -> np.ndarray:
        """Return J."""
        return involution(self.dec)

    @cached_property
    def spectrum(self) -> corelin.EigDecomposition:
        """Eigendecomposition of B, computed once."""
        _LOGGER.debug("Eigendecomposition of B, size %s", self.dec.size)
        return corelin.eigh(self.matrix, "B")

    @property
    def norm(self) -> float:
        """Return ||B||."""
        values = self.spectrum.values
        return float(np.max(np.abs(values))) if values.size else 0.0

    @property
    def size(self) -> int:
        """Return dim H."""
        return self.dec.size


def _validated_psd(block, name: str) -> np.ndarray:
    """Symmetric PSD check; validates, never projects."""
    sym = corelin.symmetrize(block, name)
    values = corelin.eigvalsh(sym, name)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if values.size and values[0] < -PSD_REJECT_TOL * scale:
        raise IndefiniteError(
            f"{name} is indefinite: smallest eigenvalue {values[0]:.3e}")
    return sym


def assemble(a_plus, a_minus, w, dec: BlockDecomposition = None
            ) -> SaddlePointMatrix:
    """Assemble B from its three blocks."""
    a_plus = corelin.as_matrix(a_plus, "a_plus")
    a_minus = corelin.as_matrix(a_minus, "a_minus")
    w = corelin.as_matrix(w, "w")
    if dec is None:
        dec = BlockDecomposition(a_plus.shape[0], a_minus.shape[0])
    if a_plus.shape != (dec.dim_plus, dec.dim_plus):
        raise DimensionError(
            f"a_plus has shape {a_plus.shape}, expected "
            f"{(dec.dim_plus, dec.dim_plus)}")
    if a_minus.shape != (dec.dim_minus, dec.dim_minus):
        raise DimensionError(
            f"a_minus has shape {a_minus.shape}, expected "
            f"{(dec.dim_minus, dec.dim_minus)}")
    if w.shape != (dec.dim_minus, dec.dim_plus):
        raise DimensionError(f"w has shape {w.shape}, expected "
                             f"{(dec.dim_minus, dec.dim_plus)}")
    return SaddlePointMatrix(dec, _validated_psd(a_plus, "a_plus"),
                             _validated_psd(a_minus, "a_minus"), w)


def involution(dec: BlockDecomposition) -> np.ndarray:
    """Return J = diag(I_{H+}, -I_{H-})."""
    return np.diag(np.concatenate([np.ones(dec.dim_plus),
                                   -np.ones(dec.dim_minus)]))


@dataclass(frozen=True)
class StructureReport:
    """Commutation defects of the diagonal and off-diagonal parts with J."""

    commutator: float
    anticommutator: float

    @property
    def passed(self) -> bool:
        """Both vanish exactly for assembled matrices."""
        return self.commutator == 0.0 and self.anticommutator == 0.0


def structure_defects(j, diagonal, off_diagonal) -> StructureReport:
    """Return ||JA - AJ|| and ||JV + VJ|| for arbitrary A, V."""
    return StructureReport(
        commutator=corelin.spectral_norm(j @ diagonal - diagonal @ j),
        anticommutator=corelin.spectral_norm(j @ off_diagonal +
                                             off_diagonal @ j))


def check_structure(spm: SaddlePointMatrix) -> StructureReport:
    """Diagonal part commutes, off-diagonal part anticommutes with J."""
    return structure_defects(spm.involution, spm.diagonal, spm.off_diagonal)


def _shifted_inv_sqrt(spm: SaddlePointMatrix) -> np.ndarray:
    """Return (|A| + I)^{-1/2}, blockwise."""
    eye_plus = np.eye(spm.dec.dim_plus)
    eye_minus = np.eye(spm.dec.dim_minus)
    return scipy.linalg.block_diag(
        corelin.psd_inv_sqrt(spm.a_plus + eye_plus, "a_plus + I"),
        corelin.psd_inv_sqrt(spm.a_minus + eye_minus, "a_minus + I"))


def relative_coupling(spm: SaddlePointMatrix) -> np.ndarray:
    """Return R = (|A|+I)^{-1/2} V (|A|+I)^{-1/2}."""
    scale = _shifted_inv_sqrt(spm)
    return scale @ spm.off_diagonal @ scale


def form_bound_beta(spm: SaddlePointMatrix) -> float:
    """Optimal beta in |v[x]| <= beta (a_J[x] + ||x||^2)."""
    return corelin.spectral_norm(relative_coupling(spm))


def form_bound_holds(spm: SaddlePointMatrix, vector, beta: float) -> bool:
    """Check the relative form bound for one vector."""
    vector = np.asarray(vector, dtype=float)
    lhs = abs(vector @ spm.off_diagonal @ vector)
    rhs = beta * (vector @ spm.abs_diagonal @ vector + vector @ vector)
    return lhs <= rhs * (1.0 + 1e-12) + 1e-300


@dataclass(frozen=True)
class GapReport:
    """Spectral gap of J + R around zero."""

    coupling: np.ndarray
    min_abs_eig: float
    anticommutator: float
    shift_residual: float

    @property
    def passed(self) -> bool:
        """(-1, 1) lies in the resolvent set of J + R."""
        return self.min_abs_eig >= 1.0 - 1e-10


def min_abs_eig(j, coupling) -> float:
    """Return min |eig(J + R)|."""
    values = corelin.eigvalsh(j + coupling, "J + R")
    return float(np.min(np.abs(values))) if values.size else 1.0


def j_plus_r_gap(spm: SaddlePointMatrix) -> GapReport:
    """Gap of J + R and the identity (|A|+I)^{1/2}(J+R)(|A|+I)^{1/2} = B + J."""
    j = spm.involution
    coupling = relative_coupling(spm)
    root = scipy.linalg.block_diag(
        corelin.psd_sqrt(spm.a_plus + np.eye(spm.dec.dim_plus)),
        corelin.psd_sqrt(spm.a_minus + np.eye(spm.dec.dim_minus)))
    shifted = root @ (j + coupling) @ root
    scale = max(1.0, spm.norm)
    return GapReport(
        coupling=coupling,
        min_abs_eig=min_abs_eig(j, coupling),
        anticommutator=corelin.spectral_norm(j @ coupling + coupling @ j),
        shift_residual=corelin.spectral_norm(shifted - spm.matrix - j) /
        scale)


def random_saddle_point(rng: np.random.Generator,  # pylint: disable=too-many-arguments
                        dim_plus: int,
                        dim_minus: int,
                        coupling: float = 1.0,
                        kernel_plus: int = 0,
                        kernel_minus: int = 0,
                        plus_shift: float = 0.0) -> SaddlePointMatrix:
    """
    Random instance: A+- = M^T M, W Gaussian times coupling.

    Kernels are engineered by zeroing columns of M and the matching
    columns (H+ side) or rows (H- side) of W, so that
    dim Ker(B) cap H+- = kernel_plus/minus for generic draws.
    plus_shift > 0 adds plus_shift * I to A+ and must be used without
    kernel_plus.
    """
    if not 0 <= kernel_plus <= dim_plus or not 0 <= kernel_minus <= dim_minus:
        raise DimensionError("kernel dimension exceeds block dimension")
    m_plus = rng.standard_normal((dim_plus, dim_plus))
    m_minus = rng.standard_normal((dim_minus, dim_minus))
    w = coupling * rng.standard_normal((dim_minus, dim_plus))
    plus_idx = rng.choice(dim_plus, size=kernel_plus, replace=False)
    minus_idx = rng.choice(dim_minus, size=kernel_minus, replace=False)
    m_plus[:, plus_idx] = 0.0
    m_minus[:, minus_idx] = 0.0
    w[:, plus_idx] = 0.0
    w[minus_idx, :] = 0.0
    a_plus = m_plus.T @ m_plus + plus_shift * np.eye(dim_plus)
    a_minus = m_minus.T @ m_minus
    return assemble(a_plus, a_minus, w,
                    BlockDecomposition(dim_plus, dim_minus))


def random_off_diagonal(rng: np.random.Generator, dec: BlockDecomposition,
                        norm: float) -> np.ndarray:
    """Symmetric off-diagonal matrix with spectral norm `norm`."""
    block = rng.standard_normal((dec.dim_minus, dec.dim_plus))
    block *= norm / corelin.spectral_norm(block)
    off = np.zeros((dec.size, dec.size))
    off[dec.minus, dec.plus] = block
    off[dec.plus, dec.minus] = block.T
    return off
