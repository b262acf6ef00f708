"""
Riccati residuals and the damped fixed-point solver.

The angular operator X of a reducing graph subspace solves

    X A+ + A- X + X W^T X - W = 0.

Solving for X^T gives (A+ + X^T W) X^T = (W - A- X)^T, i.e. the map

    G(X)^T = A+^{-1/2} F^{-1} ((W - A- X) A+^{-1/2})^T,
    F = I + A+^{-1/2} X^T W A+^{-1/2}.

The variant with (W + A- X) does not fix the spectral X unless A- = 0; it
is kept only behind printed_sign=True for fault injection.
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.stats

from . import corelin
from .blockform import SaddlePointMatrix
from .const import CONVERGENCE_TOL, DEFAULT_DAMPING, DEFAULT_MAX_ITER
from .exceptions import DimensionError, FitError, SingularityError, SymmetryError
from .spectral import reduction_defect
from .subspace import (AngularOperator, graph_projector,
                       similarity_identity_residuals, spectral_angular)

_LOGGER: logging.Logger = logging.getLogger(__package__)

STRUCTURE_TOL = 1e-12


def _as_x(spm: SaddlePointMatrix, angular) -> np.ndarray:
    """Accept an AngularOperator or a raw matrix."""
    x = corelin.as_matrix(getattr(angular, "x", angular), "X")
    if x.shape != (spm.dec.dim_minus, spm.dec.dim_plus):
        raise DimensionError(f"X has shape {x.shape}, expected "
                             f"{(spm.dec.dim_minus, spm.dec.dim_plus)}")
    return x


def riccati_residual_operator(spm: SaddlePointMatrix, skew) -> float:
    """Return ||AY - YA - YVY + V|| for skew off-diagonal Y."""
    skew = corelin.as_matrix(getattr(skew, "y", skew), "Y")
    if skew.shape != (spm.size, spm.size):
        raise DimensionError(f"Y has shape {skew.shape}, expected "
                             f"{(spm.size, spm.size)}")
    scale = max(1.0, np.linalg.norm(skew))
    if np.linalg.norm(skew + skew.T) > STRUCTURE_TOL * scale:
        raise SymmetryError("Y must be skew-symmetric")
    j = spm.involution
    if np.linalg.norm(j @ skew + skew @ j) > STRUCTURE_TOL * scale:
        raise SymmetryError("Y must be off-diagonal (JY = -YJ)")
    diag, off = spm.diagonal, spm.off_diagonal
    return corelin.spectral_norm(diag @ skew - skew @ diag -
                                 skew @ off @ skew + off)


def riccati_matrix(spm: SaddlePointMatrix, angular) -> np.ndarray:
    """Return X A+ + A- X + X W^T X - W."""
    x = _as_x(spm, angular)
    return x @ spm.a_plus + spm.a_minus @ x + x @ spm.w.T @ x - spm.w


def riccati_residual_angular(spm: SaddlePointMatrix, angular) -> float:
    """Return ||X A+ + A- X + X W^T X - W||."""
    return corelin.spectral_norm(riccati_matrix(spm, angular))


class FixedPointMap:
    """The map G with A+^{-1/2} computed once."""

    def __init__(self, spm: SaddlePointMatrix, printed_sign: bool = False):
        self.spm = spm
        self.printed_sign = printed_sign
        try:
            self.root_inv = corelin.psd_inv_sqrt(spm.a_plus, "a_plus")
        except SingularityError as exception:
            raise SingularityError(
                f"the fixed-point map needs A+ > 0: {exception}") from exception

    def __call__(self, x: np.ndarray) -> np.ndarray:
        spm = self.spm
        sign = 1.0 if self.printed_sign else -1.0
        factor = (np.eye(spm.dec.dim_plus) +
                  self.root_inv @ x.T @ spm.w @ self.root_inv)
        rhs = self.root_inv @ (spm.w + sign * spm.a_minus @ x).T
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            try:
                solved = scipy.linalg.solve(factor, rhs)
            except (np.linalg.LinAlgError,
                    scipy.linalg.LinAlgWarning) as exception:
                raise SingularityError(
                    f"F = I + A+^-1/2 X^T W A+^-1/2 is singular: {exception}"
                ) from exception
        return (self.root_inv @ solved).T


def fixed_point_map(spm: SaddlePointMatrix,
                    angular,
                    printed_sign: bool = False) -> np.ndarray:
    """Return G(X)."""
    return FixedPointMap(spm, printed_sign)(_as_x(spm, angular))


def fixed_point_identity(spm: SaddlePointMatrix,
                         angular,
                         printed_sign: bool = False) -> float:
    """Return ||G(X) - X||; zero at any solution when A+ > 0."""
    x = _as_x(spm, angular)
    return corelin.spectral_norm(fixed_point_map(spm, x, printed_sign) - x)


@dataclass
class RiccatiReport:  # pylint: disable=too-many-instance-attributes
    """Outcome of fixed_point_solve."""

    solution: AngularOperator
    residual_history: list = field(default_factory=list)
    oracle_history: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    oracle_distance: float = float("nan")
    message: str = ""

    @property
    def final_residual(self) -> float:
        """Last recorded residual."""
        return self.residual_history[-1]

    def history_rows(self) -> list:
        """Rows (iter, residual, oracle_distance)."""
        return [(k, res, dist) for k, (res, dist) in enumerate(
            zip(self.residual_history, self.oracle_history))]

    def as_dict(self) -> dict:
        """JSON-ready mapping."""
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "finalResidual": self.final_residual,
            "oracleDistance": self.oracle_distance,
            "normX": self.solution.norm_x,
            "solution": self.solution.x,
            "message": self.message,
        }


def fixed_point_solve(spm: SaddlePointMatrix,  # pylint: disable=too-many-arguments
                      x0=None,
                      damping: float = DEFAULT_DAMPING,
                      tol: float = CONVERGENCE_TOL,
                      max_iter: int = DEFAULT_MAX_ITER,
                      oracle=None,
                      printed_sign: bool = False) -> RiccatiReport:
    """Damped iteration X <- (1 - a) X + a G(X), stopped on the residual."""
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    if max_iter < 0:
        raise ValueError(f"max_iter must be non-negative, got {max_iter}")
    mapping = FixedPointMap(spm, printed_sign)
    if oracle is None:
        oracle = spectral_angular(spm).angular
    oracle_x = _as_x(spm, oracle)
    x = (np.zeros_like(spm.w) if x0 is None else _as_x(spm, x0).copy())
    threshold = tol * spm.norm
    report = RiccatiReport(solution=AngularOperator(x))
    for iteration in range(max_iter + 1):
        residual = riccati_residual_angular(spm, x)
        distance = corelin.spectral_norm(x - oracle_x)
        report.residual_history.append(residual)
        report.oracle_history.append(distance)
        report.iterations = iteration
        report.solution = AngularOperator(x)
        report.oracle_distance = distance
        _LOGGER.debug("Iteration %s: residual %.3e, oracle distance %.3e",
                      iteration, residual, distance)
        if residual <= threshold:
            report.converged = True
            report.message = f"converged after {iteration} iterations"
            return report
        if iteration == max_iter:
            break
        try:
            x = (1.0 - damping) * x + damping * mapping(x)
        except SingularityError as exception:
            report.message = f"aborted at iteration {iteration}: {exception}"
            _LOGGER.warning("Fixed-point iteration %s", report.message)
            return report
    report.message = f"no convergence within {max_iter} iterations"
    _LOGGER.warning("Fixed-point iteration: %s (residual %.3e)",
                    report.message, report.final_residual)
    return report


@dataclass(frozen=True)
class PerturbationStep:
    """Residuals of a perturbed angular operator."""

    eps: float
    residual: float
    reduction: float
    similarity: float


def perturbation_sweep(spm: SaddlePointMatrix, angular, eps_list,
                       rng: np.random.Generator) -> list:
    """Perturb X along a fixed random unit direction and track residuals."""
    x = _as_x(spm, angular)
    direction = rng.standard_normal(x.shape)
    direction /= max(corelin.spectral_norm(direction), 1e-300)
    steps = []
    for eps in eps_list:
        moved = AngularOperator(x + eps * direction)
        projector, _ = graph_projector(moved)
        steps.append(
            PerturbationStep(
                eps=float(eps),
                residual=riccati_residual_angular(spm, moved),
                reduction=reduction_defect(spm.matrix, projector),
                similarity=similarity_identity_residuals(spm, moved).worst))
    return steps


def schatten_norm(matrix, order: float) -> float:
    """Return (sum sigma_k^p)^(1/p)."""
    if order < 1.0:
        raise ValueError(f"Schatten order must be >= 1, got {order}")
    sigmas = corelin.singular_values(matrix)
    return float(np.sum(sigmas**order)**(1.0 / order))


def decay_exponent(sigmas, k_range) -> float:
    """Least-squares slope of log sigma_k against log k over k_range."""
    low, high = k_range
    sigmas = np.asarray(sigmas, dtype=float)
    if low < 1 or high <= low or high > sigmas.size:
        raise FitError(f"k range {low}:{high} does not fit {sigmas.size} "
                       f"values")
    window = sigmas[low - 1:high]
    if np.any(window <= 0.0):
        raise FitError(f"non-positive values in k range {low}:{high}")
    ks = np.arange(low, high + 1, dtype=float)
    return float(scipy.stats.linregress(np.log(ks), np.log(window)).slope)
