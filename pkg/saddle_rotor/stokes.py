"""
Block Stokes operator on the unit square, finite differences.

Velocity and pressure share the n x n interior grid (h = 1/(n+1)).
Node (i, j) (x index i, y index j) has flat index j*n + i.

    A+ = nu * (I_2 kron L)      L: 5-point Dirichlet Laplacian
    A- = 0
    W  = v* G^T                 G: centered pressure differences

Pressure differences use reflected ghost values (p_0 = p_1,
p_{n+1} = p_n), which makes every row of G sum to exactly zero, so the
constant pressure is in Ker(G) bit for bit.
"""
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from . import corelin
from .blockform import SaddlePointMatrix, assemble
from .const import (DEFAULT_K_RANGE, DEFAULT_MAX_N, ENV_MAX_N, SCHATTEN_ORDERS,
                    SQUARE_LAMBDA1, STOKES_DIM, STOKES_ZERO_TOL)
from .exceptions import DimensionError, FitError
from .riccati import decay_exponent, schatten_norm
from .spectral import (kernel_split_check, plus_projector, spectral_split)
from .subspace import operator_angle, spectral_angular

_LOGGER: logging.Logger = logging.getLogger(__package__)

BOUND_TOL = 1e-8


def max_grid_size() -> int:
    """Grid cap from SADDLE_ROTOR_MAX_N, default 48."""
    raw = os.environ.get(ENV_MAX_N)
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        _LOGGER.warning("Ignoring non-integer %s=%s", ENV_MAX_N, raw)
        return DEFAULT_MAX_N


@dataclass(frozen=True)
class StokesProblem:
    """Discretization parameters."""

    n: int
    nu: float = 1.0
    vstar: float = 1.0
    d: int = STOKES_DIM

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError(f"need n >= 2 interior points, got {self.n}")
        if self.nu <= 0.0:
            raise ValueError(f"viscosity must be positive, got {self.nu}")
        if self.vstar < 0.0:
            raise ValueError(f"coupling must be non-negative, got {self.vstar}")
        if self.d != STOKES_DIM:
            raise DimensionError(f"only d = {STOKES_DIM} is supported")

    @property
    def h(self) -> float:
        """Mesh width."""
        return 1.0 / (self.n + 1)

    @property
    def velocity_dim(self) -> int:
        """Return 2 n^2."""
        return self.d * self.n**2

    @property
    def pressure_dim(self) -> int:
        """Return n^2."""
        return self.n**2

    @property
    def expected_kernel_dims(self) -> tuple:
        """Constants only, unless the coupling is switched off."""
        return (0, 1) if self.vstar > 0.0 else (0, self.pressure_dim)


def _second_difference(n: int) -> scipy.sparse.csr_matrix:
    """tridiag(-1, 2, -1) / h^2."""
    h = 1.0 / (n + 1)
    return scipy.sparse.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)],
                              [-1, 0, 1],
                              format="csr") / h**2


def _centered_difference(n: int) -> scipy.sparse.csr_matrix:
    """Centered first difference with reflected ghost values."""
    h = 1.0 / (n + 1)
    diff = scipy.sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1],
                              format="lil")
    diff[0, 0] = -1.0
    diff[n - 1, n - 1] = 1.0
    return diff.tocsr() / (2.0 * h)


def laplacian_sparse(n: int) -> scipy.sparse.csr_matrix:
    """5-point Dirichlet Laplacian (positive definite sign)."""
    if n < 2:
        raise DimensionError(f"need n >= 2 interior points, got {n}")
    second = _second_difference(n)
    eye = scipy.sparse.identity(n, format="csr")
    return (scipy.sparse.kron(eye, second) +
            scipy.sparse.kron(second, eye)).tocsr()


def dirichlet_laplacian_2d(n: int) -> np.ndarray:
    """Dense n^2 x n^2 Dirichlet Laplacian."""
    return laplacian_sparse(n).toarray()


def gradient_sparse(n: int) -> scipy.sparse.csr_matrix:
    """Stacked (d/dx, d/dy) from pressure nodes to velocity nodes."""
    if n < 2:
        raise DimensionError(f"need n >= 2 interior points, got {n}")
    diff = _centered_difference(n)
    eye = scipy.sparse.identity(n, format="csr")
    return scipy.sparse.vstack(
        [scipy.sparse.kron(eye, diff),
         scipy.sparse.kron(diff, eye)]).tocsr()


def gradient_matrix(n: int) -> np.ndarray:
    """Dense 2n^2 x n^2 gradient; divergence is D = -G^T."""
    return gradient_sparse(n).toarray()


def laplacian_lambda1_closed(n: int) -> float:
    """Return (8/h^2) sin^2(pi h / 2)."""
    h = 1.0 / (n + 1)
    return 8.0 / h**2 * math.sin(math.pi * h / 2.0)**2


def laplacian_eigenvalues(n: int, count: int = None) -> np.ndarray:
    """Smallest `count` eigenvalues of the discrete Laplacian, ascending."""
    dense = dirichlet_laplacian_2d(n)
    size = dense.shape[0]
    count = size if count is None else min(count, size)
    return scipy.linalg.eigh(dense,
                             eigvals_only=True,
                             subset_by_index=[0, count - 1])


def assemble_stokes(prob: StokesProblem) -> SaddlePointMatrix:
    """Saddle-point matrix of the discrete block Stokes operator."""
    lap = laplacian_sparse(prob.n)
    a_plus = prob.nu * scipy.sparse.kron(
        scipy.sparse.identity(prob.d, format="csr"), lap).toarray()
    a_minus = np.zeros((prob.pressure_dim, prob.pressure_dim))
    w = prob.vstar * gradient_sparse(prob.n).T.toarray()
    _LOGGER.debug("Assembled Stokes problem n=%s: velocity %s, pressure %s",
                  prob.n, prob.velocity_dim, prob.pressure_dim)
    return assemble(a_plus, a_minus, w)


def reynolds_star(vstar: float, nu: float, lambda1: float) -> float:
    """Return Re* = 2 v* / (nu sqrt(lambda1))."""
    return 2.0 * vstar / (nu * math.sqrt(lambda1))


def angle_bound(re_star: float) -> float:
    """Return tan(arctan(Re*) / 2)."""
    return math.tan(0.5 * math.atan(re_star))


@dataclass
class StokesReport:  # pylint: disable=too-many-instance-attributes
    """Bounds and measured quantities for one Stokes problem."""

    n: int
    nu: float
    vstar: float
    lambda1: float
    lambda1_closed: float
    re_star: float
    bound: float
    norm_x: float
    max_angle: float
    tan2theta: float
    projector_distance: float
    kernel_dims: tuple
    kernel_passed: bool
    lambda1_continuum: float = SQUARE_LAMBDA1
    re_star_continuum: float = 0.0
    bound_continuum: float = 0.0
    continuum_holds: bool = True
    sv_slope: float = None
    weyl_slope: float = None
    decay_passed: bool = None
    schatten: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    sweep: list = None

    @property
    def passed(self) -> bool:
        """Bound and kernel checks all hold."""
        return not self.failures

    def as_dict(self) -> dict:
        """JSON-ready mapping."""
        return {
            "n": self.n,
            "nu": self.nu,
            "vstar": self.vstar,
            "lambda1": self.lambda1,
            "lambda1_closed": self.lambda1_closed,
            "reStar": self.re_star,
            "bound": self.bound,
            "normX": self.norm_x,
            "maxAngle": self.max_angle,
            "tan2Theta": self.tan2theta,
            "projectorDistance": self.projector_distance,
            "kernelDims": list(self.kernel_dims),
            "kernelPassed": self.kernel_passed,
            "continuum": {
                "lambda1": self.lambda1_continuum,
                "reStar": self.re_star_continuum,
                "bound": self.bound_continuum,
                "holds": self.continuum_holds,
            },
            "svSlope": self.sv_slope,
            "weylSlope": self.weyl_slope,
            "decayPassed": self.decay_passed,
            "schatten": {str(p): v for p, v in self.schatten.items()},
            "sweep": self.sweep,
            "failures": list(self.failures),
            "passed": self.passed,
        }


@dataclass
class StokesSolution:
    """Intermediate objects kept for decay analysis and CSV export."""

    report: StokesReport
    sigmas: np.ndarray
    angular: object


def solve_stokes(prob: StokesProblem,
                 k_range=DEFAULT_K_RANGE) -> StokesSolution:
    """Run the full pipeline and keep X for follow-up analysis."""
    lambda1 = float(laplacian_eigenvalues(prob.n, 1)[0])
    re_star = reynolds_star(prob.vstar, prob.nu, lambda1)
    bound = angle_bound(re_star)

    spm = assemble_stokes(prob)
    split = spectral_split(spm, STOKES_ZERO_TOL * spm.norm)
    kernel = kernel_split_check(spm, split)
    graph = spectral_angular(spm, split=split)
    coordinate = plus_projector(spm.dec)
    angle = operator_angle(coordinate, graph.projector)
    two_theta = 2.0 * angle.max_angle
    tan2theta = (math.inf if two_theta >= math.pi / 2.0 - 1e-15 else
                 math.tan(two_theta))
    distance = corelin.projector_distance(graph.projector, coordinate)
    norm_x = graph.angular.norm_x
    sigmas = corelin.singular_values(graph.angular.x)

    re_cont = reynolds_star(prob.vstar, prob.nu, SQUARE_LAMBDA1)
    bound_cont = angle_bound(re_cont)
    report = StokesReport(n=prob.n,
                          nu=prob.nu,
                          vstar=prob.vstar,
                          lambda1=lambda1,
                          lambda1_closed=laplacian_lambda1_closed(prob.n),
                          re_star=re_star,
                          bound=bound,
                          norm_x=norm_x,
                          max_angle=angle.max_angle,
                          tan2theta=tan2theta,
                          projector_distance=distance,
                          kernel_dims=kernel.kernel_dims,
                          kernel_passed=kernel.passed,
                          re_star_continuum=re_cont,
                          bound_continuum=bound_cont,
                          continuum_holds=norm_x <= bound_cont + BOUND_TOL)
    report.schatten = {p: schatten_norm(graph.angular.x, p)
                       for p in SCHATTEN_ORDERS}
    try:
        report.sv_slope = decay_exponent(sigmas, k_range)
    except FitError as exception:
        _LOGGER.info("No singular-value fit for n=%s: %s", prob.n, exception)

    if norm_x > bound + BOUND_TOL:
        report.failures.append(f"||X|| = {norm_x:.10f} exceeds "
                               f"tan(arctan(Re*)/2) = {bound:.10f}")
    if tan2theta > re_star + BOUND_TOL:
        report.failures.append(f"tan(2||Theta||) = {tan2theta:.10f} exceeds "
                               f"Re* = {re_star:.10f}")
    if distance > math.sin(math.atan(bound)) + BOUND_TOL:
        report.failures.append(f"||Q - P|| = {distance:.10f} exceeds "
                               f"sin(arctan(bound))")
    if not kernel.passed:
        report.failures.append("kernel does not split along H+ (+) H-")
    if kernel.kernel_dims != prob.expected_kernel_dims:
        report.failures.append(f"kernel dims {kernel.kernel_dims}, expected "
                               f"{prob.expected_kernel_dims}")
    if not report.continuum_holds:
        _LOGGER.warning(
            "Continuum variant: ||X|| = %.6f above %.6f (reported only)",
            norm_x, bound_cont)
    for failure in report.failures:
        _LOGGER.error("Stokes n=%s nu=%s v*=%s: %s", prob.n, prob.nu,
                      prob.vstar, failure)
    return StokesSolution(report, sigmas, graph.angular)


def verify_bounds(prob: StokesProblem, k_range=DEFAULT_K_RANGE
                 ) -> StokesReport:
    """Check ||X|| <= tan(arctan(Re*)/2) and the kernel on one problem."""
    return solve_stokes(prob, k_range).report


@dataclass(frozen=True)
class DecayReport:
    """Fitted power laws of sigma_k(X) and lambda_k(L)."""

    sv_slope: float
    weyl_slope: float
    sigmas: np.ndarray
    lambdas: np.ndarray

    @property
    def passed(self) -> bool:
        """Weyl slope near +1 and singular values decaying like k^(-1/2)."""
        return abs(self.weyl_slope - 1.0) <= 0.1 and self.sv_slope <= -0.45


def weyl_exponent(n: int, k_range) -> float:
    """Slope of log lambda_k(L) against log k."""
    lambdas = laplacian_eigenvalues(n, k_range[1])
    return decay_exponent(lambdas, k_range)


def decay_analysis(prob: StokesProblem,
                   k_range=DEFAULT_K_RANGE,
                   solution: StokesSolution = None) -> DecayReport:
    """Fit decay exponents of sigma_k(X) and lambda_k(L) over k_range."""
    if solution is None:
        solution = solve_stokes(prob, k_range)
    available = min(solution.sigmas.size, prob.pressure_dim)
    if k_range[1] > available:
        raise FitError(f"k range {k_range} exceeds the {available} singular "
                       f"values of X at n={prob.n}")
    lambdas = laplacian_eigenvalues(prob.n, available)
    decay = DecayReport(sv_slope=decay_exponent(solution.sigmas, k_range),
                        weyl_slope=decay_exponent(lambdas, k_range),
                        sigmas=solution.sigmas,
                        lambdas=lambdas)
    if not decay.passed:
        _LOGGER.warning(
            "Decay fit over k=%s:%s off the expected power laws: Weyl slope "
            "%.3f, singular value slope %.3f", k_range[0], k_range[1],
            decay.weyl_slope, decay.sv_slope)
    return decay


def spectrum_series(sigmas, lambdas) -> list:
    """Rows (k, sigma_k, lambda_k), k from 1."""
    count = min(len(sigmas), len(lambdas))
    return [(k + 1, float(sigmas[k]), float(lambdas[k])) for k in range(count)]


@dataclass(frozen=True)
class CouplingSweep:
    """||X|| along increasing v* at fixed nu."""

    rows: list
    monotone: bool


def sweep_coupling(n: int, nu: float, vstars) -> CouplingSweep:
    """Diagnostic: ||X|| should not decrease as v* grows."""
    rows = []
    for vstar in sorted(vstars):
        report = verify_bounds(StokesProblem(n, nu, vstar))
        rows.append({
            "vstar": vstar,
            "normX": report.norm_x,
            "bound": report.bound
        })
    monotone = all(later["normX"] >= earlier["normX"] - BOUND_TOL
                   for earlier, later in zip(rows, rows[1:]))
    if not monotone:
        _LOGGER.warning("||X|| is not monotone in v* for n=%s nu=%s", n, nu)
    return CouplingSweep(rows, monotone)
