"""
Randomized invariant suite.

Every case draws its own generator from (seed, case index), so the suite
is deterministic for a fixed seed no matter how many workers run it.
Cases are spread over a thread pool driven by asyncio and reduced in case
order.
"""
import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import blockform, corelin, riccati, spectral, subspace
from .const import (CONTRACTION_BOUND, CROSS_CHECK_TOL, DEFAULT_CASES,
                    DEFAULT_COUPLING, DEFAULT_NMAX, DEFAULT_REGULARIZATION,
                    DEFAULT_SEED)
from .exceptions import ClassificationError

_LOGGER: logging.Logger = logging.getLogger(__package__)

MIN_SIZE = 4
THEOREM_TOL = 1e-9
REDUCTION_TOL = 1e-10
SMALL_RESIDUAL = 1e-12
ANGLE_TOL = 1e-8
GAP_TOL = 1e-10
MONOTONE_SLACK = 1e-12
LIMIT_TOL = 1e-6
LIMIT_SCALE = 1e8
PERTURBATIONS = (0.0, 1e-8, 1e-4, 1e-2)
PRE_LIMIT = (0.1, 1.0) + DEFAULT_REGULARIZATION
FORM_SAMPLES = 8

INVARIANTS = [
    "contraction",
    "kernel_split",
    "kernel_characterization",
    "reduction",
    "semidefinite",
    "block_diagonal",
    "spectrum_match",
    "riccati_spectral",
    "riccati_equivalence",
    "rotation_cross_check",
    "intertwining",
    "angle_tan",
    "j_plus_r_gap",
    "form_bound",
    "fixed_point_identity",
    "regularization",
    "pre_limit",
]


@dataclass
class CaseResult:
    """Checks and measured values of one random case."""

    index: int
    dims: tuple = (0, 0)
    kernel: tuple = (0, 0)
    checks: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    skipped: str = None

    def record(self, invariant: str, ok: bool, value: float) -> None:
        """Store one check."""
        self.checks[invariant] = bool(ok)
        self.values[invariant] = float(value)


@dataclass
class VerifySummary:
    """Pass/fail counts per invariant, reduced in case order."""

    seed: int
    cases: int
    nmax: int
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        """Nothing was checked."""
        return self.cases == 0

    @property
    def passed(self) -> bool:
        """No invariant failed on any case."""
        return not self.failures

    def as_dict(self) -> dict:
        """JSON-ready mapping."""
        return {
            "seed": self.seed,
            "cases": self.cases,
            "nmax": self.nmax,
            "counts": self.counts,
            "failures": self.failures,
            "skipped": self.skipped,
            "vacuous": self.vacuous,
            "passed": self.passed,
        }


def _draw_dims(rng: np.random.Generator, nmax: int):
    """Total size in [4, nmax], both blocks non-empty, up to two kernels."""
    size = int(rng.integers(MIN_SIZE, nmax + 1))
    dim_plus = int(rng.integers(1, size))
    dim_minus = size - dim_plus
    kernel_plus = int(rng.integers(0, min(2, dim_plus - 1) + 1))
    kernel_minus = int(rng.integers(0, min(2, dim_minus - 1) + 1))
    return dim_plus, dim_minus, kernel_plus, kernel_minus


def _check_subspaces(result: CaseResult, spm, split, graph) -> None:
    """Contraction, kernel, reduction and semi-definiteness checks."""
    scale = max(spm.norm, 1e-300)
    coordinate = spectral.plus_projector(spm.dec)
    distance = corelin.projector_distance(graph.projector, coordinate)
    result.record("contraction", distance <= CONTRACTION_BOUND + 1e-10,
                  distance)

    kernel = spectral.kernel_split_check(spm, split)
    result.record("kernel_split",
                  kernel.passed and kernel.kernel_dims == result.kernel,
                  kernel.block_residual)

    plus, minus = spectral.embedded_characterization(spm, split.zero_tol)
    gap = max(
        corelin.projector_distance(corelin.range_projector(plus, spm.size),
                                   corelin.range_projector(
                                       split.kernel_plus, spm.size)),
        corelin.projector_distance(corelin.range_projector(minus, spm.size),
                                   corelin.range_projector(
                                       split.kernel_minus, spm.size)))
    result.record("kernel_characterization",
                  plus.shape[1] == kernel.dim_plus and
                  minus.shape[1] == kernel.dim_minus and gap <= ANGLE_TOL, gap)

    defect = spectral.reduction_defect(spm.matrix, graph.projector)
    result.record("reduction", defect <= THEOREM_TOL * scale, defect)

    low_plus = spectral.semidefiniteness(spm, split.basis_plus)
    high_minus = (float(
        corelin.eigvalsh(
            split.basis_minus.T @ spm.matrix @ split.basis_minus)[-1])
                  if split.basis_minus.shape[1] else 0.0)
    worst = max(-low_plus, high_minus)
    result.record("semidefinite", worst <= THEOREM_TOL * scale, worst)


def _check_rotation(result: CaseResult, spm, graph) -> None:
    """Block diagonalization, rotation cross-check and angles."""
    scale = max(spm.norm, 1e-300)
    angular = graph.angular
    closed = subspace.direct_rotation_closed(angular)
    polar = subspace.direct_rotation_polar(angular, cross_check=False)

    diagonal = subspace.block_diagonalize(spm, closed, strict=False)
    result.record("block_diagonal", diagonal.passed,
                  diagonal.off_diag_residual)
    mismatch = subspace.spectrum_mismatch(spm, diagonal)
    result.record("spectrum_match", mismatch <= THEOREM_TOL * scale, mismatch)

    cross = closed.distance(polar)
    result.record("rotation_cross_check", cross <= CROSS_CHECK_TOL, cross)

    coordinate = spectral.plus_projector(spm.dec)
    moved, commuted = subspace.intertwining_defect(closed.u, coordinate,
                                                   graph.projector)
    worst = max(moved, commuted)
    result.record("intertwining", worst <= CROSS_CHECK_TOL, worst)

    angle = subspace.operator_angle(coordinate, graph.projector)
    deviation = abs(math.tan(angle.max_angle) - angular.tan_angle)
    result.record("angle_tan", deviation <= ANGLE_TOL * (1.0 + angular.norm_x),
                  deviation)


def _check_riccati(result: CaseResult, spm, graph,
                   rng: np.random.Generator) -> None:
    """Spectral X solves the Riccati equation; both forms agree."""
    scale = max(spm.norm, 1e-300)
    angular = graph.angular
    residual = riccati.riccati_residual_angular(spm, angular)
    result.record("riccati_spectral", residual <= THEOREM_TOL * scale,
                  residual)

    operator = riccati.riccati_residual_operator(spm, angular)
    ok = (operator <= 2.0 * residual + SMALL_RESIDUAL * scale and
          residual <= 2.0 * operator + SMALL_RESIDUAL * scale)
    for step in riccati.perturbation_sweep(spm, angular, PERTURBATIONS, rng):
        if step.residual <= SMALL_RESIDUAL * scale:
            ok = ok and step.reduction <= REDUCTION_TOL * scale
    result.record("riccati_equivalence", ok, abs(operator - residual))


def _check_forms(result: CaseResult, spm, rng: np.random.Generator) -> None:
    """J + R gap and the relative form bound."""
    gap = blockform.j_plus_r_gap(spm)
    norm = 10.0**rng.uniform(-2.0, 2.0)
    random_r = blockform.random_off_diagonal(rng, spm.dec, norm)
    random_gap = blockform.min_abs_eig(spm.involution, random_r)
    low = min(gap.min_abs_eig, random_gap)
    result.record(
        "j_plus_r_gap", low >= 1.0 - GAP_TOL and
        gap.shift_residual <= GAP_TOL * spm.size, low)

    beta = blockform.form_bound_beta(spm)
    vectors = rng.standard_normal((FORM_SAMPLES, spm.size))
    holds = all(blockform.form_bound_holds(spm, vector, beta)
                for vector in vectors)
    result.record("form_bound", holds, beta)


def _check_fixed_point(result: CaseResult, rng: np.random.Generator,
                       printed_sign: bool) -> None:
    """G(X) = X at the spectral X for A+ > 0 and A- != 0."""
    dim_plus, dim_minus = result.dims
    definite = blockform.random_saddle_point(rng,
                                             dim_plus,
                                             dim_minus,
                                             coupling=DEFAULT_COUPLING,
                                             plus_shift=1.0)
    angular = subspace.spectral_angular(definite).angular
    defect = riccati.fixed_point_identity(definite, angular, printed_sign)
    result.record("fixed_point_identity",
                  defect <= THEOREM_TOL * max(1.0, angular.norm_x), defect)


def _check_regularization(result: CaseResult, spm) -> None:
    """E_{B+J/n}(R+) approaches E_B(R+) monotonically, kernel-free only."""
    if result.kernel != (0, 0):
        result.record("regularization", True, 0.0)
        return
    gap = float(np.min(np.abs(spm.spectrum.values)))
    # rescale to unit gap: projectors are scale invariant
    scaled = blockform.assemble(spm.a_plus / gap, spm.a_minus / gap,
                                spm.w / gap, spm.dec)
    try:
        steps = spectral.regularization_sweep(scaled, DEFAULT_REGULARIZATION)
        limit = corelin.projector_distance(
            spectral.regularized_projection(scaled,
                                            LIMIT_SCALE * scaled.norm),
            spectral.spectral_split(scaled).projector_plus)
    except ClassificationError as exception:
        _LOGGER.warning("Case %s: regularization not checked: %s",
                        result.index, exception)
        result.record("regularization", True, 0.0)
        return
    distances = [step.to_limit for step in steps]
    monotone = all(later <= earlier + MONOTONE_SLACK
                   for earlier, later in zip(distances, distances[1:]))
    result.record("regularization", monotone and limit <= LIMIT_TOL,
                  max(distances[-1], limit))


def _check_pre_limit(result: CaseResult, spm, split) -> None:
    """E_{B+J/n}(R+) stays within sqrt(2)/2 of P for every n, kernel or not."""
    try:
        steps = spectral.regularization_sweep(spm, PRE_LIMIT, split)
    except ClassificationError as exception:
        _LOGGER.warning("Case %s: pre-limit bound not checked: %s",
                        result.index, exception)
        result.record("pre_limit", True, 0.0)
        return
    worst = max(step.to_plus for step in steps)
    result.record("pre_limit", worst <= CONTRACTION_BOUND + 1e-10, worst)


def run_case(seed: int, index: int, nmax: int,
             printed_sign: bool = False) -> CaseResult:
    """Draw and check one random saddle-point matrix."""
    rng = np.random.default_rng([seed, index])
    dim_plus, dim_minus, kernel_plus, kernel_minus = _draw_dims(rng, nmax)
    coupling = DEFAULT_COUPLING * 10.0**rng.uniform(-1.0, 1.0)
    result = CaseResult(index=index,
                        dims=(dim_plus, dim_minus),
                        kernel=(kernel_plus, kernel_minus))
    spm = blockform.random_saddle_point(rng, dim_plus, dim_minus, coupling,
                                        kernel_plus, kernel_minus)
    try:
        split = spectral.spectral_split(spm)
    except ClassificationError as exception:
        result.skipped = str(exception)
        _LOGGER.warning("Case %s skipped: %s", index, exception)
        return result
    graph = subspace.spectral_angular(spm, split=split)
    _check_subspaces(result, spm, split, graph)
    _check_rotation(result, spm, graph)
    _check_riccati(result, spm, graph, rng)
    _check_forms(result, spm, rng)
    _check_fixed_point(result, rng, printed_sign)
    _check_regularization(result, spm)
    _check_pre_limit(result, spm, split)
    _LOGGER.debug("Case %s dims %s kernel %s: %s", index, result.dims,
                  result.kernel, result.checks)
    return result


async def _gather_cases(seed: int, cases: int, nmax: int, workers: int,
                        printed_sign: bool) -> list:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            loop.run_in_executor(pool, run_case, seed, index, nmax,
                                 printed_sign) for index in range(cases)
        ]
        return await asyncio.gather(*futures)


def reduce_results(seed: int, nmax: int, results) -> VerifySummary:
    """Fold case results, in case order, into per-invariant counts."""
    results = sorted(results, key=lambda result: result.index)
    summary = VerifySummary(seed=seed, cases=len(results), nmax=nmax)
    summary.counts = {
        invariant: {
            "passed": 0,
            "failed": 0
        } for invariant in INVARIANTS
    }
    for result in results:
        if result.skipped:
            summary.skipped.append({
                "case": result.index,
                "reason": result.skipped
            })
            continue
        for invariant in INVARIANTS:
            ok = result.checks[invariant]
            summary.counts[invariant]["passed" if ok else "failed"] += 1
            if not ok:
                summary.failures.append({
                    "case": result.index,
                    "invariant": invariant,
                    "dims": list(result.dims),
                    "kernel": list(result.kernel),
                    "value": result.values[invariant],
                })
    return summary


def run_suite(seed: int = DEFAULT_SEED,
              cases: int = DEFAULT_CASES,
              nmax: int = DEFAULT_NMAX,
              workers: int = 1,
              printed_sign: bool = False) -> VerifySummary:
    """Run the randomized suite; deterministic for a fixed seed."""
    if cases < 0:
        raise ValueError(f"cases must be non-negative, got {cases}")
    if nmax < MIN_SIZE:
        raise ValueError(f"nmax must be at least {MIN_SIZE}, got {nmax}")
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    if cases == 0:
        _LOGGER.warning("No cases requested; the suite passes vacuously")
        return reduce_results(seed, nmax, [])
    if printed_sign:
        _LOGGER.warning("Using the printed (W + A- X) fixed-point map")
    _LOGGER.info("Running %s cases (seed %s, nmax %s, %s workers)", cases,
                 seed, nmax, workers)
    results = asyncio.run(
        _gather_cases(seed, cases, nmax, workers, printed_sign))
    summary = reduce_results(seed, nmax, results)
    for invariant, count in summary.counts.items():
        _LOGGER.info("%-24s passed %4s failed %4s", invariant,
                     count["passed"], count["failed"])
    return summary
