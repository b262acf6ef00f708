"""
Pipeline driver for one saddle-point problem.

SaddleRotor keeps every intermediate result (split, angular operator,
rotations, block diagonal form) so a report can be assembled without
recomputing anything, and records per-stage wall-clock timings.
"""
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import blockform, corelin, riccati, spectral, subspace
from .blockform import SaddlePointMatrix
from .const import (CONF_STRUCTURAL, CONTRACTION_BOUND, CROSS_CHECK_TOL,
                    STRUCTURAL_TOL)
from .problem import ProblemFile

_LOGGER: logging.Logger = logging.getLogger(__package__)


@dataclass
class RunReport:  # pylint: disable=too-many-instance-attributes
    """Summary of one diagonalization run."""

    name: str
    dims: tuple
    eigenvalues: dict
    norm_b: float
    norm_x: float
    projector_distance: float
    off_diag_residual: float
    riccati_residual: float
    operator_residual: float
    kernel_dims: tuple
    rotation_cross_check: float
    orthogonality: float
    intertwining: float
    spectrum_mismatch: float
    form_bound_beta: float
    j_plus_r_gap: float
    tolerances: dict
    checks: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """All invariant checks hold."""
        return all(self.checks.values())

    def as_dict(self, timings: bool = True) -> dict:
        """JSON-ready mapping; timings optional for byte-stable output."""
        data = {
            "name": self.name,
            "dims": list(self.dims),
            "eigenvalues": self.eigenvalues,
            "normB": self.norm_b,
            "normX": self.norm_x,
            "projectorDistance": self.projector_distance,
            "offDiagResidual": self.off_diag_residual,
            "riccatiResidual": self.riccati_residual,
            "operatorResidual": self.operator_residual,
            "kernelDims": list(self.kernel_dims),
            "rotationCrossCheck": self.rotation_cross_check,
            "orthogonality": self.orthogonality,
            "intertwining": self.intertwining,
            "spectrumMismatch": self.spectrum_mismatch,
            "formBoundBeta": self.form_bound_beta,
            "jPlusRGap": self.j_plus_r_gap,
            "tolerances": self.tolerances,
            "checks": self.checks,
            "passed": self.passed,
        }
        if timings:
            data["timings"] = self.timings
        return data


class SaddleRotor:  # pylint: disable=too-many-instance-attributes
    """Direct-rotation block diagonalization of one saddle-point matrix."""

    def __init__(self, spm: SaddlePointMatrix, zero_tol: float = None,
                 structural_tol: float = STRUCTURAL_TOL,
                 name: str = "problem"):
        self.spm = spm
        self.name = name
        self.zero_tol = (spectral.default_zero_tol(spm)
                         if zero_tol is None else zero_tol)
        self.structural_tol = structural_tol
        self.timings = {}
        self.split = None
        self.graph = None
        self.rotation = None
        self.polar = None
        self.diagonalization = None

    @classmethod
    def from_problem(cls, problem: ProblemFile) -> "SaddleRotor":
        """Build from a validated problem file."""
        return cls(problem.spm,
                   zero_tol=problem.zero_tol,
                   structural_tol=problem.tolerances[CONF_STRUCTURAL],
                   name=problem.name)

    def _timed(self, stage: str, func, *args, **kwargs):
        """Run one stage and keep its wall-clock time."""
        start = time.perf_counter()
        result = func(*args, **kwargs)
        self.timings[stage] = time.perf_counter() - start
        _LOGGER.debug("Stage %s took %.6f s", stage, self.timings[stage])
        return result

    def run(self) -> "SaddleRotor":
        """Split, extract X, rotate and block diagonalize."""
        self.split = self._timed("split", spectral.spectral_split, self.spm,
                                 self.zero_tol)
        self.graph = self._timed("angular", subspace.spectral_angular,
                                 self.spm, split=self.split)
        self.rotation = self._timed("rotation",
                                    subspace.direct_rotation_closed,
                                    self.graph.angular)
        self.polar = self._timed("polar",
                                 subspace.direct_rotation_polar,
                                 self.graph.angular,
                                 cross_check=False)
        self.diagonalization = self._timed("diagonalize",
                                           subspace.block_diagonalize,
                                           self.spm,
                                           self.rotation,
                                           strict=False)
        _LOGGER.info("Diagonalized %s: ||X|| = %.6f, off-diagonal residual "
                     "%.3e", self.name, self.graph.angular.norm_x,
                     self.diagonalization.off_diag_residual)
        return self

    @property
    def angular(self) -> subspace.AngularOperator:
        """Angular operator of L+."""
        return self.graph.angular

    def report(self) -> RunReport:
        """Evaluate every invariant on the finished pipeline."""
        if self.diagonalization is None:
            self.run()
        spm = self.spm
        scale = spm.norm
        structural = self.structural_tol
        values = self.split.eigenvalues
        positive, negative, zero = self.split.counts
        coordinate = spectral.plus_projector(spm.dec)
        kernel = spectral.kernel_split_check(spm, self.split)
        cross = self.rotation.distance(self.polar)
        moved, _ = subspace.intertwining_defect(self.rotation.u, coordinate,
                                                self.graph.projector)
        report = RunReport(
            name=self.name,
            dims=(spm.dec.dim_plus, spm.dec.dim_minus),
            eigenvalues={
                "count": int(values.size),
                "min": float(values[0]),
                "max": float(values[-1]),
                "positive": positive,
                "negative": negative,
                "zero": zero,
            },
            norm_b=scale,
            norm_x=self.angular.norm_x,
            projector_distance=corelin.projector_distance(
                self.graph.projector, coordinate),
            off_diag_residual=self.diagonalization.off_diag_residual,
            riccati_residual=riccati.riccati_residual_angular(
                spm, self.angular),
            operator_residual=riccati.riccati_residual_operator(
                spm, self.angular),
            kernel_dims=kernel.kernel_dims,
            rotation_cross_check=cross,
            orthogonality=self.rotation.orthogonality_defect,
            intertwining=moved,
            spectrum_mismatch=subspace.spectrum_mismatch(
                spm, self.diagonalization),
            form_bound_beta=blockform.form_bound_beta(spm),
            j_plus_r_gap=blockform.j_plus_r_gap(spm).min_abs_eig,
            tolerances={
                "structural": structural,
                "zero": self.zero_tol,
            },
            timings=dict(self.timings))
        slack = 10.0 * structural * scale
        report.checks = {
            "contraction":
                report.projector_distance <= CONTRACTION_BOUND + 1e-10,
            "kernelSplit":
                kernel.passed,
            "blockDiagonal":
                self.diagonalization.passed and
                report.off_diag_residual <= max(slack, 1e-300),
            "riccati":
                report.riccati_residual <= max(slack, 1e-300),
            "rotationCrossCheck":
                cross <= CROSS_CHECK_TOL,
            "orthogonality":
                report.orthogonality <= CROSS_CHECK_TOL,
            "intertwining":
                moved <= CROSS_CHECK_TOL,
            "spectrum":
                report.spectrum_mismatch <= max(slack, 1e-300),
            "jPlusRGap":
                report.j_plus_r_gap >= 1.0 - 1e-10,
        }
        for check, ok in report.checks.items():
            if not ok:
                _LOGGER.error("Check %s failed for %s", check, self.name)
        return report

    def bhat(self) -> np.ndarray:
        """Return U^T B U."""
        return self.diagonalization.bhat
