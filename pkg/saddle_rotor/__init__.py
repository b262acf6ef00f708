"""
Block diagonalization of saddle-point matrices by direct rotation.

B = [[A+, W^T], [W, -A-]] with A+ and A- positive semi-definite splits
into reducing subspaces L+ and L-; L+ is the graph of a contraction X
over H+, and the direct rotation from H+ onto L+ block diagonalizes B.

For more details, see README.md.
"""
from .blockform import SaddlePointMatrix, assemble, random_saddle_point
from .const import VERSION
from .exceptions import SaddleRotorError
from .problem import load_problem, parse_problem
from .riccati import fixed_point_solve
from .rotor import RunReport, SaddleRotor
from .stokes import StokesProblem, verify_bounds
from .subspace import AngularOperator, direct_rotation_closed, spectral_angular
from .verify import run_suite

__version__ = VERSION

__all__ = [
    "AngularOperator",
    "RunReport",
    "SaddlePointMatrix",
    "SaddleRotor",
    "SaddleRotorError",
    "StokesProblem",
    "assemble",
    "direct_rotation_closed",
    "fixed_point_solve",
    "load_problem",
    "parse_problem",
    "random_saddle_point",
    "run_suite",
    "spectral_angular",
    "verify_bounds",
]
