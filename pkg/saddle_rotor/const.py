"""Constants for saddle_rotor."""
import math

# Base component constants
NAME = "Saddle Rotor"
DOMAIN = "saddle_rotor"
VERSION = "2026.10.19"
ISSUE_URL = "https://github.com/saddle-rotor/saddle_rotor/issues"

# Commands
CMD_DIAGONALIZE = "diagonalize"
CMD_RICCATI = "riccati"
CMD_STOKES = "stokes"
CMD_VERIFY = "verify"

# Problem file keys
CONF_A_PLUS = "a_plus"
CONF_A_MINUS = "a_minus"
CONF_W = "w"
CONF_TOLERANCES = "tolerances"
CONF_OPTIONS = "options"
CONF_STRUCTURAL = "structural"
CONF_ZERO = "zero"
CONF_CONVERGENCE = "convergence"
CONF_DAMPING = "damping"
CONF_MAX_ITER = "max_iter"
CONF_X0 = "x0"
CONF_NAME = "name"
BLOCKS = [CONF_A_PLUS, CONF_A_MINUS, CONF_W]

# Tolerances (relative to the norm of the matrix at hand unless noted)
SYM_TOL = 1e-12
PSD_TOL = 1e-12
PSD_REJECT_TOL = 1e-10  # A+ and A- may dip this far below zero
ZERO_TOL = 1e-8
AMBIGUOUS_FACTOR = 10.0
STRUCTURAL_TOL = 1e-10
CONVERGENCE_TOL = 1e-10
CROSS_CHECK_TOL = 1e-10
KERNEL_RCOND = 1e-8  # absolute, on orthonormal kernel coordinates
GRAPH_COND_LIMIT = 1e12
CONTRACTION_BOUND = math.sqrt(2.0) / 2.0

# Defaults
DEFAULT_DAMPING = 0.5
DEFAULT_MAX_ITER = 200
DEFAULT_MAX_N = 48
DEFAULT_SEED = 42
DEFAULT_CASES = 100
DEFAULT_NMAX = 40
DEFAULT_COUPLING = 1.0
DEFAULT_K_RANGE = (5, 50)
DEFAULT_REGULARIZATION = (10.0, 1e2, 1e3, 1e4)
SCHATTEN_ORDERS = (2.5, 3.0, 4.0)
STOKES_ZERO_TOL = 1e-10

# Environment
ENV_MAX_N = "SADDLE_ROTOR_MAX_N"

# Unit square
SQUARE_LAMBDA1 = 2.0 * math.pi**2
STOKES_DIM = 2

# Fixed CSV headers
SPECTRUM_HEADER = ("k", "sigma_k", "lambda_k")
HISTORY_HEADER = ("iter", "residual", "oracle_distance")

# Exit codes
EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4

STARTUP_MESSAGE = f"""
-------------------------------------------------------------------
{NAME}
Version: {VERSION}
Block diagonalization of saddle-point matrices by direct rotation.
If you have any issues with this you need to open an issue here:
{ISSUE_URL}
-------------------------------------------------------------------
"""
