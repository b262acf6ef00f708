"""Command-line front end: diagonalize, riccati, stokes, verify."""
import argparse
import logging
import sys

import colorlog

from .const import (CMD_DIAGONALIZE, CMD_RICCATI, CMD_STOKES, CMD_VERIFY,
                    CONF_CONVERGENCE, CONF_DAMPING, CONF_MAX_ITER,
                    CONF_STRUCTURAL, DEFAULT_CASES, DEFAULT_K_RANGE,
                    DEFAULT_NMAX, DEFAULT_SEED, DOMAIN, ENV_MAX_N, EXIT_INVARIANT,
                    EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE, HISTORY_HEADER, NAME,
                    SPECTRUM_HEADER, STARTUP_MESSAGE, VERSION)
from .exceptions import DimensionError, FitError, SaddleRotorError
from .matrix_io import read_matrix, write_csv, write_json, write_matrix
from .problem import load_problem
from .riccati import fixed_point_solve
from .rotor import SaddleRotor
from .stokes import (StokesProblem, decay_analysis, laplacian_eigenvalues,
                     max_grid_size, solve_stokes, spectrum_series,
                     sweep_coupling)
from .verify import run_suite

_LOGGER: logging.Logger = logging.getLogger(__package__)

LOG_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Colored stderr logging; stdout stays free for JSON."""
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT))
    logger = logging.getLogger(DOMAIN)
    for old in list(logger.handlers):
        logger.removeHandler(old)
    logger.addHandler(handler)
    if verbose:
        logger.setLevel(logging.DEBUG)
    elif quiet:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)


def _grid_size(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exception:
        raise argparse.ArgumentTypeError(
            f"invalid grid size {text!r}") from exception
    if value < 2:
        raise argparse.ArgumentTypeError(f"n must be at least 2, got {value}")
    return value


def _k_range(text: str) -> tuple:
    try:
        low, high = (int(part) for part in text.split(":"))
    except ValueError as exception:
        raise argparse.ArgumentTypeError(
            f"k range must look like a:b, got {text!r}") from exception
    if low < 1 or high <= low:
        raise argparse.ArgumentTypeError(f"k range {text!r} is empty")
    return low, high


def _float_list(text: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError as exception:
        raise argparse.ArgumentTypeError(
            f"expected comma separated numbers, got {text!r}") from exception


def cmd_diagonalize(args) -> int:
    """Block diagonalize a problem file by the direct rotation."""
    problem = load_problem(args.problem)
    if args.tol is not None:
        problem.tolerances[CONF_STRUCTURAL] = args.tol
    rotor = SaddleRotor.from_problem(problem).run()
    report = rotor.report()
    if args.u_out:
        write_matrix(args.u_out, rotor.rotation.u, "direct rotation U")
    if args.bhat_out:
        write_matrix(args.bhat_out, rotor.bhat(), "U^T B U")
    write_json(args.out, report.as_dict(timings=not args.no_timings))
    return EXIT_OK if report.passed else EXIT_INVARIANT


def cmd_riccati(args) -> int:
    """Damped fixed-point iteration for the angular Riccati equation."""
    problem = load_problem(args.problem)
    options = problem.options
    x0 = read_matrix(args.x0, "x0") if args.x0 else problem.x0
    damping = args.damping if args.damping is not None else options[
        CONF_DAMPING]
    max_iter = args.max_iter if args.max_iter is not None else options[
        CONF_MAX_ITER]
    tol = args.tol if args.tol is not None else problem.tolerances[
        CONF_CONVERGENCE]
    report = fixed_point_solve(problem.spm,
                               x0=x0,
                               damping=damping,
                               tol=tol,
                               max_iter=max_iter)
    if args.csv:
        write_csv(args.csv, HISTORY_HEADER, report.history_rows())
    data = report.as_dict()
    data.update({
        "name": problem.name,
        "damping": damping,
        "maxIter": max_iter,
        "tolerances": {
            "convergence": tol
        },
    })
    write_json(args.out, data)
    return EXIT_OK if report.converged else EXIT_NUMERICAL


def cmd_stokes(args) -> int:
    """Discrete Stokes bounds, decay fits and optional coupling sweep."""
    limit = max_grid_size()
    if args.n > limit:
        raise DimensionError(
            f"n = {args.n} exceeds the grid cap {limit} (set {ENV_MAX_N})")
    prob = StokesProblem(args.n, args.nu, args.vstar)
    solution = solve_stokes(prob, args.k_range)
    report = solution.report
    try:
        decay = decay_analysis(prob, args.k_range, solution)
        report.weyl_slope = decay.weyl_slope
        report.decay_passed = decay.passed
    except FitError as exception:
        _LOGGER.warning("Decay fit skipped: %s", exception)
    if args.sweep:
        sweep = sweep_coupling(args.n, args.nu, args.sweep)
        report.sweep = sweep.rows
    if args.csv:
        lambdas = laplacian_eigenvalues(prob.n, solution.sigmas.size)
        write_csv(args.csv, SPECTRUM_HEADER,
                  spectrum_series(solution.sigmas, lambdas))
    write_json(args.out, report.as_dict())
    return EXIT_OK if report.passed else EXIT_INVARIANT


def cmd_verify(args) -> int:
    """Randomized invariant suite."""
    summary = run_suite(seed=args.seed,
                        cases=args.cases,
                        nmax=args.nmax,
                        workers=args.workers,
                        printed_sign=args.printed_sign)
    write_json(args.out, summary.as_dict())
    return EXIT_OK if summary.passed else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per pipeline."""
    parser = argparse.ArgumentParser(
        prog=DOMAIN,
        description=f"{NAME}: block diagonalization of saddle-point matrices")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {VERSION}")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true",
                       help="debug logging")
    noise.add_argument("-q", "--quiet", action="store_true",
                       help="warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    diag = commands.add_parser(CMD_DIAGONALIZE, help=cmd_diagonalize.__doc__)
    diag.add_argument("problem", help="problem JSON ('-' for stdin)")
    diag.add_argument("--tol", type=float, help="structural tolerance")
    diag.add_argument("--out", help="report JSON (default stdout)")
    diag.add_argument("--u-out", help="Matrix Market file for U")
    diag.add_argument("--bhat-out", help="Matrix Market file for U^T B U")
    diag.add_argument("--no-timings", action="store_true",
                      help="omit timings for byte-stable reports")
    diag.set_defaults(func=cmd_diagonalize)

    ric = commands.add_parser(CMD_RICCATI, help=cmd_riccati.__doc__)
    ric.add_argument("problem", help="problem JSON ('-' for stdin)")
    ric.add_argument("--damping", type=float)
    ric.add_argument("--max-iter", type=int)
    ric.add_argument("--tol", type=float, help="convergence tolerance")
    ric.add_argument("--x0", help="Matrix Market starting iterate")
    ric.add_argument("--out", help="report JSON (default stdout)")
    ric.add_argument("--csv", help="residual history CSV")
    ric.set_defaults(func=cmd_riccati)

    sto = commands.add_parser(CMD_STOKES, help=cmd_stokes.__doc__)
    sto.add_argument("--n", type=_grid_size, default=16,
                     help="interior points per axis")
    sto.add_argument("--nu", type=float, default=1.0)
    sto.add_argument("--vstar", type=float, default=1.0)
    sto.add_argument("--k-range", type=_k_range, default=DEFAULT_K_RANGE)
    sto.add_argument("--sweep", type=_float_list,
                     help="comma separated v* values")
    sto.add_argument("--out", help="report JSON (default stdout)")
    sto.add_argument("--csv", help="k, sigma_k, lambda_k CSV")
    sto.set_defaults(func=cmd_stokes)

    ver = commands.add_parser(CMD_VERIFY, help=cmd_verify.__doc__)
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ver.add_argument("--cases", type=int, default=DEFAULT_CASES)
    ver.add_argument("--nmax", type=int, default=DEFAULT_NMAX)
    ver.add_argument("--workers", type=int, default=1)
    ver.add_argument("--out", help="summary JSON (default stdout)")
    ver.add_argument("--printed-sign", action="store_true",
                     help=argparse.SUPPRESS)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    """Parse, run one subcommand, map failures to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    _LOGGER.info(STARTUP_MESSAGE)
    try:
        return args.func(args)
    except SaddleRotorError as exception:
        _LOGGER.error("%s: %s", type(exception).__name__, exception)
        return exception.exit_code
    except ValueError as exception:
        _LOGGER.error("Invalid argument: %s", exception)
        return EXIT_PARSE
