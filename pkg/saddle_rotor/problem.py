"""Problem files: JSON validated with voluptuous, blocks inline or on disk."""
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import voluptuous as vol

from . import corelin
from .blockform import SaddlePointMatrix, assemble
from .const import (BLOCKS, CONF_A_MINUS, CONF_A_PLUS, CONF_CONVERGENCE,
                    CONF_DAMPING, CONF_MAX_ITER, CONF_NAME, CONF_OPTIONS,
                    CONF_STRUCTURAL, CONF_TOLERANCES, CONF_W, CONF_X0,
                    CONF_ZERO, CONVERGENCE_TOL, DEFAULT_DAMPING,
                    DEFAULT_MAX_ITER, STRUCTURAL_TOL, ZERO_TOL)
from .exceptions import ProblemFileError, SaddleRotorError
from .matrix_io import read_matrix

_LOGGER: logging.Logger = logging.getLogger(__package__)

MATRIX_SCHEMA = vol.Any(str, [[vol.Coerce(float)]])
POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False))

TOLERANCE_SCHEMA = vol.Schema({
    vol.Optional(CONF_STRUCTURAL, default=STRUCTURAL_TOL): POSITIVE,
    vol.Optional(CONF_ZERO, default=ZERO_TOL): POSITIVE,
    vol.Optional(CONF_CONVERGENCE, default=CONVERGENCE_TOL): POSITIVE,
})

OPTIONS_SCHEMA = vol.Schema({
    vol.Optional(CONF_DAMPING, default=DEFAULT_DAMPING):
        vol.All(vol.Coerce(float),
                vol.Range(min=0.0, max=1.0, min_included=False)),
    vol.Optional(CONF_MAX_ITER, default=DEFAULT_MAX_ITER):
        vol.All(vol.Coerce(int), vol.Range(min=1)),
    vol.Optional(CONF_X0, default=None): vol.Any(None, MATRIX_SCHEMA),
    vol.Optional(CONF_NAME, default="problem"): str,
})

PROBLEM_SCHEMA = vol.Schema({
    vol.Required(CONF_A_PLUS): MATRIX_SCHEMA,
    vol.Required(CONF_A_MINUS): MATRIX_SCHEMA,
    vol.Required(CONF_W): MATRIX_SCHEMA,
    vol.Optional(CONF_TOLERANCES, default={}): TOLERANCE_SCHEMA,
    vol.Optional(CONF_OPTIONS, default={}): OPTIONS_SCHEMA,
})


@dataclass(frozen=True, eq=False)
class ProblemFile:
    """A validated, assembled problem."""

    name: str
    spm: SaddlePointMatrix
    tolerances: dict
    options: dict
    x0: np.ndarray = None
    source: str = None

    @property
    def zero_tol(self) -> float:
        """Absolute zero tolerance, relative setting times ||B||."""
        return self.tolerances[CONF_ZERO] * self.spm.norm


def _load_block(value, block: str, base: Path) -> np.ndarray:
    """Inline nested list or Matrix Market path."""
    if isinstance(value, str):
        path = Path(value)
        if not path.is_absolute():
            path = base / path
        return read_matrix(path, block)
    try:
        return corelin.as_matrix(value, block)
    except SaddleRotorError as exception:
        raise ProblemFileError(f"{block}: {exception}", block) from exception


def parse_problem(data: dict, base: Path = Path("."),
                  source: str = None) -> ProblemFile:
    """Validate a decoded problem mapping and assemble B."""
    try:
        config = PROBLEM_SCHEMA(data)
    except vol.Invalid as exception:
        block = exception.path[0] if exception.path else None
        raise ProblemFileError(f"invalid problem file: {exception}",
                               block) from exception
    blocks = {}
    for block in BLOCKS:
        blocks[block] = _load_block(config[block], block, base)
    for block in (CONF_A_PLUS, CONF_A_MINUS):
        try:
            corelin.symmetrize(blocks[block], block)
        except SaddleRotorError as exception:
            raise ProblemFileError(str(exception), block) from exception
    try:
        spm = assemble(blocks[CONF_A_PLUS], blocks[CONF_A_MINUS],
                       blocks[CONF_W])
    except SaddleRotorError as exception:
        raise ProblemFileError(str(exception)) from exception
    options = dict(config[CONF_OPTIONS])
    x0 = options.pop(CONF_X0)
    if x0 is not None:
        x0 = _load_block(x0, CONF_X0, base)
    _LOGGER.info("Loaded problem %s: dim H+ = %s, dim H- = %s",
                 options[CONF_NAME], spm.dec.dim_plus, spm.dec.dim_minus)
    return ProblemFile(name=options[CONF_NAME],
                       spm=spm,
                       tolerances=dict(config[CONF_TOLERANCES]),
                       options=options,
                       x0=x0,
                       source=source)


def load_problem(path) -> ProblemFile:
    """Read a problem file ('-' reads stdin)."""
    if str(path) == "-":
        text, base = sys.stdin.read(), Path(".")
    else:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exception:
            raise ProblemFileError(
                f"cannot read problem file {path}: {exception}") from exception
        base = path.parent
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exception:
        raise ProblemFileError(
            f"problem file {path} is not valid JSON: {exception}") from exception
    if not isinstance(data, dict):
        raise ProblemFileError(f"problem file {path} must hold a JSON object")
    return parse_problem(data, base, str(path))
