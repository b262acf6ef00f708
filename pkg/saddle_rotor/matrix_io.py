"""Matrix Market, JSON and CSV input/output."""
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .exceptions import ProblemFileError

_LOGGER: logging.Logger = logging.getLogger(__package__)


def read_matrix(path, block: str = None) -> np.ndarray:
    """Read a Matrix Market file (coordinate or array) into a dense array."""
    try:
        data = scipy.io.mmread(str(path))
    except (OSError, ValueError) as exception:
        raise ProblemFileError(f"cannot read {block or 'matrix'} from {path}: "
                               f"{exception}", block) from exception
    if scipy.sparse.issparse(data):
        data = data.toarray()
    _LOGGER.debug("Read %s from %s, shape %s", block, path, data.shape)
    return np.asarray(data, dtype=float)


def write_matrix(path, matrix, comment: str = "") -> None:
    """Write a dense Matrix Market array file."""
    scipy.io.mmwrite(str(path), np.asarray(matrix, dtype=float),
                     comment=comment, field="real", precision=17)
    _LOGGER.info("Wrote %s", path)


def _clean(value):
    """Make values JSON-safe: numpy scalars, tuples, infinities."""
    if isinstance(value, dict):
        return {str(key): _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return None
        return value
    return value


def dump_json(data) -> str:
    """Deterministic JSON text."""
    return json.dumps(_clean(data), indent=2, sort_keys=True) + "\n"


def write_json(path, data) -> None:
    """Write JSON to path, or to stdout when path is None or '-'."""
    text = dump_json(data)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    _LOGGER.info("Wrote %s", path)


def write_csv(path, header, rows) -> None:
    """Write rows under a fixed header."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(item)) if isinstance(
                item, (float, np.floating)) else item for item in row])
    _LOGGER.info("Wrote %s (%s rows)", path, len(rows))
