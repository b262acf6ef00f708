"""Shared fixtures for saddle_rotor tests."""
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from saddle_rotor.blockform import assemble, random_saddle_point

settings.register_profile("saddle_rotor", max_examples=25, deadline=None)
settings.load_profile("saddle_rotor")

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"

SQRT2 = math.sqrt(2.0)
GOLDEN_X = (math.sqrt(5.0) - 1.0) / 2.0
CANONICAL_X = SQRT2 - 1.0


@pytest.fixture
def canonical():
    """a = d = w = 1: B = [[1, 1], [1, -1]]."""
    return assemble([[1.0]], [[1.0]], [[1.0]])


@pytest.fixture
def golden():
    """a = 1, d = 0, w = 1: B = [[1, 1], [1, 0]]."""
    return assemble([[1.0]], [[0.0]], [[1.0]])


@pytest.fixture
def uncoupled():
    """w = 0: B = diag(1, -1)."""
    return assemble([[1.0]], [[1.0]], [[0.0]])


@pytest.fixture
def kernel_three():
    """B = [[0, 0, 0], [0, 1, 1], [0, 1, 0]]."""
    return assemble(np.diag([0.0, 1.0]), [[0.0]], [[0.0, 1.0]])


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(20261019)


@pytest.fixture
def random_spm(rng):
    """Random 6 + 4 instance with a kernel on each side."""
    return random_saddle_point(rng, 6, 4, kernel_plus=1, kernel_minus=1)


@pytest.fixture
def config_dir():
    """Example problem files."""
    return CONFIG_DIR
