"""
Pytest configuration and shared fixtures for the A-infinity workbench tests.
"""

import os
import random
import shutil
import sys
from pathlib import Path

import pytest

# Add the project root to the path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Set test environment variables
os.environ["TESTING"] = "true"
os.environ["NO_COLOR"] = "1"
os.environ.pop("AINFTY_CONVENTIONS_FILE", None)
os.environ.pop("AINFTY_CACHE_DIR", None)

from algebra.koszul import printed_gamma, sign_normalize_gamma, superpotential, toy_gamma  # noqa: E402
from services.groups import GroupSpec  # noqa: E402

SEED = 20240601


@pytest.fixture(scope="session")
def w3():
    """The cubic-plus-quintic superpotential on three variables."""
    return superpotential(3)


@pytest.fixture(scope="session")
def gamma3(w3):
    """The printed one-form, sign-normalised so that its effective potential is W."""
    gamma, _flip = sign_normalize_gamma(printed_gamma(3), w3)
    return gamma


@pytest.fixture(scope="session")
def gamma3_printed():
    """The printed one-form as it stands."""
    return printed_gamma(3)


@pytest.fixture(scope="session")
def toy2():
    """A two-variable one-form with a short transfer, used for fast end-to-end checks."""
    return toy_gamma(2)


@pytest.fixture(scope="session")
def group_g():
    """The order-25 group acting on the main example."""
    return GroupSpec.default_g()


@pytest.fixture(scope="session")
def group_z():
    """The cyclic group of order 5 used for the semidirect product and the toric charts."""
    return GroupSpec.default_z()


@pytest.fixture
def rng():
    """A seeded random source so that sampled checks are reproducible."""
    return random.Random(SEED)


@pytest.fixture
def cache_dir(tmp_path):
    """Empty directory for transfer caches."""
    path = tmp_path / "cache"
    path.mkdir()
    return path


@pytest.fixture
def conventions_copy(tmp_path):
    """A writable copy of the vendored conventions file."""
    target = tmp_path / "conventions.txt"
    shutil.copy(project_root / "data" / "conventions.txt", target)
    return target
