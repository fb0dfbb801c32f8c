import numpy as np
import pytest

from oximap import fixtures
from oximap.core import WavelengthGrid


@pytest.fixture(scope="session")
def grid():
    return WavelengthGrid(start_nm=450.0, step_nm=10.0, count=26)


@pytest.fixture(scope="session")
def sensitivity(grid):
    return fixtures.default_sensitivity(grid)


@pytest.fixture(scope="session")
def basis(grid):
    return fixtures.default_basis(grid)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_sensitivity(rng, l_bands, grid_start=450.0, grid_step=5.0):
    """Random full-rank non-negative sensitivity on an l_bands grid."""
    from oximap.core import CameraSensitivity

    g = WavelengthGrid(start_nm=grid_start, step_nm=grid_step, count=l_bands)
    c = rng.uniform(0.05, 1.0, size=(3, l_bands))
    return CameraSensitivity(grid=g, c=c)
