"""Packaged coefficient tables and loaders for them.

The shipped curves are illustrative, shape-plausible synthetic data (see
data/*.csv headers and tools/gen_fixtures.py); they make the toolkit
self-contained but are not measured camera or tissue values.
"""

from __future__ import annotations

from importlib import resources

from .core import DEFAULT_GRID, CameraSensitivity, ChromophoreBasis, WavelengthGrid
from . import io as oio

SENSITIVITY_CSV = "camera_rgb.csv"
CHROMOPHORE_CSV = "hb_attenuation.csv"


def _data_file(name: str):
    return resources.files("oximap").joinpath("data", name)


def default_sensitivity(grid: WavelengthGrid = DEFAULT_GRID) -> CameraSensitivity:
    with resources.as_file(_data_file(SENSITIVITY_CSV)) as path:
        return oio.load_sensitivity_csv(path, grid)


def default_basis(grid: WavelengthGrid = DEFAULT_GRID) -> ChromophoreBasis:
    with resources.as_file(_data_file(CHROMOPHORE_CSV)) as path:
        return oio.load_chromophore_csv(path, grid)
