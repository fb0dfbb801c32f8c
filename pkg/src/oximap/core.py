"""Shared domain types: wavelength grids, spectral cubes, RGB frames,
camera sensitivities, chromophore bases, and concentration maps.

All types are immutable after construction and safe to share across
concurrent workers. Grid compatibility between cube, sensitivity and basis
is checked once (see :func:`check_grids`); per-pixel code may assume it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DataError, SingularOperatorError


def _as_float_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class WavelengthGrid:
    """Uniform wavelength grid in nanometres.

    Uniformity and monotonicity are guaranteed by the (start, step, count)
    representation. At least 3 samples are required so that second-difference
    operators are well defined.
    """

    start_nm: float
    step_nm: float
    count: int

    def __post_init__(self):
        if self.step_nm <= 0:
            raise ArgumentError(f"step_nm must be > 0, got {self.step_nm}")
        if self.count < 3:
            raise ArgumentError(f"count must be >= 3, got {self.count}")

    @property
    def end_nm(self) -> float:
        return self.start_nm + self.step_nm * (self.count - 1)

    @property
    def wavelengths(self) -> np.ndarray:
        return self.start_nm + self.step_nm * np.arange(self.count)


#: Default visible-range analysis grid: 450..700 nm in 10 nm steps (26 bands).
DEFAULT_GRID = WavelengthGrid(start_nm=450.0, step_nm=10.0, count=26)

#: Sentinel grid used by concentration-map containers (channels, not wavelengths).
MAP_GRID = WavelengthGrid(start_nm=0.0, step_nm=1.0, count=3)


@dataclass(frozen=True)
class SpectralCube:
    """H x W x L datacube of reflectance samples on a fixed wavelength grid.

    Forward-model output is strictly positive; estimated cubes may carry small
    negative excursions from the signed detail coefficients, which downstream
    fitting clamps before taking logs.
    """

    grid: WavelengthGrid
    data: np.ndarray  # (H, W, L) float64

    def __post_init__(self):
        data = _as_float_array(self.data, "SpectralCube.data")
        if data.ndim != 3:
            raise ArgumentError(f"cube data must be 3-D (H, W, L), got shape {data.shape}")
        if data.shape[2] != self.grid.count:
            raise DataError(
                f"cube has {data.shape[2]} bands but grid has {self.grid.count}"
            )
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class RgbImage:
    """H x W x 3 linear-light channel responses (no gamma handling here)."""

    data: np.ndarray  # (H, W, 3) float64

    def __post_init__(self):
        data = _as_float_array(self.data, "RgbImage.data")
        if data.ndim != 3 or data.shape[2] != 3:
            raise ArgumentError(f"RGB data must be (H, W, 3), got shape {data.shape}")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class CameraSensitivity:
    """3 x L camera response matrix: channel response per unit reflectance per band."""

    grid: WavelengthGrid
    c: np.ndarray  # (3, L) float64

    def __post_init__(self):
        c = _as_float_array(self.c, "CameraSensitivity.c")
        if c.ndim != 2 or c.shape[0] != 3:
            raise ArgumentError(f"sensitivity must be (3, L), got shape {c.shape}")
        if c.shape[1] != self.grid.count:
            raise DataError(f"sensitivity has {c.shape[1]} bands but grid has {self.grid.count}")
        if np.any(c < 0):
            raise ArgumentError("sensitivity entries must be non-negative")
        if np.any(c.max(axis=1) <= 0):
            raise ArgumentError("every channel needs at least one positive entry")
        if np.linalg.matrix_rank(c) < 3:
            raise SingularOperatorError("camera sensitivity matrix is rank deficient")
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class ChromophoreBasis:
    """L x 3 attenuation matrix with columns (HbO, Hb, constant).

    Columns 1-2 are effective backscatter attenuation per unit concentration
    (litre/g, path length folded into calibration); column 3 is identically 1
    and absorbs wavelength-flat illumination changes.
    """

    grid: WavelengthGrid
    xi: np.ndarray  # (L, 3) float64

    def __post_init__(self):
        xi = _as_float_array(self.xi, "ChromophoreBasis.xi")
        if xi.ndim != 2 or xi.shape[1] != 3:
            raise ArgumentError(f"basis must be (L, 3), got shape {xi.shape}")
        if xi.shape[0] != self.grid.count:
            raise DataError(f"basis has {xi.shape[0]} bands but grid has {self.grid.count}")
        if not np.allclose(xi[:, 2], 1.0, rtol=0, atol=0):
            raise ArgumentError("third basis column must be identically 1.0")
        if np.any(xi[:, :2] < 0):
            raise ArgumentError("chromophore columns must be non-negative")
        if np.linalg.matrix_rank(xi[:, :2]) < 2:
            raise SingularOperatorError("HbO and Hb attenuation columns are collinear")
        object.__setattr__(self, "xi", xi)


@dataclass(frozen=True)
class ConcentrationMap:
    """Per-pixel (hbo, hb, offset) planes with derived THb and SatO2.

    hbo/hb are g/litre relative to the calibration scale; negative fitted
    values are preserved here for diagnostics and clamped only in the derived
    planes. SatO2 is NaN wherever clamped THb is zero. Plane entries may be
    NaN as an invalid-pixel sentinel (the fit itself never produces one);
    infinities are rejected.
    """

    hbo: np.ndarray  # (H, W)
    hb: np.ndarray  # (H, W)
    offset: np.ndarray  # (H, W)

    def __post_init__(self):
        planes = {}
        for name in ("hbo", "hb", "offset"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if np.any(np.isinf(arr)):
                raise ArgumentError(f"ConcentrationMap.{name} contains infinities")
            planes[name] = arr
        hbo, hb, offset = planes["hbo"], planes["hb"], planes["offset"]
        if not (hbo.ndim == 2 and hbo.shape == hb.shape == offset.shape):
            raise ArgumentError("hbo, hb and offset must be 2-D planes of equal shape")
        for name, arr in planes.items():
            object.__setattr__(self, name, arr)

    @property
    def height(self) -> int:
        return self.hbo.shape[0]

    @property
    def width(self) -> int:
        return self.hbo.shape[1]

    @property
    def thb(self) -> np.ndarray:
        """Total haemoglobin: clamp(hbo, 0) + clamp(hb, 0)."""
        return np.clip(self.hbo, 0.0, None) + np.clip(self.hb, 0.0, None)

    @property
    def sat_o2(self) -> np.ndarray:
        """Oxygen saturation in [0, 1]; NaN where THb is zero."""
        thb = self.thb
        sat = np.full_like(thb, np.nan)
        valid = thb > 0
        np.divide(np.clip(self.hbo, 0.0, None), thb, out=sat, where=valid)
        return sat

    def stacked(self) -> np.ndarray:
        """(H, W, 3) view-free stack in (hbo, hb, offset) channel order."""
        return np.stack([self.hbo, self.hb, self.offset], axis=-1)

    @classmethod
    def from_stacked(cls, data: np.ndarray) -> "ConcentrationMap":
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ArgumentError(f"stacked map must be (H, W, 3), got {data.shape}")
        return cls(hbo=data[..., 0], hb=data[..., 1], offset=data[..., 2])


def check_grids(*grids: WavelengthGrid) -> WavelengthGrid:
    """Assert all grids are identical; return the common grid.

    Called once at pipeline construction so per-pixel code can skip the check.
    """
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise DataError(f"wavelength grid mismatch: {g} vs {first}")
    return first


def resample_to_grid(table, grid: WavelengthGrid) -> np.ndarray:
    """Linearly interpolate a (wavelength, value) table onto a grid.

    The table must cover [grid.start_nm, grid.end_nm] and have strictly
    increasing wavelengths.
    """
    arr = np.asarray(table, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ArgumentError("table must be an (M, 2) array of (wavelength, value) pairs, M >= 2")
    wl, val = arr[:, 0], arr[:, 1]
    if np.any(np.diff(wl) <= 0):
        raise DataError("table wavelengths must be strictly increasing")
    if wl[0] > grid.start_nm or wl[-1] < grid.end_nm:
        raise DataError(
            f"table covers [{wl[0]:g}, {wl[-1]:g}] nm but grid requires "
            f"[{grid.start_nm:g}, {grid.end_nm:g}] nm"
        )
    return np.interp(grid.wavelengths, wl, val)
