"""Ground-truth generation: concentration phantoms, the Beer-Lambert forward
model, RGB synthesis through camera curves, noise injection, and pulsatile
frame sequences. Everything is deterministic given the phantom seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import (
    CameraSensitivity,
    ChromophoreBasis,
    ConcentrationMap,
    RgbImage,
    SpectralCube,
    check_grids,
)
from .errors import ArgumentError

#: Reflectance floor applied after noise injection (keeps cubes positive).
REFLECTANCE_FLOOR = 1e-6


@dataclass(frozen=True)
class GaussianBlob:
    """A radially Gaussian concentration feature added onto the background.

    ``hbo``/``hb`` are the peak amplitudes in g/litre (negative values carve
    dips; the final planes are floored at zero).
    """

    cx: float
    cy: float
    radius: float
    hbo: float
    hb: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ArgumentError(f"blob radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class PhantomSpec:
    height: int
    width: int
    background: tuple[float, float] = (30.0, 30.0)  # (hbo, hb) g/litre
    blobs: tuple[GaussianBlob, ...] = ()
    illumination_offset: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ArgumentError("phantom must be at least 1x1")
        if min(self.background) < 0:
            raise ArgumentError("background concentrations must be >= 0")
        if self.noise_sigma < 0:
            raise ArgumentError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        object.__setattr__(self, "blobs", tuple(self.blobs))


def truth_map(spec: PhantomSpec) -> ConcentrationMap:
    """Render the ground-truth concentration planes of a phantom.

    Each blob is evaluated only inside its +-4 sigma window, so phantoms with
    thousands of fine-scale features stay cheap.
    """
    hbo = np.full((spec.height, spec.width), float(spec.background[0]))
    hb = np.full((spec.height, spec.width), float(spec.background[1]))
    for blob in spec.blobs:
        x0 = max(int(np.floor(blob.cx - 4 * blob.radius)), 0)
        x1 = min(int(np.ceil(blob.cx + 4 * blob.radius)) + 1, spec.width)
        y0 = max(int(np.floor(blob.cy - 4 * blob.radius)), 0)
        y1 = min(int(np.ceil(blob.cy + 4 * blob.radius)) + 1, spec.height)
        if x0 >= x1 or y0 >= y1:
            continue
        yy, xx = np.mgrid[y0:y1, x0:x1]
        bump = np.exp(
            -0.5 * ((xx - blob.cx) ** 2 + (yy - blob.cy) ** 2) / blob.radius**2
        )
        hbo[y0:y1, x0:x1] += blob.hbo * bump
        hb[y0:y1, x0:x1] += blob.hb * bump
    offset = np.broadcast_to(
        np.asarray(spec.illumination_offset, dtype=np.float64),
        (spec.height, spec.width),
    ).copy()
    return ConcentrationMap(
        hbo=np.clip(hbo, 0.0, None), hb=np.clip(hb, 0.0, None), offset=offset
    )


def tissue_phantom_spec(
    height: int,
    width: int,
    seed: int = 0,
    noise_sigma: float = 0.01,
    background: tuple[float, float] = (32.0, 28.0),
    n_features: int = 6,
    feature_amp: float = 10.0,
    texture_density: float = 0.3,
    texture_amp: float = 20.0,
) -> PhantomSpec:
    """A tissue-like evaluation phantom: smooth perfusion features plus
    capillary-scale concentration texture.

    The texture is built from balanced +/- spike pairs confined to single
    2x2 pixel windows (``texture_density`` is the fraction of windows that
    carry one), so it exercises the finest-scale detail path of an estimator
    without adding content at coarser scales. Deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    blobs = []
    for _ in range(n_features):
        blobs.append(
            GaussianBlob(
                cx=rng.uniform(0.15, 0.85) * width,
                cy=rng.uniform(0.15, 0.85) * height,
                radius=rng.uniform(0.08, 0.2) * min(height, width),
                hbo=rng.uniform(-feature_amp, feature_amp),
                hb=rng.uniform(-feature_amp, feature_amp),
            )
        )
    n_pairs = int(texture_density * (height // 2) * (width // 2))
    for _ in range(n_pairs):
        wx = int(rng.integers(0, max(width // 2, 1))) * 2
        wy = int(rng.integers(0, max(height // 2, 1))) * 2
        a_hbo = rng.uniform(-texture_amp, texture_amp)
        a_hb = rng.uniform(-texture_amp, texture_amp)
        if rng.random() < 0.5:
            x2, y2 = wx + 1, wy
        else:
            x2, y2 = wx, wy + 1
        blobs.append(GaussianBlob(cx=float(wx), cy=float(wy), radius=0.45, hbo=a_hbo, hb=a_hb))
        blobs.append(GaussianBlob(cx=float(x2), cy=float(y2), radius=0.45, hbo=-a_hbo, hb=-a_hb))
    return PhantomSpec(
        height=height,
        width=width,
        background=background,
        blobs=tuple(blobs),
        noise_sigma=noise_sigma,
        seed=seed,
    )


def forward_msi(truth: ConcentrationMap, basis: ChromophoreBasis) -> SpectralCube:
    """Beer-Lambert forward model: I(x, y, l) = exp(-xi(l) . x(x, y))."""
    data = np.exp(-(truth.stacked() @ basis.xi.T))
    return SpectralCube(grid=basis.grid, data=data)


def synthesize_rgb(
    cube: SpectralCube, sensitivity: CameraSensitivity, exposure: float = 1.0
) -> RgbImage:
    """Integrate a cube through the camera curves: y = exposure * C i."""
    if exposure <= 0:
        raise ArgumentError(f"exposure must be > 0, got {exposure}")
    check_grids(cube.grid, sensitivity.grid)
    return RgbImage(data=exposure * (cube.data @ sensitivity.c.T))


def generate_phantom(
    spec: PhantomSpec,
    sensitivity: CameraSensitivity,
    basis: ChromophoreBasis,
    exposure: float = 1.0,
) -> tuple[ConcentrationMap, SpectralCube, RgbImage]:
    """Truth map, (noisy) reflectance cube, and the RGB view of that cube.

    Noise is additive Gaussian on reflectance, floored at
    ``REFLECTANCE_FLOOR``; the RGB image inherits it through the band
    integration, mirroring acquisition from a hardware datacube.
    """
    truth = truth_map(spec)
    cube = forward_msi(truth, basis)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        noisy = cube.data + rng.normal(0.0, spec.noise_sigma, size=cube.data.shape)
        cube = SpectralCube(grid=cube.grid, data=np.clip(noisy, REFLECTANCE_FLOOR, None))
    return truth, cube, synthesize_rgb(cube, sensitivity, exposure)


def pulse_sequence(
    spec: PhantomSpec,
    fps: float,
    duration_s: float,
    pulse_hz: float,
    amplitude: float,
    sensitivity: CameraSensitivity,
    basis: ChromophoreBasis,
    exposure: float = 1.0,
) -> Iterator[RgbImage]:
    """Yield frames whose THb truth is modulated by a sinusoidal pulse.

    Frame t scales both haemoglobin planes by 1 + amplitude*sin(2 pi f t/fps),
    keeping the HbO:Hb ratio fixed, then runs the forward model, RGB
    synthesis, and per-frame noise. ``pulse_hz`` must be below the Nyquist
    rate fps/2.
    """
    if fps <= 0:
        raise ArgumentError(f"fps must be > 0, got {fps}")
    if duration_s <= 0:
        raise ArgumentError(f"duration_s must be > 0, got {duration_s}")
    if not 0 < pulse_hz < fps / 2:
        raise ArgumentError(
            f"pulse_hz must satisfy 0 < pulse_hz < fps/2 = {fps / 2:g}, got {pulse_hz}"
        )
    if amplitude < 0:
        raise ArgumentError(f"amplitude must be >= 0, got {amplitude}")

    truth = truth_map(spec)
    n_frames = int(round(duration_s * fps))
    rng = np.random.default_rng(spec.seed)
    for t in range(n_frames):
        m = 1.0 + amplitude * math.sin(2.0 * math.pi * pulse_hz * t / fps)
        frame_truth = ConcentrationMap(
            hbo=truth.hbo * m, hb=truth.hb * m, offset=truth.offset
        )
        cube = forward_msi(frame_truth, basis)
        data = cube.data
        if spec.noise_sigma > 0:
            data = np.clip(
                data + rng.normal(0.0, spec.noise_sigma, size=data.shape),
                REFLECTANCE_FLOOR,
                None,
            )
        yield synthesize_rgb(SpectralCube(grid=cube.grid, data=data), sensitivity, exposure)
