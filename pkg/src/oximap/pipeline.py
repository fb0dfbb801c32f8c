"""End-to-end frame estimators.

The hybrid path decomposes an RGB frame, applies the fast Tikhonov unmixer
to the signed directional coefficients at every level, runs the iterative
Bayesian estimator on the coarsest low-pass plane (the only all-positive
component, so the only one a logarithm may touch), inverts the transform in
the spectral domain, and fits Beer-Lambert concentrations per full-resolution
pixel. Fitting per directional coefficient would be invalid: the log does
not commute with signed differences.

``tikhonov_only`` replaces the low-pass estimator with the Tikhonov unmixer
(everything stays linear, so this equals image-domain unmixing).
``bayes_only`` skips the transform and iterates on every pixel directly.
``direct_msi`` fits concentrations straight from a measured spectral cube
and serves as the accuracy reference for the other modes.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import haar
from .bayes import BayesConfig, LowPassBlock, _BeerLambertFit, estimate_lowpass
from .core import (
    CameraSensitivity,
    ChromophoreBasis,
    ConcentrationMap,
    RgbImage,
    SpectralCube,
    check_grids,
)
from .errors import ArgumentError, DataError
from .haar import HaarLevel, HaarPyramid
from .unmix import TikhonovOperator, tikhonov_unmix

MODES = ("hybrid", "tikhonov_only", "bayes_only", "direct_msi")


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = "hybrid"
    n_levels: int = 1
    tikhonov_gamma: float = 1e-3  # relative: scaled by trace(C.T C) / L
    bayes: BayesConfig = field(default_factory=BayesConfig)
    threads: int = 1
    calibration_scale: float = 1.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ArgumentError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n_levels < 1:
            raise ArgumentError(f"n_levels must be >= 1, got {self.n_levels}")
        if self.tikhonov_gamma <= 0:
            raise ArgumentError(f"tikhonov_gamma must be > 0, got {self.tikhonov_gamma}")
        if self.threads < 1:
            raise ArgumentError(f"threads must be >= 1, got {self.threads}")
        if self.calibration_scale <= 0:
            raise ArgumentError(f"calibration_scale must be > 0, got {self.calibration_scale}")


def fit_cube(
    cube: SpectralCube,
    basis: ChromophoreBasis,
    *,
    epsilon: float = 1e-6,
    calibration_scale: float = 1.0,
    threads: int = 1,
) -> ConcentrationMap:
    """Per-pixel Beer-Lambert fit of a spectral cube (floored at epsilon)."""
    check_grids(cube.grid, basis.grid)
    h, w, l_bands = cube.data.shape
    flat = cube.data.reshape(-1, l_bands)
    bl_fit = _BeerLambertFit(basis, epsilon)
    if threads <= 1 or h < 2 * threads:
        x = bl_fit.fit(flat)
    else:
        x = np.empty((flat.shape[0], 3))
        bounds = np.linspace(0, flat.shape[0], threads + 1, dtype=int)

        def run(slab):
            lo, hi = slab
            x[lo:hi] = bl_fit.fit(flat[lo:hi])

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, zip(bounds[:-1], bounds[1:])))
    x = x * np.array([calibration_scale, calibration_scale, 1.0])
    return ConcentrationMap(
        hbo=x[:, 0].reshape(h, w), hb=x[:, 1].reshape(h, w), offset=x[:, 2].reshape(h, w)
    )


def _unmix_planes(pyramid: HaarPyramid, op: TikhonovOperator, threads: int) -> list[dict]:
    """Tikhonov-unmix every directional plane; returns per-level plane dicts."""
    jobs = []
    for k, level in enumerate(pyramid.levels):
        for name in ("dh", "dv", "dd"):
            jobs.append((k, name, getattr(level, name)))
    results: list[dict] = [dict() for _ in pyramid.levels]
    if threads <= 1:
        for k, name, plane in jobs:
            results[k][name] = tikhonov_unmix(plane, op)
    else:
        def run(job):
            k, name, plane = job
            results[k][name] = tikhonov_unmix(plane, op)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, jobs))
    return results


def estimate_frame(
    frame: RgbImage | SpectralCube,
    sensitivity: CameraSensitivity,
    basis: ChromophoreBasis,
    cfg: PipelineConfig,
    stats: dict | None = None,
) -> tuple[SpectralCube, ConcentrationMap]:
    """Estimate a surrogate spectral cube and concentration map for one frame.

    ``frame`` is an RgbImage except in ``direct_msi`` mode, which takes the
    measured SpectralCube itself. If ``stats`` is a dict it is filled with
    instrumentation counters (coefficients routed to each estimator).
    """
    check_grids(sensitivity.grid, basis.grid)
    if stats is not None:
        stats.clear()

    if cfg.mode == "direct_msi":
        if not isinstance(frame, SpectralCube):
            raise ArgumentError("direct_msi mode takes a SpectralCube frame")
        check_grids(frame.grid, basis.grid)
        cmap = fit_cube(
            frame,
            basis,
            epsilon=cfg.bayes.epsilon,
            calibration_scale=cfg.calibration_scale,
            threads=cfg.threads,
        )
        if stats is not None:
            stats.update(bayes_coefficients=0, tikhonov_coefficients=0)
        return frame, cmap

    if not isinstance(frame, RgbImage):
        raise ArgumentError(f"{cfg.mode} mode takes an RgbImage frame")
    grid = sensitivity.grid

    if cfg.mode == "bayes_only":
        block = LowPassBlock(rgb_lp=frame.data, scale=1.0)
        spectra, _ = estimate_lowpass(
            block,
            sensitivity,
            basis,
            cfg.bayes,
            TikhonovOperator.from_relative(sensitivity, cfg.tikhonov_gamma),
            threads=cfg.threads,
        )
        cube = SpectralCube(grid=grid, data=spectra)
        if stats is not None:
            stats.update(
                bayes_coefficients=frame.height * frame.width, tikhonov_coefficients=0
            )
        return cube, fit_cube(
            cube,
            basis,
            epsilon=cfg.bayes.epsilon,
            calibration_scale=cfg.calibration_scale,
            threads=cfg.threads,
        )

    # hybrid and tikhonov_only share the transform-domain route
    if frame.height < 2**cfg.n_levels or frame.width < 2**cfg.n_levels:
        raise ArgumentError(
            f"frame {frame.height}x{frame.width} is smaller than "
            f"2^{cfg.n_levels} in one dimension"
        )
    op = TikhonovOperator.from_relative(sensitivity, cfg.tikhonov_gamma)
    pyramid = haar.forward(frame.data, cfg.n_levels)
    directional = _unmix_planes(pyramid, op, cfg.threads)

    residual = pyramid.residual_lp
    n_lp = residual.shape[0] * residual.shape[1]
    n_directional = 3 * sum(
        lv.dh.shape[0] * lv.dh.shape[1] for lv in pyramid.levels
    )
    scale = 2.0**cfg.n_levels
    if cfg.mode == "hybrid":
        block = LowPassBlock(rgb_lp=residual, scale=scale)
        spectra_lp, _ = estimate_lowpass(
            block, sensitivity, basis, cfg.bayes, op, threads=cfg.threads
        )
        coarse_lp = spectra_lp * scale
        n_bayes, n_tik = n_lp, n_directional
    else:  # tikhonov_only
        coarse_lp = tikhonov_unmix(residual, op)
        n_bayes, n_tik = 0, n_lp + n_directional

    levels = []
    for k, level in enumerate(pyramid.levels):
        lp = coarse_lp if k == len(pyramid.levels) - 1 else None
        levels.append(HaarLevel(lp=lp, orig_shape=level.orig_shape, **directional[k]))
    cube_data = haar.inverse(HaarPyramid(levels=tuple(levels)))
    cube = SpectralCube(grid=grid, data=cube_data)
    if stats is not None:
        stats.update(bayes_coefficients=n_bayes, tikhonov_coefficients=n_tik)
    return cube, fit_cube(
        cube,
        basis,
        epsilon=cfg.bayes.epsilon,
        calibration_scale=cfg.calibration_scale,
        threads=cfg.threads,
    )


def estimate_sequence(
    frames: Iterable[RgbImage],
    sensitivity: CameraSensitivity,
    basis: ChromophoreBasis,
    cfg: PipelineConfig,
    timings: list | None = None,
) -> Iterator[ConcentrationMap]:
    """Stream concentration maps for a frame sequence (constant memory).

    Per-frame wall-clock seconds, including decomposition and recomposition,
    are appended to ``timings`` when a list is given.
    """
    shape = None
    for frame in frames:
        if shape is None:
            shape = (frame.height, frame.width)
        elif (frame.height, frame.width) != shape:
            raise DataError(
                f"frame dimensions changed mid-stream: {shape} -> "
                f"{(frame.height, frame.width)}"
            )
        t0 = time.perf_counter()
        _, cmap = estimate_frame(frame, sensitivity, basis, cfg)
        if timings is not None:
            timings.append(time.perf_counter() - t0)
        yield cmap
