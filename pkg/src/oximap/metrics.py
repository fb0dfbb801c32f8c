"""Accuracy metrics between concentration maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConcentrationMap
from .errors import ArgumentError


@dataclass(frozen=True)
class MseReport:
    """Pooled and per-plane squared error between two maps.

    ``mse`` pools the hbo and hb planes as one sample set (offset excluded);
    ``rmse`` is its square root and is the number used in human-facing
    summaries, since it carries g/litre units.
    """

    mse: float
    rmse: float
    mse_hbo: float
    mse_hb: float
    n_pixels: int


def concentration_mse(
    est: ConcentrationMap, ref: ConcentrationMap, mask: np.ndarray | None = None
) -> MseReport:
    """Mean squared concentration error over masked pixels.

    Uses the raw (unclamped) hbo/hb planes so the comparison stays faithful
    to the fitted solution. Summation is numpy's pairwise reduction, so the
    result is deterministic for a given mask.
    """
    if (est.height, est.width) != (ref.height, ref.width):
        raise ArgumentError(
            f"map dimensions differ: {est.height}x{est.width} vs {ref.height}x{ref.width}"
        )
    if mask is None:
        mask = np.ones((est.height, est.width), dtype=bool)
    else:
        mask = np.asarray(mask)
        if mask.shape != (est.height, est.width) or mask.dtype != bool:
            raise ArgumentError("mask must be a boolean plane matching the maps")
    n = int(mask.sum())
    if n == 0:
        raise ArgumentError("mask selects no pixels")
    err_hbo = est.hbo[mask] - ref.hbo[mask]
    err_hb = est.hb[mask] - ref.hb[mask]
    mse_hbo = float(np.mean(err_hbo**2))
    mse_hb = float(np.mean(err_hb**2))
    mse = 0.5 * (mse_hbo + mse_hb)
    return MseReport(
        mse=mse, rmse=float(np.sqrt(mse)), mse_hbo=mse_hbo, mse_hb=mse_hb, n_pixels=n
    )
