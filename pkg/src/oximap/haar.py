"""Single-level and multilevel 2D Haar transform on multi-channel images.

Each non-overlapping 2x2 window, read as the row vector
(top-left, top-right, bottom-left, bottom-right), is multiplied on the right
by the orthonormal 4x4 matrix H (see :func:`haar_matrix`), giving one
low-pass and three directional difference coefficients. H is symmetric and
involutory, so the same matrix inverts the transform.

Odd dimensions are edge-replicated (pad right / pad bottom) before each
level; the pre-padding shape is kept per level so the inverse crops back
exactly. All functions are pure; windows are independent, so callers may
process tiles concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DataError


def haar_matrix() -> np.ndarray:
    """The 4x4 orthonormal window matrix H (symmetric, H @ H = I)."""
    return 0.5 * np.array(
        [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
        ]
    )


@dataclass(frozen=True)
class HaarLevel:
    """Coefficient planes of one decomposition level.

    ``lp`` is the windowed average (non-negative for non-negative input);
    ``dh``/``dv``/``dd`` are the signed directional differences. ``orig_shape``
    is the pre-padding (rows, cols) of the plane this level decomposed, kept
    so the inverse can crop replication padding away. ``lp`` may be None on
    non-coarsest levels of an assembled pyramid, where it is recomputed
    during inversion.
    """

    lp: np.ndarray | None
    dh: np.ndarray
    dv: np.ndarray
    dd: np.ndarray
    orig_shape: tuple[int, int]


@dataclass(frozen=True)
class HaarPyramid:
    """Ordered decomposition levels, finest first.

    The coarsest level's ``lp`` is the residual low-pass plane; every other
    plane in the pyramid is a directional coefficient plane.
    """

    levels: tuple[HaarLevel, ...]

    def __post_init__(self):
        if not self.levels:
            raise ArgumentError("pyramid must have at least one level")
        if self.levels[-1].lp is None:
            raise ArgumentError("coarsest level must carry its low-pass plane")

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def residual_lp(self) -> np.ndarray:
        return self.levels[-1].lp


def _pad_even(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape[:2]
    if h % 2 == 0 and w % 2 == 0:
        return plane
    pad = [(0, h % 2), (0, w % 2)] + [(0, 0)] * (plane.ndim - 2)
    return np.pad(plane, pad, mode="edge")


def _forward_level(plane: np.ndarray) -> HaarLevel:
    orig_shape = plane.shape[:2]
    p = _pad_even(plane)
    a = p[0::2, 0::2]
    b = p[0::2, 1::2]
    c = p[1::2, 0::2]
    d = p[1::2, 1::2]
    return HaarLevel(
        lp=0.5 * (a + b + c + d),
        dh=0.5 * (a + b - c - d),
        dv=0.5 * (a - b - c + d),
        dd=0.5 * (a - b + c - d),
        orig_shape=orig_shape,
    )


def _inverse_level(lp: np.ndarray, level: HaarLevel) -> np.ndarray:
    for name, plane in (("dh", level.dh), ("dv", level.dv), ("dd", level.dd)):
        if plane.shape != lp.shape:
            raise DataError(
                f"level plane {name} has shape {plane.shape}, expected {lp.shape}"
            )
    h2, w2 = lp.shape[:2]
    out = np.empty((2 * h2, 2 * w2) + lp.shape[2:], dtype=np.float64)
    out[0::2, 0::2] = 0.5 * (lp + level.dh + level.dv + level.dd)
    out[0::2, 1::2] = 0.5 * (lp + level.dh - level.dv - level.dd)
    out[1::2, 0::2] = 0.5 * (lp - level.dh - level.dv + level.dd)
    out[1::2, 1::2] = 0.5 * (lp - level.dh + level.dv - level.dd)
    oh, ow = level.orig_shape
    return out[:oh, :ow]


def forward(image: np.ndarray, n_levels: int) -> HaarPyramid:
    """Decompose a (H, W) or (H, W, C) image into ``n_levels`` levels.

    Each level halves both axes (after edge replication to even sizes); the
    low-pass plane of each level feeds the next.
    """
    if n_levels < 1:
        raise ArgumentError(f"n_levels must be >= 1, got {n_levels}")
    image = np.asarray(image, dtype=np.float64)
    if image.ndim not in (2, 3):
        raise ArgumentError(f"image must be 2-D or 3-D, got shape {image.shape}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise ArgumentError("image must have at least one pixel per axis")
    if not np.all(np.isfinite(image)):
        raise ArgumentError("image contains non-finite values")

    levels = []
    plane = image
    for _ in range(n_levels):
        level = _forward_level(plane)
        levels.append(level)
        plane = level.lp
    return HaarPyramid(levels=tuple(levels))


def inverse(pyramid: HaarPyramid) -> np.ndarray:
    """Reconstruct the image, cropping any replication padding per level."""
    rec = pyramid.residual_lp
    for level in reversed(pyramid.levels):
        rec = _inverse_level(rec, level)
    return rec
