"""Closed-form RGB -> spectrum estimation per pixel or per coefficient.

Two linear inverses of the camera forward model y = C @ s are provided: the
minimum-norm least-squares solution and the Tikhonov-regularised solution
(C.T C + gamma I)^-1 C.T y. Both are plain matrix products per pixel, so they
apply unchanged to wavelet coefficients of the RGB planes: the transform and
the unmixer commute.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CameraSensitivity
from .errors import ArgumentError, SingularOperatorError
from .haar import HaarLevel, HaarPyramid


def lsq_unmix(rgb: np.ndarray, sensitivity: CameraSensitivity) -> np.ndarray:
    """Minimum-norm least squares spectrum for each 3-vector in ``rgb``.

    Solves the underdetermined system through the 3x3 dual form,
    s = C.T (C C.T)^-1 y, which minimises ||C s - y|| with the smallest
    ||s||. Accepts a single 3-vector or any (..., 3) stack and returns a
    matching (..., L) array.
    """
    c = sensitivity.c
    gram = c @ c.T  # 3x3
    if np.linalg.matrix_rank(gram) < 3:
        raise SingularOperatorError("sensitivity matrix is rank deficient")
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise ArgumentError(f"expected trailing axis of 3 channels, got shape {rgb.shape}")
    # s = C.T (C C.T)^-1 y  ==  y @ (C C.T)^-1 C  along the trailing axis
    return rgb @ np.linalg.solve(gram, c)


@dataclass(frozen=True)
class TikhonovOperator:
    """Precomputed ridge inverse of a camera sensitivity matrix.

    ``solve`` is the L x 3 matrix (C.T C + gamma I)^-1 C.T, built once per
    (sensitivity, gamma) pair and applied per coefficient by a single
    matrix-vector product. Immutable and shareable across workers.
    """

    sensitivity: CameraSensitivity
    gamma: float
    solve: np.ndarray  # (L, 3)

    @classmethod
    def build(cls, sensitivity: CameraSensitivity, gamma: float) -> "TikhonovOperator":
        """Construct from an absolute regularisation constant gamma > 0.

        Computed through the push-through identity
        (C.T C + gamma I)^-1 C.T == C.T (C C.T + gamma I)^-1, whose 3x3
        system stays well conditioned for arbitrarily small gamma.
        """
        if gamma <= 0:
            raise ArgumentError(f"gamma must be > 0, got {gamma}")
        c = sensitivity.c
        solve = np.linalg.solve(c @ c.T + gamma * np.eye(3), c).T
        return cls(sensitivity=sensitivity, gamma=float(gamma), solve=solve)

    @classmethod
    def from_relative(
        cls, sensitivity: CameraSensitivity, rel_gamma: float = 1e-3
    ) -> "TikhonovOperator":
        """Construct with gamma scaled to the operator: rel_gamma * trace(C.T C) / L."""
        c = sensitivity.c
        scale = np.trace(c.T @ c) / c.shape[1]
        return cls.build(sensitivity, rel_gamma * scale)


def tikhonov_unmix(rgb: np.ndarray, op: TikhonovOperator) -> np.ndarray:
    """Apply the precomputed ridge inverse to each 3-vector in ``rgb``."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise ArgumentError(f"expected trailing axis of 3 channels, got shape {rgb.shape}")
    return rgb @ op.solve.T


def unmix_pyramid_directional(pyramid: HaarPyramid, op: TikhonovOperator) -> HaarPyramid:
    """Unmix every directional plane of an RGB pyramid to L spectral channels.

    Low-pass planes are passed through untouched; the coarsest one is the
    input of the iterative low-pass estimator, which replaces it before
    inversion.
    """
    levels = []
    for level in pyramid.levels:
        if level.dh.shape[-1] != 3:
            raise ArgumentError("pyramid must carry 3-channel (RGB) planes")
        levels.append(
            HaarLevel(
                lp=level.lp,
                dh=tikhonov_unmix(level.dh, op),
                dv=tikhonov_unmix(level.dv, op),
                dd=tikhonov_unmix(level.dd, op),
                orig_shape=level.orig_shape,
            )
        )
    return HaarPyramid(levels=tuple(levels))
