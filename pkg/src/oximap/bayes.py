"""Iterative Bayesian spectrum estimation for low-pass coefficients.

The estimator alternates a Beer-Lambert concentration fit (maximisation)
with a shape-prior spectral re-estimation (expectation). The expectation
step minimises

    ||C i - y||^2 + beta ||D2 i - D2 e||^2

where e = exp(-xi x) is the spectrum expected from the current
concentrations and D2 is the (L-2) x L second-difference operator along the
wavelength axis. The grid is uniform, so D2 uses unit spacing and the grid
step folds into beta. The normal matrix C.T C + beta D2.T D2 is positive
definite whenever no spectrum that is affine in wavelength lies in the
camera's null space, which holds for any physical sensitivity.

Only all-positive data may enter this path: the logarithm in the fit is
otherwise undefined. Per-pixel iterations are independent; the precomputed
operators are immutable and shared across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import CameraSensitivity, ChromophoreBasis, ConcentrationMap
from .errors import ArgumentError, IllConditionedPriorError
from .unmix import TikhonovOperator, tikhonov_unmix

_COND_LIMIT = 1e13


@dataclass(frozen=True)
class BayesConfig:
    """Knobs of the iterative estimator.

    beta weighs the second-derivative shape prior; epsilon floors spectra
    before any logarithm; rel_tol is the per-pixel convergence threshold on
    the relative change of the fitted concentration vector.
    """

    beta: float = 0.1
    max_iters: int = 20
    rel_tol: float = 1e-4
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.beta <= 0:
            raise ArgumentError(f"beta must be > 0, got {self.beta}")
        if self.max_iters < 1:
            raise ArgumentError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 < self.epsilon < 1:
            raise ArgumentError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.rel_tol <= 0:
            raise ArgumentError(f"rel_tol must be > 0, got {self.rel_tol}")


@dataclass(frozen=True)
class LowPassBlock:
    """Low-pass coefficient plane of an RGB frame plus its accumulated gain.

    An n-level decomposition scales a constant image by 2^n; ``scale`` records
    that gain so the estimator can work on unit-scale data. All entries are
    non-negative by construction (windowed averages of non-negative input).
    """

    rgb_lp: np.ndarray  # (h, w, 3)
    scale: float

    def __post_init__(self):
        rgb_lp = np.asarray(self.rgb_lp, dtype=np.float64)
        if rgb_lp.ndim != 3 or rgb_lp.shape[2] != 3:
            raise ArgumentError(f"rgb_lp must be (h, w, 3), got shape {rgb_lp.shape}")
        if np.any(rgb_lp < 0) or not np.all(np.isfinite(rgb_lp)):
            raise ArgumentError("low-pass coefficients must be finite and non-negative")
        if self.scale <= 0:
            raise ArgumentError(f"scale must be > 0, got {self.scale}")
        object.__setattr__(self, "rgb_lp", rgb_lp)


def second_difference(count: int) -> np.ndarray:
    """(count-2) x count unit-spaced second-difference operator."""
    if count < 3:
        raise ArgumentError(f"second difference needs >= 3 samples, got {count}")
    d2 = np.zeros((count - 2, count))
    idx = np.arange(count - 2)
    d2[idx, idx] = 1.0
    d2[idx, idx + 1] = -2.0
    d2[idx, idx + 2] = 1.0
    return d2


class _BeerLambertFit:
    """Precomputed least-squares fit of log-attenuation onto the basis."""

    def __init__(self, basis: ChromophoreBasis, epsilon: float):
        xi = basis.xi
        # x = -(xi.T xi)^-1 xi.T log(i); basis construction guarantees rank 3
        self.fit_mat = np.linalg.solve(xi.T @ xi, xi.T)  # (3, L)
        self.xi = xi
        self.epsilon = epsilon

    def fit(self, spectra: np.ndarray) -> np.ndarray:
        logs = np.log(np.clip(spectra, self.epsilon, None))
        return -(logs @ self.fit_mat.T)

    def expected(self, x: np.ndarray) -> np.ndarray:
        return np.exp(-(x @ self.xi.T))


class _ShapePriorSolver:
    """Factorised normal matrix of the shape-prior quadratic."""

    def __init__(self, sensitivity: CameraSensitivity, beta: float):
        c = sensitivity.c
        d2 = second_difference(c.shape[1])
        self.c = c
        self.prior = beta * (d2.T @ d2)  # symmetric (L, L)
        normal = c.T @ c + self.prior
        cond = np.linalg.cond(normal)
        if not np.isfinite(cond) or cond > _COND_LIMIT:
            raise IllConditionedPriorError(
                f"shape-prior normal matrix is numerically singular "
                f"(condition estimate {cond:.3e})"
            )
        self.cho = scipy.linalg.cho_factor(normal)

    def solve(self, rgb: np.ndarray, e_spectrum: np.ndarray) -> np.ndarray:
        rhs = rgb @ self.c + e_spectrum @ self.prior  # (..., L)
        flat = rhs.reshape(-1, rhs.shape[-1])
        out = scipy.linalg.cho_solve(self.cho, flat.T).T
        return out.reshape(e_spectrum.shape)


def fit_concentration(
    spectrum: np.ndarray, basis: ChromophoreBasis, epsilon: float = 1e-6
) -> np.ndarray:
    """Least-squares (hbo, hb, offset) from positive spectra.

    Minimises ||xi x + log(i)|| per spectrum after flooring the input at
    ``epsilon``. Accepts an L-vector or any (..., L) stack.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.shape[-1] != basis.grid.count:
        raise ArgumentError(
            f"spectrum has {spectrum.shape[-1]} bands, basis expects {basis.grid.count}"
        )
    return _BeerLambertFit(basis, epsilon).fit(spectrum)


def expected_spectrum(x: np.ndarray, basis: ChromophoreBasis) -> np.ndarray:
    """Beer-Lambert forward model exp(-xi x); strictly positive."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != 3:
        raise ArgumentError(f"concentration vectors must have 3 components, got {x.shape}")
    return np.exp(-(x @ basis.xi.T))


def expectation_step(
    rgb_lp: np.ndarray,
    e_spectrum: np.ndarray,
    sensitivity: CameraSensitivity,
    cfg: BayesConfig,
) -> np.ndarray:
    """Shape-prior regularised spectrum update.

    Returns the minimiser of ||C i - y||^2 + beta ||D2 i - D2 e||^2 for each
    (y, e) pair; closed form through the factorised L x L normal matrix.
    """
    rgb_lp = np.asarray(rgb_lp, dtype=np.float64)
    e_spectrum = np.asarray(e_spectrum, dtype=np.float64)
    if rgb_lp.shape[-1] != 3:
        raise ArgumentError(f"rgb_lp must have 3 trailing channels, got {rgb_lp.shape}")
    if e_spectrum.shape[-1] != sensitivity.grid.count:
        raise ArgumentError(
            f"expected spectrum has {e_spectrum.shape[-1]} bands, "
            f"sensitivity expects {sensitivity.grid.count}"
        )
    return _ShapePriorSolver(sensitivity, cfg.beta).solve(rgb_lp, e_spectrum)


def _iterate_block(
    y: np.ndarray,  # (n, 3) unit-scale data
    init_spectra: np.ndarray,  # (n, L) clamped initial estimate
    solver: _ShapePriorSolver,
    bl_fit: _BeerLambertFit,
    cfg: BayesConfig,
) -> tuple[np.ndarray, np.ndarray]:
    spectra = init_spectra
    x = bl_fit.fit(spectra)
    active = np.arange(y.shape[0])
    for _ in range(cfg.max_iters - 1):
        e = bl_fit.expected(x[active])
        new_spec = np.clip(solver.solve(y[active], e), cfg.epsilon, None)
        new_x = bl_fit.fit(new_spec)
        prev = x[active]
        denom = np.maximum(np.linalg.norm(prev, axis=-1), 1e-8)
        rel = np.linalg.norm(new_x - prev, axis=-1) / denom
        spectra[active] = new_spec
        x[active] = new_x
        active = active[rel >= cfg.rel_tol]
        if active.size == 0:
            break
    return spectra, x


def estimate_lowpass(
    block: LowPassBlock,
    sensitivity: CameraSensitivity,
    basis: ChromophoreBasis,
    cfg: BayesConfig,
    init: TikhonovOperator,
    *,
    threads: int = 1,
    init_spectra: np.ndarray | None = None,
) -> tuple[np.ndarray, ConcentrationMap]:
    """Estimate spectra and concentrations for a low-pass coefficient plane.

    Each pixel is initialised by the Tikhonov unmixer (or ``init_spectra``
    when given) and refined by alternating the Beer-Lambert fit with the
    shape-prior update until the fitted concentrations change by less than
    ``cfg.rel_tol`` (relative) or ``cfg.max_iters`` fits have run. The data
    is divided by ``block.scale`` first, so the returned spectra are
    unit-scale reflectance estimates and the offset keeps its
    illumination-change meaning across decomposition depths.

    Returns the (h, w, L) spectra and the concentration map at the block's
    resolution; the concentrations are always the fit of the returned
    spectra. Iteration is capped, so the estimator cannot diverge.
    """
    h, w = block.rgb_lp.shape[:2]
    n = h * w
    l_bands = sensitivity.grid.count
    y = (block.rgb_lp / block.scale).reshape(n, 3)

    solver = _ShapePriorSolver(sensitivity, cfg.beta)
    bl_fit = _BeerLambertFit(basis, cfg.epsilon)
    if init_spectra is None:
        spectra0 = tikhonov_unmix(y, init)
    else:
        init_spectra = np.asarray(init_spectra, dtype=np.float64)
        if init_spectra.shape[-1] != l_bands:
            raise ArgumentError(
                f"init_spectra has {init_spectra.shape[-1]} bands, expected {l_bands}"
            )
        spectra0 = init_spectra.reshape(n, l_bands).copy()
    spectra0 = np.clip(spectra0, cfg.epsilon, None)

    if threads <= 1 or n < 2 * threads:
        spectra, x = _iterate_block(y, spectra0, solver, bl_fit, cfg)
    else:
        spectra = np.empty_like(spectra0)
        x = np.empty((n, 3))
        bounds = np.linspace(0, n, threads + 1, dtype=int)
        slabs = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]

        def run(slab):
            lo, hi = slab
            s, c = _iterate_block(y[lo:hi], spectra0[lo:hi], solver, bl_fit, cfg)
            spectra[lo:hi] = s
            x[lo:hi] = c

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, slabs))

    cmap = ConcentrationMap(
        hbo=x[:, 0].reshape(h, w), hb=x[:, 1].reshape(h, w), offset=x[:, 2].reshape(h, w)
    )
    return spectra.reshape(h, w, l_bands), cmap
