import numpy as np
import pytest

from conftest import random_sensitivity
from oximap.bayes import (
    BayesConfig,
    LowPassBlock,
    estimate_lowpass,
    expectation_step,
    expected_spectrum,
    fit_concentration,
    second_difference,
)
from oximap.core import ChromophoreBasis, WavelengthGrid
from oximap.errors import ArgumentError
from oximap.unmix import TikhonovOperator


def small_basis(l_bands=6):
    g = WavelengthGrid(500.0, 20.0, l_bands)
    xi = np.column_stack([
        np.linspace(0.02, 0.06, l_bands),
        np.linspace(0.05, 0.015, l_bands),
        np.ones(l_bands),
    ])
    return ChromophoreBasis(grid=g, xi=xi)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(beta=0.0), dict(max_iters=0), dict(rel_tol=0.0),
        dict(epsilon=0.0), dict(epsilon=1.0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ArgumentError):
            BayesConfig(**kwargs)


class TestFitConcentration:
    def test_exact_forward_inverse_pair(self, rng, basis):
        x0 = rng.uniform(-3, 3, 3)
        spectrum = np.exp(-(basis.xi @ x0))
        assert np.max(np.abs(fit_concentration(spectrum, basis) - x0)) <= 1e-10

    def test_all_ones_gives_zero(self, basis):
        x = fit_concentration(np.ones(basis.grid.count), basis)
        assert np.max(np.abs(x)) <= 1e-12

    def test_against_dense_normal_equation_oracle(self, rng, basis):
        spectrum = rng.uniform(0.05, 1.0, basis.grid.count)
        oracle = np.linalg.lstsq(basis.xi, -np.log(spectrum), rcond=None)[0]
        assert np.max(np.abs(fit_concentration(spectrum, basis) - oracle)) <= 1e-9

    def test_batched_matches_single(self, rng, basis):
        plane = rng.uniform(0.1, 1.0, size=(4, 5, basis.grid.count))
        out = fit_concentration(plane, basis)
        assert out.shape == (4, 5, 3)
        assert np.allclose(out[1, 2], fit_concentration(plane[1, 2], basis), atol=1e-14)


class TestExpectedSpectrum:
    def test_zero_concentration(self, basis):
        assert np.allclose(expected_spectrum(np.zeros(3), basis), 1.0)

    def test_fixpoint_round_trip(self, rng, basis):
        for _ in range(20):
            x = rng.uniform(-5, 5, 3)
            back = fit_concentration(expected_spectrum(x, basis), basis)
            assert np.max(np.abs(back - x)) <= 1e-10

    def test_monotone_in_hbo(self, basis):
        lo = expected_spectrum(np.array([1.0, 0.5, 0.0]), basis)
        hi = expected_spectrum(np.array([2.0, 0.5, 0.0]), basis)
        absorbing = basis.xi[:, 0] > 0
        assert np.all(hi[absorbing] < lo[absorbing])

    def test_strictly_positive(self, rng, basis):
        x = rng.uniform(-5, 5, (10, 3))
        assert np.all(expected_spectrum(x, basis) > 0)


class TestExpectationStep:
    def test_consistent_data_returns_prior(self, rng, sensitivity):
        cfg = BayesConfig()
        e = rng.uniform(0.2, 1.0, sensitivity.grid.count)
        y = sensitivity.c @ e
        out = expectation_step(y, e, sensitivity, cfg)
        assert np.max(np.abs(out - e)) <= 1e-8

    def test_against_dense_quadratic_oracle(self, rng):
        # stacked least squares solved by an independent dense routine
        sens = random_sensitivity(rng, 6)
        cfg = BayesConfig(beta=1.0)
        d2 = second_difference(6)
        y = rng.uniform(0.1, 1.0, 3)
        e = rng.uniform(0.1, 1.0, 6)
        a = np.vstack([sens.c, np.sqrt(cfg.beta) * d2])
        b = np.concatenate([y, np.sqrt(cfg.beta) * (d2 @ e)])
        oracle = np.linalg.lstsq(a, b, rcond=None)[0]
        out = expectation_step(y, e, sens, cfg)
        assert np.max(np.abs(out - oracle)) <= 1e-9

    def test_large_beta_locks_shape_to_prior(self, rng):
        # oracle: constrained fit over the affine-in-wavelength family e + a + b*t
        sens = random_sensitivity(rng, 8)
        d2 = second_difference(8)
        y = rng.uniform(0.2, 1.5, 3)
        e = rng.uniform(0.1, 1.0, 8)
        out = expectation_step(y, e, sens, BayesConfig(beta=1e9))
        assert np.max(np.abs(d2 @ out - d2 @ e)) <= 1e-6
        t = np.arange(8.0)
        m = np.column_stack([sens.c @ np.ones(8), sens.c @ t])
        ab = np.linalg.lstsq(m, y - sens.c @ e, rcond=None)[0]
        constrained = e + ab[0] + ab[1] * t
        assert np.max(np.abs(out - constrained)) <= 1e-5

    def test_batched_shapes(self, rng, sensitivity):
        cfg = BayesConfig()
        y = rng.uniform(0.1, 1.0, (4, 7, 3))
        e = rng.uniform(0.1, 1.0, (4, 7, sensitivity.grid.count))
        out = expectation_step(y, e, sensitivity, cfg)
        assert out.shape == e.shape
        one = expectation_step(y[2, 5], e[2, 5], sensitivity, cfg)
        assert np.allclose(out[2, 5], one, atol=1e-12)


class TestEstimateLowpass:
    def test_constant_phantom_within_one_percent(self, sensitivity, basis):
        x0 = np.array([40.0, 40.0, 0.0])
        y = sensitivity.c @ np.exp(-(basis.xi @ x0))
        block = LowPassBlock(rgb_lp=np.tile(y, (3, 4, 1)), scale=1.0)
        init = TikhonovOperator.from_relative(sensitivity, 1e-3)
        _, cmap = estimate_lowpass(block, sensitivity, basis, BayesConfig(), init)
        assert np.max(np.abs(cmap.hbo - 40.0)) / 40.0 <= 0.01
        assert np.max(np.abs(cmap.hb - 40.0)) / 40.0 <= 0.01

    def test_all_ones_with_unit_row_sums(self, basis, grid):
        from oximap.core import CameraSensitivity

        c = np.zeros((3, grid.count))
        c[0, :6] = 1.0 / 6
        c[1, 8:16] = 1.0 / 8
        c[2, 18:] = 1.0 / 8
        sens = CameraSensitivity(grid=grid, c=c)
        block = LowPassBlock(rgb_lp=np.ones((2, 2, 3)), scale=1.0)
        init = TikhonovOperator.from_relative(sens, 1e-3)
        _, cmap = estimate_lowpass(block, sens, basis, BayesConfig(max_iters=50), init)
        assert np.max(np.abs(cmap.stacked())) <= 1e-6

    def test_scale_division_matches_unscaled(self, rng, sensitivity, basis):
        x0 = np.array([30.0, 20.0, 0.05])
        y = sensitivity.c @ np.exp(-(basis.xi @ x0))
        init = TikhonovOperator.from_relative(sensitivity, 1e-3)
        cfg = BayesConfig()
        _, direct = estimate_lowpass(
            LowPassBlock(rgb_lp=y.reshape(1, 1, 3), scale=1.0),
            sensitivity, basis, cfg, init,
        )
        _, scaled = estimate_lowpass(
            LowPassBlock(rgb_lp=(8.0 * y).reshape(1, 1, 3), scale=8.0),
            sensitivity, basis, cfg, init,
        )
        assert np.allclose(scaled.stacked(), direct.stacked(), atol=1e-12)

    def test_fixpoint_start_stays_put(self, rng, sensitivity, basis):
        cfg = BayesConfig()
        x0 = np.array([25.0, 35.0, -0.1])
        spectrum = np.exp(-(basis.xi @ x0))
        y = sensitivity.c @ spectrum
        init = TikhonovOperator.from_relative(sensitivity, 1e-3)
        _, cmap = estimate_lowpass(
            LowPassBlock(rgb_lp=y.reshape(1, 1, 3), scale=1.0),
            sensitivity, basis, cfg, init,
            init_spectra=spectrum.reshape(1, 1, -1),
        )
        got = cmap.stacked()[0, 0]
        assert np.linalg.norm(got - x0) / np.linalg.norm(x0) <= cfg.rel_tol

    def test_convergence_on_random_phantoms(self, rng, sensitivity, basis):
        # 100 random concentration pixels: capped iterations, no NaN, accurate
        cfg = BayesConfig()
        x0 = np.column_stack([
            rng.uniform(5, 60, 100), rng.uniform(5, 60, 100), rng.uniform(-0.2, 0.2, 100),
        ])
        y = np.exp(-(x0 @ basis.xi.T)) @ sensitivity.c.T
        init = TikhonovOperator.from_relative(sensitivity, 1e-3)
        spectra, cmap = estimate_lowpass(
            LowPassBlock(rgb_lp=y.reshape(1, 100, 3), scale=1.0),
            sensitivity, basis, cfg, init,
        )
        assert np.all(np.isfinite(spectra)) and np.all(np.isfinite(cmap.stacked()))
        xh = cmap.stacked().reshape(100, 3)
        rel = np.linalg.norm(xh - x0, axis=1) / np.linalg.norm(x0, axis=1)
        assert np.max(rel) <= 0.01

    def test_threads_match_sequential(self, rng, sensitivity, basis):
        y = rng.uniform(0.2, 2.0, size=(8, 8, 3))
        block = LowPassBlock(rgb_lp=y, scale=2.0)
        init = TikhonovOperator.from_relative(sensitivity, 1e-3)
        cfg = BayesConfig()
        spectra1, cmap1 = estimate_lowpass(block, sensitivity, basis, cfg, init, threads=1)
        spectra4, cmap4 = estimate_lowpass(block, sensitivity, basis, cfg, init, threads=4)
        assert np.allclose(spectra1, spectra4, atol=1e-12)
        assert np.allclose(cmap1.stacked(), cmap4.stacked(), atol=1e-12)

    def test_determinism(self, rng, sensitivity, basis):
        y = rng.uniform(0.2, 2.0, size=(4, 4, 3))
        block = LowPassBlock(rgb_lp=y, scale=1.0)
        init = TikhonovOperator.from_relative(sensitivity, 1e-3)
        out1 = estimate_lowpass(block, sensitivity, basis, BayesConfig(), init)
        out2 = estimate_lowpass(block, sensitivity, basis, BayesConfig(), init)
        assert np.array_equal(out1[0], out2[0])
        assert np.array_equal(out1[1].stacked(), out2[1].stacked())

    def test_rejects_negative_block(self):
        with pytest.raises(ArgumentError):
            LowPassBlock(rgb_lp=np.full((2, 2, 3), -0.5), scale=1.0)

    def test_no_nan_escapes_on_zero_data(self, sensitivity, basis):
        block = LowPassBlock(rgb_lp=np.zeros((2, 2, 3)), scale=1.0)
        init = TikhonovOperator.from_relative(sensitivity, 1e-3)
        spectra, cmap = estimate_lowpass(block, sensitivity, basis, BayesConfig(), init)
        assert np.all(np.isfinite(spectra)) and np.all(np.isfinite(cmap.stacked()))
