import numpy as np
import pytest

from conftest import random_sensitivity
from oximap import haar
from oximap.core import CameraSensitivity, WavelengthGrid
from oximap.errors import ArgumentError
from oximap.unmix import (
    TikhonovOperator,
    lsq_unmix,
    tikhonov_unmix,
    unmix_pyramid_directional,
)


class TestLsqUnmix:
    def test_consistent_rgb_is_reproduced(self, rng, sensitivity):
        s = rng.uniform(0.1, 1.0, sensitivity.grid.count)
        y = sensitivity.c @ s
        est = lsq_unmix(y, sensitivity)
        assert np.max(np.abs(sensitivity.c @ est - y)) <= 1e-10

    def test_zero_maps_to_zero(self, sensitivity):
        assert np.array_equal(lsq_unmix(np.zeros(3), sensitivity), np.zeros(sensitivity.grid.count))

    def test_matches_svd_pseudoinverse(self, rng):
        # independent oracle: dense SVD pseudoinverse
        for l_bands in (4, 8, 16, 26):
            sens = random_sensitivity(rng, l_bands)
            y = rng.normal(size=3)
            oracle = np.linalg.pinv(sens.c) @ y
            assert np.max(np.abs(lsq_unmix(y, sens) - oracle)) <= 1e-9

    def test_minimum_norm_among_solutions(self, rng):
        sens = random_sensitivity(rng, 12)
        y = rng.normal(size=3)
        est = lsq_unmix(y, sens)
        # adding any null-space component grows the norm
        ns = np.eye(12) - np.linalg.pinv(sens.c) @ sens.c
        for _ in range(10):
            alt = est + ns @ rng.normal(size=12)
            assert np.linalg.norm(alt) >= np.linalg.norm(est) - 1e-12

    def test_plane_matches_per_pixel(self, rng, sensitivity):
        plane = rng.uniform(0, 1, size=(5, 4, 3))
        out = lsq_unmix(plane, sensitivity)
        assert out.shape == (5, 4, sensitivity.grid.count)
        one = lsq_unmix(plane[2, 3], sensitivity)
        assert np.allclose(out[2, 3], one, atol=1e-14)


class TestTikhonov:
    def test_gamma_must_be_positive(self, sensitivity):
        with pytest.raises(ArgumentError):
            TikhonovOperator.build(sensitivity, 0.0)

    def test_zero_input(self, sensitivity):
        op = TikhonovOperator.build(sensitivity, 1e-3)
        assert np.array_equal(tikhonov_unmix(np.zeros(3), op), np.zeros(sensitivity.grid.count))

    def test_shrinkage_with_large_gamma(self, rng, sensitivity):
        y = rng.uniform(0.2, 1.0, 3)
        big = TikhonovOperator.build(sensitivity, 1e3)
        small = tikhonov_unmix(y, big)
        assert np.linalg.norm(small) < np.linalg.norm(lsq_unmix(y, sensitivity))

    def test_limit_to_min_norm_lsq(self, rng):
        sens = random_sensitivity(rng, 8)
        s = rng.uniform(0.1, 1.0, 8)
        y = sens.c @ s
        lsq = lsq_unmix(y, sens)
        prev_err = np.inf
        for gamma in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
            est = tikhonov_unmix(y, TikhonovOperator.build(sens, gamma))
            err = np.max(np.abs(est - lsq))
            assert err <= prev_err + 1e-12
            prev_err = err
        assert prev_err <= 1e-6

    def test_norm_nonincreasing_in_gamma(self, rng, sensitivity):
        y = rng.uniform(0.2, 1.0, 3)
        norms = [
            np.linalg.norm(tikhonov_unmix(y, TikhonovOperator.build(sensitivity, g)))
            for g in np.logspace(-8, 2, 15)
        ]
        assert np.all(np.diff(norms) <= 1e-12)

    def test_matches_augmented_lstsq_oracle(self, rng):
        # independent oracle: stacked ridge system solved by dense lstsq
        for l_bands in (4, 16):
            sens = random_sensitivity(rng, l_bands)
            gamma = 10 ** rng.uniform(-6, -1)
            y = rng.normal(size=3)
            a = np.vstack([sens.c, np.sqrt(gamma) * np.eye(l_bands)])
            b = np.concatenate([y, np.zeros(l_bands)])
            oracle = np.linalg.lstsq(a, b, rcond=None)[0]
            est = tikhonov_unmix(y, TikhonovOperator.build(sens, gamma))
            assert np.max(np.abs(est - oracle)) <= 1e-9

    def test_relative_gamma_scaling(self, sensitivity):
        rel = 1e-3
        op = TikhonovOperator.from_relative(sensitivity, rel)
        c = sensitivity.c
        expected = rel * np.trace(c.T @ c) / c.shape[1]
        assert op.gamma == pytest.approx(expected)

    def test_low_gamma_solve_is_projection(self, rng):
        sens = random_sensitivity(rng, 6)
        op = TikhonovOperator.build(sens, 1e-13)
        proj = op.solve @ sens.c
        oracle = np.linalg.pinv(sens.c) @ sens.c
        assert np.max(np.abs(proj - oracle)) <= 1e-8


class TestWaveletCommutation:
    def test_unmix_commutes_with_transform(self, rng, sensitivity):
        # transform-then-unmix == unmix-then-transform
        frame = rng.uniform(0.05, 1.0, size=(24, 20, 3))
        op = TikhonovOperator.from_relative(sensitivity, 1e-3)
        spectral = tikhonov_unmix(frame, op)
        pyr_spec = haar.forward(spectral, 2)
        pyr_rgb = haar.forward(frame, 2)
        for ls, lr in zip(pyr_spec.levels, pyr_rgb.levels):
            for name in ("lp", "dh", "dv", "dd"):
                direct = tikhonov_unmix(getattr(lr, name), op)
                assert np.max(np.abs(getattr(ls, name) - direct)) <= 1e-10


class TestPyramidUnmix:
    def test_constant_frame_gives_zero_directionals(self, sensitivity):
        frame = np.full((8, 8, 3), 0.5)
        op = TikhonovOperator.from_relative(sensitivity, 1e-3)
        out = unmix_pyramid_directional(haar.forward(frame, 2), op)
        for level in out.levels:
            assert np.allclose(level.dh, 0.0) and np.allclose(level.dv, 0.0)
            assert np.allclose(level.dd, 0.0)

    def test_linearity_over_frames(self, rng, sensitivity):
        op = TikhonovOperator.from_relative(sensitivity, 1e-3)
        x = rng.uniform(0, 1, size=(8, 8, 3))
        y = rng.uniform(0, 1, size=(8, 8, 3))
        out_sum = unmix_pyramid_directional(haar.forward(x + y, 1), op)
        out_x = unmix_pyramid_directional(haar.forward(x, 1), op)
        out_y = unmix_pyramid_directional(haar.forward(y, 1), op)
        for name in ("dh", "dv", "dd"):
            combo = getattr(out_x.levels[0], name) + getattr(out_y.levels[0], name)
            assert np.allclose(getattr(out_sum.levels[0], name), combo, atol=1e-12)

    def test_elementwise_oracle(self, rng, sensitivity):
        op = TikhonovOperator.from_relative(sensitivity, 1e-3)
        frame = rng.uniform(0, 1, size=(10, 6, 3))
        pyr = haar.forward(frame, 1)
        out = unmix_pyramid_directional(pyr, op)
        for name in ("dh", "dv", "dd"):
            plane = getattr(pyr.levels[0], name)
            expect = np.stack([
                tikhonov_unmix(plane[i, j], op)
                for i in range(plane.shape[0]) for j in range(plane.shape[1])
            ]).reshape(plane.shape[0], plane.shape[1], -1)
            assert np.max(np.abs(getattr(out.levels[0], name) - expect)) <= 1e-12

    def test_lowpass_passthrough(self, rng, sensitivity):
        op = TikhonovOperator.from_relative(sensitivity, 1e-3)
        pyr = haar.forward(rng.uniform(0, 1, size=(8, 8, 3)), 2)
        out = unmix_pyramid_directional(pyr, op)
        assert out.residual_lp is pyr.residual_lp
