import numpy as np
import pytest

from oximap import haar
from oximap.errors import ArgumentError, DataError


class TestMatrix:
    def test_involutory(self):
        h = haar.haar_matrix()
        assert np.allclose(h @ h, np.eye(4), atol=1e-15)
        assert np.array_equal(h, h.T)

    def test_constant_window(self):
        out = np.array([1.0, 1.0, 1.0, 1.0]) @ haar.haar_matrix()
        assert np.allclose(out, [2.0, 0.0, 0.0, 0.0])

    def test_single_entry_window(self):
        out = np.array([1.0, 0.0, 0.0, 0.0]) @ haar.haar_matrix()
        assert np.allclose(out, [0.5, 0.5, 0.5, 0.5])

    def test_involution_on_random_vectors(self, rng):
        h = haar.haar_matrix()
        v = rng.normal(size=(200, 4))
        assert np.max(np.abs(v @ h @ h - v)) <= 1e-14


class TestForward:
    def test_constant_2x2(self):
        pyr = haar.forward(np.full((2, 2), 3.5), 1)
        level = pyr.levels[0]
        assert level.lp.shape == (1, 1)
        assert level.lp[0, 0] == pytest.approx(7.0)
        assert level.dh[0, 0] == level.dv[0, 0] == level.dd[0, 0] == 0.0

    def test_windowing_matches_matrix(self, rng):
        x = rng.normal(size=(6, 8))
        pyr = haar.forward(x, 1)
        h = haar.haar_matrix()
        for wy in range(3):
            for wx in range(4):
                window = np.array([
                    x[2 * wy, 2 * wx], x[2 * wy, 2 * wx + 1],
                    x[2 * wy + 1, 2 * wx], x[2 * wy + 1, 2 * wx + 1],
                ])
                expect = window @ h
                level = pyr.levels[0]
                got = [level.lp[wy, wx], level.dh[wy, wx], level.dv[wy, wx], level.dd[wy, wx]]
                assert np.allclose(got, expect, atol=1e-14)

    def test_odd_dims_padding_contract(self, rng):
        x = rng.normal(size=(3, 5))
        pyr = haar.forward(x, 1)
        assert pyr.levels[0].lp.shape == (2, 3)
        assert np.max(np.abs(haar.inverse(pyr) - x)) <= 1e-12

    def test_bad_levels(self):
        with pytest.raises(ArgumentError):
            haar.forward(np.ones((4, 4)), 0)

    def test_empty_image(self):
        with pytest.raises(ArgumentError):
            haar.forward(np.ones((0, 4)), 1)

    def test_nonfinite(self):
        x = np.ones((4, 4))
        x[1, 1] = np.inf
        with pytest.raises(ArgumentError):
            haar.forward(x, 1)


class TestRoundTrip:
    def test_random_multichannel(self, rng):
        x = rng.normal(size=(64, 64, 3))
        assert np.max(np.abs(haar.inverse(haar.forward(x, 1)) - x)) <= 1e-12

    def test_random_two_level(self, rng):
        x = rng.normal(size=(4, 4))
        assert np.max(np.abs(haar.inverse(haar.forward(x, 2)) - x)) <= 1e-12

    def test_three_level_with_padding(self, rng):
        x = rng.normal(size=(40, 40))
        assert np.max(np.abs(haar.inverse(haar.forward(x, 3)) - x)) <= 1e-12

    def test_one_pixel(self):
        x = np.array([[2.0]])
        pyr = haar.forward(x, 2)
        assert pyr.residual_lp.shape == (1, 1)
        assert np.allclose(haar.inverse(pyr), x)

    def test_zero_directional_constant(self):
        pyr = haar.forward(np.full((8, 8), 2.0), 2)
        rec = haar.inverse(pyr)
        assert np.allclose(rec, 2.0)


class TestInvariants:
    def test_parseval_per_level(self, rng):
        x = rng.normal(size=(32, 48, 3))
        pyr = haar.forward(x, 3)
        plane = x
        for level in pyr.levels:
            energy_in = np.sum(plane**2)
            energy_out = sum(
                np.sum(p**2) for p in (level.lp, level.dh, level.dv, level.dd)
            )
            assert energy_out == pytest.approx(energy_in, rel=1e-10)
            plane = level.lp

    def test_positivity_of_lowpass(self, rng):
        x = rng.uniform(0.0, 4.0, size=(33, 21))
        pyr = haar.forward(x, 3)
        for level in pyr.levels:
            assert np.all(level.lp >= 0)

    def test_linearity(self, rng):
        x = rng.normal(size=(16, 16))
        y = rng.normal(size=(16, 16))
        a, b = 2.5, -1.25
        pyr_sum = haar.forward(a * x + b * y, 2)
        pyr_x = haar.forward(x, 2)
        pyr_y = haar.forward(y, 2)
        for ls, lx, ly in zip(pyr_sum.levels, pyr_x.levels, pyr_y.levels):
            for name in ("lp", "dh", "dv", "dd"):
                combo = a * getattr(lx, name) + b * getattr(ly, name)
                assert np.allclose(getattr(ls, name), combo, atol=1e-12)


class TestInverseErrors:
    def test_structure_mismatch(self, rng):
        pyr = haar.forward(rng.normal(size=(8, 8)), 1)
        bad = haar.HaarPyramid(levels=(
            haar.HaarLevel(
                lp=pyr.levels[0].lp,
                dh=pyr.levels[0].dh[:2],
                dv=pyr.levels[0].dv,
                dd=pyr.levels[0].dd,
                orig_shape=pyr.levels[0].orig_shape,
            ),
        ))
        with pytest.raises(DataError):
            haar.inverse(bad)

    def test_missing_residual(self, rng):
        pyr = haar.forward(rng.normal(size=(8, 8)), 1)
        with pytest.raises(ArgumentError):
            haar.HaarPyramid(levels=(
                haar.HaarLevel(
                    lp=None,
                    dh=pyr.levels[0].dh,
                    dv=pyr.levels[0].dv,
                    dd=pyr.levels[0].dd,
                    orig_shape=pyr.levels[0].orig_shape,
                ),
            ))
