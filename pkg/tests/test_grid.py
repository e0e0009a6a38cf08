import math

import numpy as np
import pytest

from besselriesz.grid import (
    Sampling,
    SampledField,
    SpectralField,
    forward_coefficients,
    lp_norm,
    make_grid,
    modulus_of_continuity,
    random_band_limited,
    shift,
    spectral_l2_norm,
    transform,
)


@pytest.fixture(scope="module")
def line():
    return make_grid(1, 1024, 64.0)


def gaussian(grid, center=0.0):
    x = grid.coords()[0]
    return SampledField(grid, np.exp(-0.5 * (x - center) ** 2))


def indicator01(grid):
    x = grid.axis
    return SampledField(grid, ((x >= 0) & (x < 1.0 - 1e-12)).astype(float))


def pure_mode(grid, k):
    xi = 2 * math.pi * k / grid.length
    return SampledField(grid, np.exp(1j * xi * grid.axis)), xi


class TestMakeGrid:
    def test_spacing_and_frequency_step(self):
        g = make_grid(1, 256, 64.0)
        assert g.spacing == 0.25
        assert g.xi_step == pytest.approx(2 * math.pi / 64)

    def test_frequency_lattice(self):
        g = make_grid(1, 16, 8.0)
        k = np.rint(g.axis_freq / g.xi_step).astype(int)
        assert sorted(k) == list(range(-8, 8))

    @pytest.mark.parametrize("args", [(1, 7, 64.0), (1, 4, 64.0), (1, 96, 64.0)])
    def test_rejects_bad_n(self, args):
        with pytest.raises(ValueError, match="power of two"):
            make_grid(*args)

    def test_rejects_dimension(self):
        with pytest.raises(ValueError, match="dimension"):
            make_grid(4, 256, 64.0)

    @pytest.mark.parametrize("length", [0.0, -1.0, math.inf])
    def test_rejects_length(self, length):
        with pytest.raises(ValueError, match="length"):
            make_grid(1, 256, length)


class TestFields:
    def test_sample_count_checked(self, line):
        with pytest.raises(ValueError):
            SampledField(line, np.zeros(10))

    def test_nonfinite_rejected(self, line):
        vals = np.zeros(line.n)
        vals[3] = np.nan
        with pytest.raises(ValueError, match="NaN"):
            SampledField(line, vals)

    def test_values_are_frozen(self, line):
        fld = gaussian(line)
        with pytest.raises(ValueError):
            fld.values[0] = 1.0

    def test_mixing_grids_fails(self, line):
        with pytest.raises(ValueError):
            gaussian(line) + gaussian(make_grid(1, 512, 64.0))


class TestTransform:
    @pytest.mark.parametrize("dim,n", [(1, 256), (2, 32), (3, 16)])
    def test_round_trip(self, dim, n):
        g = make_grid(dim, n, 16.0)
        rng = np.random.default_rng(7)
        fld = SampledField(g, rng.standard_normal(g.shape))
        back = transform(transform(fld), "inverse")
        assert np.linalg.norm(back.values - fld.values) <= 1e-12 * np.linalg.norm(fld.values)

    def test_gaussian_matches_continuum_transform(self, line):
        spec = transform(gaussian(line))
        xi = line.axis_freq
        band = np.abs(xi) <= math.pi / line.spacing - 2
        exact = math.sqrt(2 * math.pi) * np.exp(-0.5 * xi**2)
        assert np.max(np.abs(spec.coefficients[band] - exact[band])) < 1e-8

    def test_pure_mode_has_single_coefficient(self, line):
        fld, _ = pure_mode(line, 5)
        c = np.abs(transform(fld).coefficients)
        k = np.rint(line.axis_freq / line.xi_step).astype(int)
        assert c[k == 5][0] > 1
        assert np.max(c[k != 5]) < 1e-9 * c.max()

    def test_direction_checked(self, line):
        with pytest.raises(ValueError):
            transform(gaussian(line), "sideways")

    def test_parseval_band_limited(self):
        g = make_grid(2, 64, 16.0)
        fld = random_band_limited(g, 3, 5.0)
        spec = transform(fld)
        assert abs(lp_norm(fld, 2) - spectral_l2_norm(spec)) / lp_norm(fld, 2) < 1e-12


class TestNorms:
    def test_indicator_mass(self, line):
        assert lp_norm(indicator01(line), 1) == pytest.approx(1.0, abs=line.spacing)

    def test_zero_field(self, line):
        zero = SampledField(line, np.zeros(line.n))
        for p in (1, 1.5, 2, 4):
            assert lp_norm(zero, p) == 0.0

    def test_gaussian_l2(self, line):
        assert lp_norm(gaussian(line), 2) == pytest.approx(math.pi**0.25, abs=1e-8)

    @pytest.mark.parametrize("p", [0.5, math.inf, -1])
    def test_p_range(self, line, p):
        with pytest.raises(ValueError):
            lp_norm(gaussian(line), p)


class TestShift:
    def test_zero_shift_is_identity(self, line):
        fld = gaussian(line)
        assert np.array_equal(shift(fld, 0.0).values, fld.values)

    def test_phase_law(self, line):
        fld, xi = pure_mode(line, 3)
        h = 0.3
        moved = shift(fld, h)
        assert np.allclose(moved.values, np.exp(1j * xi * h) * fld.values, atol=1e-12)

    def test_gaussian_translation(self, line):
        # f(. + h): the bump moves to -h
        moved = shift(gaussian(line), 1.0)
        assert np.max(np.abs(moved.values - gaussian(line, -1.0).values)) < 1e-8
        back = shift(gaussian(line), -1.0)
        assert np.max(np.abs(back.values - gaussian(line, 1.0).values)) < 1e-8

    def test_subcell_translation(self, line):
        moved = shift(gaussian(line), 0.1234)
        assert np.max(np.abs(moved.values - gaussian(line, -0.1234).values)) < 1e-8

    def test_l2_isometry(self):
        g = make_grid(2, 64, 16.0)
        fld = random_band_limited(g, 11, 4.0)
        moved = shift(fld, (0.37, -1.21))
        assert lp_norm(moved, 2) == pytest.approx(lp_norm(fld, 2), rel=1e-12)

    @pytest.mark.parametrize("p", [1.0, 3.0])
    def test_lp_isometry_band_limited(self, line, p):
        # lifted above zero so |f|^p has no kinks and the Riemann sum stays spectrally exact
        raw = random_band_limited(line, 5, 3.0)
        fld = SampledField(line, raw.values - raw.values.min() + 0.5)
        moved = shift(fld, 0.731)
        assert lp_norm(moved, p) == pytest.approx(lp_norm(fld, p), rel=1e-6)

    def test_offset_too_large(self, line):
        with pytest.raises(ValueError, match="too large"):
            shift(gaussian(line), 32.0)


class TestModulus:
    def test_zero_t(self, line):
        assert modulus_of_continuity(gaussian(line), 0.0, 2) == 0.0

    def test_negative_t(self, line):
        with pytest.raises(ValueError):
            modulus_of_continuity(gaussian(line), -0.1, 2)

    def test_indicator_p1(self, line):
        w = modulus_of_continuity(indicator01(line), 0.25, 1)
        assert w == pytest.approx(0.5, abs=2 * line.spacing)

    def test_gaussian_mean_value_bound(self, line):
        # ||f'||_2 for exp(-x^2/2) is (pi/4)^(1/4)
        t = 0.1
        w = modulus_of_continuity(gaussian(line), t, 2)
        x = line.axis
        oracle = math.sqrt(line.spacing * np.sum((np.exp(-0.5 * (x + t) ** 2) - np.exp(-0.5 * x**2)) ** 2))
        assert w <= t * (math.pi / 4) ** 0.25
        assert w == pytest.approx(oracle, rel=1e-6)

    def test_bounded_by_twice_norm(self, line):
        fld = random_band_limited(line, 2, 6.0)
        for p in (1, 2, 4):
            assert modulus_of_continuity(fld, 5.0, p) <= 2 * lp_norm(fld, p) + 1e-12

    def test_monotone_on_shared_lattice(self, line):
        fld = random_band_limited(line, 4, 3.0)
        samp = Sampling(step=line.spacing)
        ts = line.spacing * np.arange(1, 40)
        vals = [modulus_of_continuity(fld, t, 2, samp) for t in ts]
        assert np.all(np.diff(vals) >= -1e-14)

    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_subadditive(self, line, p):
        fld = random_band_limited(line, 9, 2.0)
        samp = Sampling(step=line.spacing)
        for t1, t2 in [(0.25, 0.5), (0.75, 1.0), (1.5, 0.25)]:
            lhs = modulus_of_continuity(fld, t1 + t2, p, samp)
            rhs = modulus_of_continuity(fld, t1, p, samp) + modulus_of_continuity(fld, t2, p, samp)
            assert lhs <= rhs * (1 + 1e-12)

    @pytest.mark.parametrize("gamma", [2, 3, 5])
    def test_dilation_bound(self, line, gamma):
        fld = random_band_limited(line, 12, 2.0)
        samp = Sampling(step=line.spacing)
        t = 0.5
        big = modulus_of_continuity(fld, gamma * t, 2, samp)
        assert big <= 1.05 * (1 + gamma) * modulus_of_continuity(fld, t, 2, samp)

    def test_autocorrelation_path_matches_roll(self, line):
        fld = indicator01(line)
        for k in (1, 3, 17):
            h = k * line.spacing
            direct = lp_norm(SampledField(line, np.roll(fld.values, -k) - fld.values), 2)
            assert modulus_of_continuity(fld, h, 2, Sampling(n_radii=1)) == pytest.approx(direct, rel=1e-10)

    def test_two_dimensional(self):
        g = make_grid(2, 64, 16.0)
        fld = random_band_limited(g, 1, 3.0)
        w1 = modulus_of_continuity(fld, 0.5, 2)
        w2 = modulus_of_continuity(fld, 1.0, 2)
        assert 0 < w1 <= w2


class TestBandLimited:
    def test_deterministic(self, line):
        a = random_band_limited(line, 42, 5.0)
        b = random_band_limited(line, 42, 5.0)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, random_band_limited(line, 43, 5.0).values)

    def test_real(self, line):
        assert random_band_limited(line, 1, 5.0).is_real

    def test_zero_cutoff_is_constant(self, line):
        fld = random_band_limited(line, 1, 0.0)
        assert np.ptp(fld.values) < 1e-12 * max(1.0, np.abs(fld.values).max())

    @pytest.mark.parametrize("dim,n", [(1, 512), (2, 64)])
    def test_spectral_support(self, dim, n):
        g = make_grid(dim, n, 32.0)
        cutoff = 3.0
        c = forward_coefficients(random_band_limited(g, 8, cutoff))
        assert np.max(np.abs(c[g.freq_radius() > cutoff])) < 1e-12 * np.abs(c).max()

    def test_cutoff_too_large(self, line):
        with pytest.raises(ValueError, match="cutoff"):
            random_band_limited(line, 0, line.nyquist)

    def test_spectral_field_shape(self, line):
        with pytest.raises(ValueError):
            SpectralField(line, np.zeros(5))
