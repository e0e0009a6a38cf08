import math

import numpy as np
import pytest
from scipy import integrate

from besselriesz import kernels, special
from besselriesz.grid import SampledField, forward_coefficients, lp_norm, make_grid, random_band_limited
from besselriesz.symbols import (
    SymbolSpec,
    apply_multiplier,
    apply_symbol,
    derivative_bound_check,
    dyadic_samples,
    evaluate,
    lattice_symbol,
    symbol_value,
)


@pytest.fixture(scope="module")
def line():
    return make_grid(1, 1024, 64.0)


def gaussian(grid):
    return SampledField(grid, np.exp(-0.5 * grid.axis**2))


class TestSpec:
    @pytest.mark.parametrize(
        "kind,alpha,mu",
        [("wavelet", 1.0, 1.0), ("quotient", 0.0, 1.0), ("quotient", 1.5, 1.0), ("bessel_potential", 2.5, 1.0),
         ("remainder", 0.5, 1.0), ("quotient", 1.0, 0.0), ("quotient", 1.0, math.inf)],
    )
    def test_invalid(self, kind, alpha, mu):
        with pytest.raises(ValueError):
            SymbolSpec(kind, alpha, mu)

    def test_potentials_admit_order_two(self):
        SymbolSpec("bessel_potential", 2.0, 1.0)
        SymbolSpec("riesz_potential", 2.0, 1.0)

    def test_bounded_flag(self):
        assert SymbolSpec("quotient").bounded
        assert not SymbolSpec("riesz_potential").bounded


class TestValues:
    def test_examples(self):
        assert symbol_value(SymbolSpec("quotient", 1.0, 3.0), [4.0]) == pytest.approx(0.8, rel=1e-15)
        assert symbol_value(SymbolSpec("quotient", 1.0, 1.0), 1.0) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
        for alpha, mu in ((0.3, 2.0), (1.0, 50.0)):
            assert symbol_value(SymbolSpec("quotient", alpha, mu), [0.0, 0.0]) == 0.0

    def test_vector_argument_uses_norm(self):
        spec = SymbolSpec("quotient", 0.5, 2.0)
        assert symbol_value(spec, [3.0, 4.0]) == pytest.approx(symbol_value(spec, 5.0), rel=1e-15)

    def test_closed_forms(self):
        xi = np.array([0.0, 0.5, 3.0, 40.0])
        a, mu = 0.7, 2.5
        assert np.allclose(evaluate(SymbolSpec("complement", a, mu), xi), 1 - (xi**2 / (mu**2 + xi**2)) ** (a / 2))
        assert np.allclose(evaluate(SymbolSpec("bessel_potential", 1.6, mu), xi), (mu**2 + xi**2) ** -0.8)
        assert np.allclose(evaluate(SymbolSpec("remainder", 1.0, mu), xi), mu / (np.sqrt(mu**2 + xi**2) + xi))
        assert np.allclose(evaluate(SymbolSpec("riesz_potential", 0.5, 1.0), xi[1:]), xi[1:] ** -0.5)

    def test_riesz_singular_at_origin(self):
        with pytest.raises(ValueError, match="singular"):
            symbol_value(SymbolSpec("riesz_potential", 1.0, 1.0), 0.0)

    def test_ranges(self):
        xi = np.geomspace(1e-6, 1e6, 400)
        for a in (0.2, 1.0):
            q = evaluate(SymbolSpec("quotient", a, 3.0), xi)
            c = evaluate(SymbolSpec("complement", a, 3.0), xi)
            assert np.all((q >= 0) & (q <= 1)) and np.all((c >= 0) & (c <= 1))
        r = evaluate(SymbolSpec("remainder", 1.0, 3.0), np.concatenate(([0.0], xi)))
        assert np.all((r > 0) & (r <= 1))

    def test_complement_keeps_precision_at_high_frequency(self):
        # 1 - m ~ (alpha/2) (mu/xi)^2 once xi >> mu
        c = evaluate(SymbolSpec("complement", 1.0, 1.0), 1e7)
        assert c == pytest.approx(0.25e-14, rel=1e-6)


class TestInvariants:
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0])
    def test_monotone_on_lattice(self, line, alpha):
        xi = np.sort(np.unique(line.freq_radius()))
        mus = [1.0, 2.0, 4.0, 8.0]
        vals = np.array([evaluate(SymbolSpec("quotient", alpha, mu), xi) for mu in mus])
        assert np.all(np.diff(vals, axis=1) >= 0)
        assert np.all(np.diff(vals, axis=0) <= 0)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
    @pytest.mark.parametrize("mu", [0.5, 3.0, 64.0])
    def test_scaling_law(self, alpha, mu):
        xi = np.geomspace(1e-3, 1e3, 101) * mu
        lhs = evaluate(SymbolSpec("quotient", alpha, mu), xi)
        rhs = evaluate(SymbolSpec("quotient", alpha, 1.0), xi / mu)
        assert np.max(np.abs(lhs - rhs)) <= 1e-15

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_partial_sum_identity(self, alpha):
        mu = 4.0
        xi = np.array([0.5, 2.0, 4.0, 16.0, 100.0])
        x = 1.0 / (1.0 + (xi / mu) ** 2)
        a = special.binom_coeffs(alpha, 4000)
        partial = np.cumsum(a[:, None] * x[None, :] ** np.arange(1, 4001)[:, None], axis=0)
        target = evaluate(SymbolSpec("complement", alpha, mu), xi)
        assert np.all(np.diff(partial, axis=0) >= 0)  # flat once x^j underflows
        assert np.all(partial[-1] <= target + 1e-15)
        spec = kernels.series_truncation(alpha, 1e-3)
        trunc = kernels.truncated_series_symbol(spec, mu, xi)
        assert np.all(target - trunc <= spec.tail_mass)
        assert np.all(target - trunc >= -1e-14)

    @pytest.mark.parametrize("mu", [1.0, 8.0, 64.0])
    def test_log_bound(self, mu):
        g = make_grid(1, 2**14, 64.0)
        xi = g.freq_radius()
        m = evaluate(SymbolSpec("quotient", 1.0, mu), xi)
        assert np.all(m <= 2 * np.sqrt(np.log1p((xi / mu) ** 2)))

    def test_plancherel(self, line):
        fld = gaussian(line)
        spec = SymbolSpec("quotient", 1.0, 4.0)
        real_space = lp_norm(apply_symbol(fld, spec), 2)
        c = forward_coefficients(fld) * evaluate(spec, line.freq_radius())
        spectral = math.sqrt(np.vdot(c, c).real / line.length)
        assert abs(real_space - spectral) <= 1e-10 * spectral


class TestApply:
    def test_pure_mode_eigenfunction(self, line):
        k = 7
        xi = 2 * math.pi * k / line.length
        mode = SampledField(line, np.exp(1j * xi * line.axis))
        spec = SymbolSpec("quotient", 0.5, 1.5)
        out = apply_symbol(mode, spec)
        assert np.allclose(out.values, symbol_value(spec, xi) * mode.values, atol=1e-12)

    @pytest.mark.parametrize("alpha", [0.4, 1.0])
    def test_quotient_plus_complement(self, line, alpha):
        fld = random_band_limited(line, 3, 10.0)
        q = apply_symbol(fld, SymbolSpec("quotient", alpha, 2.0))
        c = apply_symbol(fld, SymbolSpec("complement", alpha, 2.0))
        assert np.max(np.abs((q + c).values - fld.values)) < 1e-12 * np.abs(fld.values).max()

    def test_linear(self, line):
        f = random_band_limited(line, 1, 5.0)
        g = gaussian(line)
        spec = SymbolSpec("quotient", 0.5, 3.0)
        lhs = apply_symbol(2.0 * f + g, spec).values
        rhs = 2.0 * apply_symbol(f, spec).values + apply_symbol(g, spec).values
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_real_output(self, line):
        out = apply_symbol(gaussian(line), SymbolSpec("quotient", 0.5, 3.0))
        assert out.is_real

    def test_bessel_potential_against_quadrature(self, line):
        # (2 pi)^-1 int e^{ix xi} (1 + xi^2)^-1 sqrt(2 pi) e^{-xi^2/2} dxi, even in xi
        out = apply_symbol(gaussian(line), SymbolSpec("bessel_potential", 2.0, 1.0))
        for i in (512, 523, 544, 592):
            x = float(line.axis[i])
            val, _ = integrate.quad(
                lambda t: math.cos(x * t) * math.exp(-0.5 * t * t) / (1 + t * t), 0, 40, epsabs=1e-14, epsrel=1e-13, limit=200
            )
            oracle = 2 * val * math.sqrt(2 * math.pi) / (2 * math.pi)
            assert out.values[i] == pytest.approx(oracle, abs=1e-8)

    def test_apply_multiplier_callable_and_array(self, line):
        f = gaussian(line)
        a = apply_multiplier(f, lambda xi: np.exp(-xi))
        b = apply_multiplier(f, np.exp(-line.freq_radius()))
        assert np.array_equal(a.values, b.values)


class TestDcPolicy:
    def test_zero_drops_mean(self, line):
        f = gaussian(line)
        out = apply_symbol(f, SymbolSpec("riesz_potential", 1.0, 1.0))
        assert abs(out.values.mean()) < 1e-12

    def test_keep_passes_mean(self, line):
        const = SampledField(line, np.full(line.n, 3.0))
        out = apply_symbol(const, SymbolSpec("riesz_potential", 1.0, 1.0), dc_policy="keep")
        assert np.allclose(out.values, 3.0)

    def test_error_on_nonzero_mean(self, line):
        with pytest.raises(ValueError, match="nonzero mean"):
            apply_symbol(gaussian(line), SymbolSpec("riesz_potential", 1.0, 1.0), dc_policy="error")

    def test_error_accepts_mean_zero(self, line):
        x = line.axis
        odd = SampledField(line, x * np.exp(-0.5 * x * x))
        apply_symbol(odd, SymbolSpec("riesz_potential", 1.0, 1.0), dc_policy="error")

    def test_unknown_policy(self, line):
        with pytest.raises(ValueError):
            lattice_symbol(SymbolSpec("riesz_potential"), line, "ignore")

    def test_policy_irrelevant_for_bounded(self, line):
        spec = SymbolSpec("quotient", 1.0, 2.0)
        assert np.array_equal(lattice_symbol(spec, line, "zero"), lattice_symbol(spec, line, "keep"))


class TestDerivativeBounds:
    def test_remainder(self):
        rep = derivative_bound_check(SymbolSpec("remainder", 1.0, 4.0), 1, dyadic_samples(4.0))
        assert rep.max_ratio <= 1.0 + 1e-4

    @pytest.mark.parametrize("order", [1, 2])
    def test_quotient_stable_under_doubling(self, order):
        r8 = derivative_bound_check(SymbolSpec("quotient", 0.5, 8.0), order, dyadic_samples(8.0))
        r16 = derivative_bound_check(SymbolSpec("quotient", 0.5, 16.0), order, dyadic_samples(16.0))
        assert math.isfinite(r8.max_ratio)
        assert max(r8.max_ratio, r16.max_ratio) / min(r8.max_ratio, r16.max_ratio) < 2

    def test_constant_symbol_limit(self):
        rep = derivative_bound_check(SymbolSpec("complement", 1.0, 1e12), 1, dyadic_samples(1.0))
        assert np.max(rep.extra["derivatives"]) < 1e-10

    @pytest.mark.parametrize("kind,alpha", [("quotient", 1.0), ("complement", 0.5), ("bessel_potential", 1.5), ("riesz_potential", 0.5)])
    def test_bounded_ratios(self, kind, alpha):
        for order in (1, 2):
            rep = derivative_bound_check(SymbolSpec(kind, alpha, 5.0), order, dyadic_samples(5.0))
            assert 0 < rep.max_ratio < 10

    def test_vector_samples(self):
        pts = np.array([[3.0, 4.0], [0.0, 2.0], [10.0, -1.0]])
        rep = derivative_bound_check(SymbolSpec("quotient", 1.0, 2.0), 2, pts)
        assert rep.ratios.shape == (3,)
        assert np.allclose(rep.samples, np.linalg.norm(pts, axis=1))

    def test_rejects_origin_and_order(self):
        with pytest.raises(ValueError):
            derivative_bound_check(SymbolSpec("quotient"), 1, [0.0, 1.0])
        with pytest.raises(ValueError):
            derivative_bound_check(SymbolSpec("quotient"), 3, [1.0])

    def test_dyadic_samples_span(self):
        s = dyadic_samples(8.0)
        assert s.min() == pytest.approx(0.5) and s.max() == pytest.approx(128.0)
