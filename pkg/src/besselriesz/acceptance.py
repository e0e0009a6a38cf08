"""The fourteen acceptance checks, one function each.

Every check returns a :class:`CheckResult`; ``run_suite`` groups them for the
``verify`` subcommand. Grids are chosen so each check finishes in well under
a minute on a laptop.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import approx, kernels, special, symbols
from .grid import SampledField, make_grid


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------


def check_special():
    notes = []
    r = np.geomspace(0.05, 20.0, 20)
    g = special.bessel_kernel_g(special.BesselKernelParams(1, 1), r)
    err_g = float(np.max(np.abs(g / (0.5 * np.exp(-r)) - 1)))
    ok_g = err_g <= 1e-10
    notes.append(f"G2 rel err {err_g:.1e}")

    worst_m = 0.0
    for d in (1, 3):
        for j in range(1, 6):
            for s in (0.0, 0.5, 1.0):
                params = special.BesselKernelParams(j, d)
                quad = special.radial_quadrature(lambda t: special.bessel_kernel_g(params, t), d, s)
                worst_m = max(worst_m, _rel(quad, special.g_moment(j, s, d)))
    ok_m = worst_m <= 1e-8
    notes.append(f"moments {worst_m:.1e}")

    coeffs = special.binom_coeffs(1.0, 10**6)
    partial = np.cumsum(coeffs)
    checkpoints = [10, 100, 1000, 10**4, 10**5, 10**6]
    tail_err = max(abs((1 - partial[J - 1]) - special.series_tail(1.0, J)) for J in checkpoints)
    defect = 1 - partial[-1]
    ok_s = bool(np.all(np.diff(partial) > 0)) and tail_err < 1e-12 and defect < 1e-2
    notes.append(f"tail mismatch {tail_err:.1e}, defect(1e6) {defect:.2e}")

    worst_k = max(
        _rel(special.k_moment_quadrature(beta, nu), special.k_moment_closed_form(beta, nu))
        for beta, nu in ((2.0, 0.0), (3.0, 0.5), (4.0, 1.0))
    )
    ok_k = worst_k <= 1e-8
    notes.append(f"K moments {worst_k:.1e}")
    return ok_g and ok_m and ok_s and ok_k, "; ".join(notes)


def check_two_path():
    grid = make_grid(1, 4096, 64.0)
    fields = {
        "gaussian": approx.build_field(approx.TestFunctionSpec("gaussian"), grid),
        "indicator": approx.build_field(approx.TestFunctionSpec("indicator"), grid),
    }
    worst, ok = 0.0, True
    for alpha in (0.5, 1.0):
        spec = kernels.series_truncation(alpha, 1e-3)
        for mu in (4.0, 16.0):
            for f in fields.values():
                direct = symbols.apply_symbol(f, symbols.SymbolSpec("quotient", alpha, mu))
                series = f - kernels.convolve_series(f, spec, mu)
                gap = approx.lp_norm(direct - series, 2) / approx.lp_norm(f, 2)
                worst = max(worst, gap / spec.tail_mass)
                ok &= gap <= spec.tail_mass
    return ok, f"max gap / tail_mass = {worst:.3f}"


def _approx_grid():
    return make_grid(1, 2**15, 64.0)


def check_equivalence():
    grid = _approx_grid()
    fields = {
        "gaussian": approx.TestFunctionSpec("gaussian"),
        "indicator": approx.TestFunctionSpec("indicator"),
        "band-limited": approx.TestFunctionSpec("random_band_limited", seed=7, cutoff=4.0),
    }
    mus = approx.mu_grid(2.0, 128.0)
    ok, lo, spread = True, math.inf, 0.0
    for spec in fields.values():
        f = approx.build_field(spec, grid)
        for p in (1.5, 2.0, 4.0):
            ratio = approx.equivalence_curve(f, 1.0, p, mus)["ratio"]
            lo = min(lo, ratio.min())
            spread = max(spread, ratio.max() / ratio.min())
            ok &= ratio.min() > 0.01 and ratio.max() / ratio.min() < 10
    return ok, f"min ratio {lo:.3f}, worst max/min {spread:.2f}"


def check_interpolation_envelope():
    grid = _approx_grid()
    f = approx.build_field(approx.TestFunctionSpec("indicator"), grid)
    mus = approx.mu_grid(2.0, 256.0)
    ok, parts = True, []
    for alpha in (0.3, 0.5, 0.8):
        curve = approx.equivalence_curve(f, alpha, 2.0, mus)
        C, holds, worst = approx.fitted_envelope(curve["err"], curve["two_term"], 0, 1.5)
        ok &= holds
        parts.append(f"a={alpha}: worst {worst:.2f}")
    return ok, "indicator p=2, " + ", ".join(parts) + " (limit 1.5)"


def check_log_envelope():
    grid = _approx_grid()
    mus = approx.mu_grid(2.0, 256.0)
    ok, parts = True, []
    for kind in ("indicator", "tent"):
        f = approx.build_field(approx.TestFunctionSpec(kind), grid)
        curve = approx.equivalence_curve(f, 1.0, 1.0, mus)
        C, holds, worst = approx.fitted_envelope(curve["err"], curve["log_env"], 0, 1.5)
        ok &= holds
        parts.append(f"{kind}: worst {worst:.2f}")
    return ok, "p=1, " + ", ".join(parts) + " (limit 1.5)"


def check_lipschitz_rates():
    grid = _approx_grid()
    mus = approx.mu_grid(2.0, 256.0)
    tent = approx.build_field(approx.TestFunctionSpec("tent"), grid)
    ind = approx.build_field(approx.TestFunctionSpec("indicator"), grid)
    s_tent = approx.lipschitz_rate(tent, 2.0, mus).fits["err"][0]
    s_ind2 = approx.lipschitz_rate(ind, 2.0, mus).fits["err"][0]
    c1 = approx.lipschitz_rate(ind, 1.0, mus, log_corrected=True)
    s_ind1 = c1.fits["err_over_log"][0]
    ok = abs(s_tent + 1) <= 0.15 and abs(s_ind2 + 0.5) <= 0.1 and -1.15 <= s_ind1 <= -0.85
    detail = (
        f"tent p=2 {s_tent:.3f}, indicator p=2 {s_ind2:.3f}, "
        f"indicator p=1 err/ln(mu) {s_ind1:.3f} (raw {c1.fits['err'][0]:.3f})"
    )
    return ok, detail


def check_saturation():
    grid = _approx_grid()
    f = approx.build_field(approx.TestFunctionSpec("gaussian"), grid)
    mus = approx.mu_grid(2.0, 256.0)
    curve = approx.saturation_curve(f, 2.0, mus)
    spread = approx.plateau_spread(curve["mu_err"])
    limit = curve.meta["limit"]
    off = _rel(curve["mu_err"][-1], limit)
    top = mus >= mus[-1] / 10 * (1 - 1e-12)
    rising = bool(np.all(np.diff(curve["mu12_err"][top]) > 0))
    ok = spread <= 0.05 and off <= 0.2 and rising
    return ok, f"plateau spread {spread:.1e}, |plateau/limit - 1| {off:.1e}, mu^1.2 err rising: {rising}"


def _kernel_grid():
    return make_grid(1, 2**21, 512.0)


def check_kernel_decay():
    grid = _kernel_grid()
    ok, parts = True, []
    for alpha in (0.5, 1.0):
        sweep = kernels.decay_sweep("quotient", alpha, (16.0, 32.0, 64.0), grid)
        slopes = [rep.extra["far_slope"] for rep in sweep["reports"].values()]
        limit = -(1 + alpha / 2) + 0.1
        ok &= all(math.isfinite(s) for s in sweep["sups"]) and sweep["drift"] < 5 and max(slopes) <= limit
        parts.append(f"a={alpha}: drift {sweep['drift']:.4f}, slope {max(slopes):.3f} (<= {limit:.2f})")
    return ok, "; ".join(parts)


def check_hormander():
    grid = _kernel_grid()
    mu = 16.0
    ys = 2.0 ** np.arange(-2, 5) / mu
    ok, parts = True, []
    for alpha in (1.0, 0.5):
        rep = kernels.hormander_check(symbols.SymbolSpec("quotient", alpha, mu), ys, grid)
        spread = rep.extra["spread"]
        ok &= bool(np.all(np.isfinite(rep.ratios))) and spread < 5
        parts.append(f"a={alpha}: spread {spread:.2f}")
    return ok, "|mu y| in [0.25, 16], " + ", ".join(parts)


def check_localization():
    grid = _approx_grid()
    mus = approx.mu_grid(2.0, 256.0)
    f = approx.build_field(approx.TestFunctionSpec("annular", inner=2.0, outer=4.0), grid)
    ok, parts = True, []
    for alpha in (0.5, 1.0):
        slope = approx.localization_slope(f, alpha, 0.0, mus, delta=1.0).fits["value"][0]
        ok &= slope <= -alpha / 2 + 0.1
        parts.append(f"a={alpha}: slope {slope:.3f}")
    zero = approx.localization_slope(SampledField(grid, np.zeros(grid.shape)), 1.0, 0.0, mus, delta=1.0)
    zero_ok = bool(np.all(zero["value"] == 0))
    ok &= zero_ok
    return ok, ", ".join(parts) + f", zero input exact: {zero_ok}"


def check_besov():
    cases = (
        ("indicator", 0.3, make_grid(1, 2**18, 4.0), 2.0**15),
        ("gaussian", 0.5, make_grid(1, 2**14, 16.0), 512.0),
    )
    ok, parts = True, []
    for kind, s, grid, mu_max in cases:
        f = approx.build_field(approx.TestFunctionSpec(kind), grid)
        rep = approx.besov_ratio(f, s, 2.0, 2.0, mu_max)
        ok &= 0.1 <= rep.ratio <= 10 and rep.reliable
        parts.append(f"{kind} s={s}: ratio {rep.ratio:.3f}, defect {rep.defect:.1%}")
    return ok, "; ".join(parts)


def mean_zero_fields(grid):
    x = grid.axis
    odd = SampledField(grid, x * np.exp(-0.5 * x * x))
    band = approx.build_field(approx.TestFunctionSpec("random_band_limited", seed=3, cutoff=1.0), grid)
    return {"x*gaussian": odd, "band-limited": SampledField(grid, band.values - band.values.mean())}


def check_muckenhoupt_wheeden():
    grid = _approx_grid()
    mus = approx.mu_grid(2.0, 64.0)
    ok, parts = True, []
    for name, f in mean_zero_fields(grid).items():
        curve = approx.muckenhoupt_wheeden_check(f, 2.0, mus)
        ok &= curve.meta["holds"]
        parts.append(f"{name}: worst {curve.meta['worst']:.2f}")
    return ok, ", ".join(parts) + " (limit 1.5)"


def check_log_rate():
    profile = approx.log_profile(1.5)
    curve = approx.ksp_log_rate(profile, approx.mu_grid(4.0, 4096.0))
    # m_{1,mu}^2 <= ln(1 + xi^2) / (2 ln mu) for mu > 1 bounds the series
    bound = curve.meta["weighted_norm"] / math.sqrt(2.0)
    top = float(curve["scaled"].max())
    ok_rate = top <= bound
    worst = 0.0
    for mu in (1.0, 8.0, 64.0):
        grid = make_grid(1, 2**12, 64.0)
        xi = grid.freq_radius()
        m = symbols.evaluate(symbols.SymbolSpec("quotient", 1.0, mu), xi)
        cap = 2.0 * np.sqrt(np.log1p((xi / mu) ** 2))
        nz = xi > 0
        worst = max(worst, float(np.max(m[nz] / cap[nz])))
        ok_rate &= bool(np.all(m <= cap))
    return ok_rate, f"max err*sqrt(ln mu) {top:.4f} <= {bound:.4f}; max m/(2 sqrt B) {worst:.3f}"


def check_k_functional():
    grid = _approx_grid()
    worst = math.inf
    ok = True
    for kind in ("gaussian", "indicator", "tent"):
        f = approx.build_field(approx.TestFunctionSpec(kind), grid)
        for p in (1.0, 2.0):
            for mu in (4.0, 16.0, 64.0):
                k_up = approx.k_functional_upper(f, mu, p)
                err = approx.approx_error(f, 1.0, mu, p)
                worst = min(worst, k_up - err)
                ok &= k_up >= err - 1e-6
    rep = symbols.derivative_bound_check(symbols.SymbolSpec("remainder", 1.0, 4.0), 1, symbols.dyadic_samples(4.0, 4))
    ok &= rep.max_ratio <= 1.0 + 1e-4
    return ok, f"min(k_upper - err) {worst:.2e}; remainder max |r'| |xi|/2 = {rep.max_ratio:.4f}"


CHECKS = {
    1: ("special-function suite", check_special),
    2: ("two-path oracle", check_two_path),
    3: ("modulus equivalence", check_equivalence),
    4: ("interpolation envelope", check_interpolation_envelope),
    5: ("log envelope p=1", check_log_envelope),
    6: ("Lipschitz rates", check_lipschitz_rates),
    7: ("saturation", check_saturation),
    8: ("kernel decay", check_kernel_decay),
    9: ("Hormander integral", check_hormander),
    10: ("localization", check_localization),
    11: ("Besov ratio", check_besov),
    12: ("fractional maximal domination", check_muckenhoupt_wheeden),
    13: ("logarithmic rate", check_log_rate),
    14: ("K-functional and remainder symbol", check_k_functional),
}

SUITES = {
    "special": (1,),
    "kernels": (2, 8, 9),
    "approx": (3, 4, 5, 6, 7, 10, 11, 12),
    "symbols": (13, 14),
    "all": tuple(CHECKS),
}


def run_check(number: int) -> CheckResult:
    name, func = CHECKS[number]
    start = time.perf_counter()
    try:
        passed, detail = func()
    except Exception as exc:  # a crash is a failed check, with the reason shown
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CheckResult(number, name, bool(passed), detail, time.perf_counter() - start)


def run_suite(suite: str = "all"):
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    return [run_check(n) for n in SUITES[suite]]
