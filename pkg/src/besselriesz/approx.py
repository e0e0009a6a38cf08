"""Approximation-order experiments for the quotient operator ``E_{alpha,mu}``.

Every experiment returns a :class:`CurveResult`: a geometric grid of ``mu``
values with named series and optional log-log fits. Per-``mu`` work is
independent, so :func:`sweep` may fan it out over threads; results are
always assembled in grid order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import _kernels
from .grid import (
    GridSpec,
    SampledField,
    Sampling,
    forward_coefficients,
    inverse_values,
    lp_norm,
    modulus_of_continuity,
    random_band_limited,
    sup_norm,
)
from .symbols import SymbolSpec, apply_multiplier, apply_symbol, evaluate

MU_RATIO = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# curves


@dataclass
class CurveResult:
    mu: np.ndarray
    series: dict
    fits: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if self.mu.ndim != 1 or np.any(np.diff(self.mu) <= 0):
            raise ValueError("mu grid must be strictly increasing")
        for name, vals in self.series.items():
            vals = np.asarray(vals, dtype=float)
            if vals.shape != self.mu.shape:
                raise ValueError(f"series {name!r} does not match the mu grid")
            if not np.all(np.isfinite(vals)) or np.any(vals < 0):
                raise ValueError(f"series {name!r} must be finite and nonnegative")
            self.series[name] = vals

    def __getitem__(self, name):
        return self.series[name]

    def fit(self, name: str, window=None):
        """Log-log least squares of ``name`` over ``window = (mu_lo, mu_hi)``; stored in ``fits``."""
        self.fits[name] = rate_fit(self, name, window)
        return self.fits[name]

    def scaled(self, factor: float) -> "CurveResult":
        return CurveResult(self.mu.copy(), {k: v * factor for k, v in self.series.items()}, dict(self.fits), dict(self.meta))


def mu_grid(lo: float = 2.0, hi: float = 256.0, ratio: float = MU_RATIO) -> np.ndarray:
    """Geometric grid from ``lo`` to ``hi`` inclusive (``hi`` is hit when it is ``lo * ratio^k``)."""
    if not (0 < lo <= hi) or ratio <= 1:
        raise ValueError("need 0 < lo <= hi and ratio > 1")
    count = int(math.floor(math.log(hi / lo) / math.log(ratio) + 1e-9)) + 1
    return lo * ratio ** np.arange(count)


def rate_fit(curve: CurveResult, name: str, window=None):
    """``(slope, intercept, residual)`` of ``log value`` against ``log mu``."""
    mu = curve.mu
    vals = curve.series[name]
    sel = np.ones(mu.size, dtype=bool)
    if window is not None:
        lo, hi = window
        sel = (mu >= lo * (1 - 1e-12)) & (mu <= hi * (1 + 1e-12))
    if sel.sum() < 4:
        raise ValueError("rate_fit needs at least 4 points in the window")
    if np.any(vals[sel] <= 0):
        raise ValueError(f"series {name!r} has nonpositive values in the window")
    lx, ly = np.log(mu[sel]), np.log(vals[sel])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - slope * lx - intercept) ** 2)))
    return float(slope), float(intercept), resid


def sweep(func, mus, workers: int | None = None):
    """``[func(mu) for mu in mus]``, optionally on a thread pool, in grid order."""
    mus = [float(m) for m in mus]
    if not workers or workers <= 1:
        return [func(m) for m in mus]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, mus))


def fitted_envelope(values, envelope, fit_index: int = 0, safety: float = 1.5):
    """Fit ``C = value/envelope`` at one grid index and test ``value <= safety*C*envelope`` everywhere.

    Returns ``(C, holds, worst)`` where ``worst`` is the largest
    ``value / (C * envelope)``. A zero envelope with zero value counts as held.
    """
    values = np.asarray(values, dtype=float)
    envelope = np.asarray(envelope, dtype=float)
    C = values[fit_index] / envelope[fit_index]
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(envelope > 0, values / (C * envelope), np.where(values > 0, np.inf, 0.0))
    worst = float(rel.max())
    return float(C), worst <= safety, worst


# ---------------------------------------------------------------------------
# test functions

FUNCTION_KINDS = ("gaussian", "bump", "indicator", "tent", "random_band_limited", "annular", "spectral_custom")


@dataclass(frozen=True)
class TestFunctionSpec:
    """Parameters for one member of the test family.

    ``center``/``width`` place gaussian, bump, tent and indicator (in one
    dimension the indicator covers ``[center, center + width)``, elsewhere
    the ball of radius ``width``). ``annular`` is supported on
    ``inner <= |x - center| <= outer`` with a smooth or flat profile and is
    exactly zero on ``|x - center| < inner``. ``spectral`` is a callable of
    ``|xi|`` giving the continuum transform for ``spectral_custom``.
    """

    __test__ = False  # not a pytest class

    kind: str
    center: float = 0.0
    width: float = 1.0
    seed: int = 0
    cutoff: float = 4.0
    inner: float = 1.0
    outer: float = 3.0
    profile: str = "smooth"
    amplitude: float = 1.0
    spectral: object = None

    def __post_init__(self):
        if self.kind not in FUNCTION_KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}; expected one of {FUNCTION_KINDS}")
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.kind == "annular" and not (0 <= self.inner < self.outer):
            raise ValueError("annular support needs 0 <= inner < outer")
        if self.profile not in ("smooth", "indicator"):
            raise ValueError("profile must be 'smooth' or 'indicator'")


def _bump_profile(s):
    # exp(-1/(1 - s^2)) on |s| < 1, zero outside
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    out = np.zeros_like(s)
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def _offsets(grid: GridSpec, center):
    coords = grid.coords()
    c = np.broadcast_to(np.asarray(center, dtype=float), (grid.dim,))
    return [x - ci for x, ci in zip(coords, c)]


def build_field(spec: TestFunctionSpec, grid: GridSpec) -> SampledField:
    rel = _offsets(grid, spec.center)
    r = np.sqrt(sum(x * x for x in rel))
    k = spec.kind
    if k == "gaussian":
        vals = np.exp(-0.5 * (r / spec.width) ** 2)
    elif k == "bump":
        vals = _bump_profile(r / spec.width)
    elif k == "indicator":
        if grid.dim == 1:
            # compare in cell units so the endpoints land exactly on grid points
            cells = np.rint(rel[0] / grid.spacing * 1e6) / 1e6
            vals = ((cells >= 0) & (cells < spec.width / grid.spacing - 1e-9)).astype(float)
        else:
            vals = (r < spec.width).astype(float)
    elif k == "tent":
        vals = np.maximum(0.0, 1.0 - r / spec.width)
    elif k == "random_band_limited":
        return random_band_limited(grid, spec.seed, spec.cutoff) * spec.amplitude
    elif k == "annular":
        inside = (r >= spec.inner) & (r <= spec.outer)
        if spec.profile == "indicator":
            vals = inside.astype(float)
        else:
            mid = 0.5 * (spec.inner + spec.outer)
            half = 0.5 * (spec.outer - spec.inner)
            vals = np.where(inside, _bump_profile((r - mid) / half) * math.e, 0.0)
        vals = np.where(r < spec.inner, 0.0, vals)
    else:
        if not callable(spec.spectral):
            raise ValueError("spectral_custom needs a callable 'spectral' of |xi|")
        coeffs = np.asarray(spec.spectral(grid.freq_radius()), dtype=complex)
        vals = inverse_values(grid, coeffs, real=True)
    return SampledField(grid, spec.amplitude * vals)


def default_sampling(grid: GridSpec) -> Sampling:
    """64 radii per ``t``, floored to whole cells in one dimension."""
    if grid.dim == 1:
        return Sampling(n_radii=64, snap=grid.spacing)
    return Sampling(n_radii=16)


def check_mu_grid(grid: GridSpec, mus, strict: bool = False):
    """Reject ``mu`` values the lattice cannot resolve.

    Always requires ``1/mu >= 2h``; ``strict`` also enforces
    ``2 <= mu <= n pi / (4 L)`` so the symbol transition sits well inside the band.
    """
    mus = np.asarray(mus, dtype=float)
    if mus.size == 0 or np.any(mus <= 0):
        raise ValueError("mu grid must be nonempty and positive")
    if np.any(1.0 / mus < 2.0 * grid.spacing * (1 - 1e-12)):
        raise ValueError(f"1/mu must stay >= 2h = {2 * grid.spacing:g}")
    if strict:
        top = grid.n * math.pi / (4.0 * grid.length)
        if mus.min() < 2.0 * (1 - 1e-12) or mus.max() > top * (1 + 1e-12):
            raise ValueError(f"mu grid must lie in [2, {top:g}] for this grid")
    return mus


# ---------------------------------------------------------------------------
# core quantities


def approx_error(fld: SampledField, alpha: float, mu: float, p: float) -> float:
    """``||E_{alpha,mu} f||_p`` with ``E`` applied spectrally."""
    return lp_norm(apply_symbol(fld, SymbolSpec("quotient", alpha, mu)), p)


def plancherel_error(fld: SampledField, alpha: float, mu: float) -> float:
    """``||E_{alpha,mu} f||_2`` straight from the spectrum."""
    grid = fld.grid
    c = forward_coefficients(fld) * evaluate(SymbolSpec("quotient", alpha, mu), grid.freq_radius())
    return math.sqrt(np.vdot(c, c).real / grid.length**grid.dim)


def equivalence_curve(fld: SampledField, alpha: float, p: float, mus, sampling: Sampling | None = None, workers=None) -> CurveResult:
    """``err``, ``omega = omega(f, 1/mu)_p`` and ``ratio = err/omega`` over ``mus``.

    Envelopes: ``interp = omega^alpha ||f||^(1-alpha)`` and ``two_term = omega + interp``
    for ``alpha < 1``; ``log_env = omega (3 + 2 ln(||f|| / (2 omega)))`` for ``alpha = 1``.
    """
    grid = fld.grid
    mus = check_mu_grid(grid, mus, strict=True)
    sampling = default_sampling(grid) if sampling is None else sampling
    norm = lp_norm(fld, p)

    def one(mu):
        return approx_error(fld, alpha, mu, p), modulus_of_continuity(fld, 1.0 / mu, p, sampling)

    err, omega = map(np.array, zip(*sweep(one, mus, workers)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(omega > 0, err / omega, 0.0)
    series = {"err": err, "omega": omega, "ratio": ratio}
    if alpha < 1:
        interp = omega**alpha * norm ** (1 - alpha)
        series["interp"] = interp
        series["two_term"] = omega + interp
    else:
        series["log_env"] = log_envelope(omega, norm)
    return CurveResult(mus, series, meta={"alpha": alpha, "p": p, "norm": norm})


def log_envelope(omega, norm):
    omega = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        env = omega * (3.0 + 2.0 * np.log(norm / (2.0 * omega)))
    return np.where(omega > 0, env, 0.0)


def _abs_d_symbol(xi):
    return xi


def k_functional_upper(fld: SampledField, mu: float, p: float) -> float:
    """``||f - T f||_p + ||D| T f||_p / mu`` for the candidate ``g = T_{1,mu} f``.

    ``|D| T`` has symbol ``|xi| (1 - m_{1,mu}(xi))``.
    """
    grid = fld.grid
    xi = grid.freq_radius()
    m = evaluate(SymbolSpec("quotient", 1.0, mu), xi)
    coeffs = forward_coefficients(fld)
    err = SampledField(grid, inverse_values(grid, coeffs * m, fld.is_real))
    grad = SampledField(grid, inverse_values(grid, coeffs * xi * (1.0 - m), fld.is_real))
    return lp_norm(err, p) + lp_norm(grad, p) / mu


def abs_derivative_norm(fld: SampledField, p: float) -> float:
    """``|| |D| f ||_p``."""
    return lp_norm(apply_multiplier(fld, _abs_d_symbol), p)


def lipschitz_rate(fld: SampledField, p: float, mus, alpha: float = 1.0, window=None, log_corrected: bool = False, workers=None) -> CurveResult:
    """``err(mu)`` with a fitted slope.

    ``log_corrected`` also fits ``err / ln mu``, the series to use when the
    expected rate is ``ln(mu)/mu``.
    """
    mus = check_mu_grid(fld.grid, mus)
    err = np.array(sweep(lambda mu: approx_error(fld, alpha, mu, p), mus, workers))
    curve = CurveResult(mus, {"err": err}, meta={"alpha": alpha, "p": p})
    if np.all(err > 0):
        curve.fit("err", window)
        if log_corrected:
            if mus.min() <= 1:
                raise ValueError("log correction needs mu > 1")
            curve.series["err_over_log"] = err / np.log(mus)
            curve.fit("err_over_log", window)
    return curve


def saturation_curve(fld: SampledField, p: float, mus, workers=None) -> CurveResult:
    """``mu * err(mu)`` and ``mu^1.2 * err(mu)`` for ``alpha = 1``; ``meta['limit']`` holds ``||D| f||_2`` when p = 2."""
    mus = check_mu_grid(fld.grid, mus)
    err = np.array(sweep(lambda mu: approx_error(fld, 1.0, mu, p), mus, workers))
    series = {"err": err, "mu_err": mus * err, "mu12_err": mus**1.2 * err}
    meta = {"p": p}
    if p == 2:
        meta["limit"] = abs_derivative_norm(fld, 2.0)
    return CurveResult(mus, series, meta=meta)


def plateau_spread(values, count: int = 3) -> float:
    tail = np.asarray(values[-count:], dtype=float)
    return float(tail.max() / tail.min() - 1.0)


# ---------------------------------------------------------------------------
# Besov seminorm against the approximation integral


def _log_trapezoid(values, nodes):
    # integral of values d(nodes)/nodes on a geometric grid
    return float(np.trapezoid(values, np.log(nodes)))


@dataclass
class BesovReport:
    ratio: float
    lhs: float
    rhs: float
    lhs_top_fraction: float
    rhs_top_fraction: float

    @property
    def defect(self) -> float:
        return max(self.lhs_top_fraction, self.rhs_top_fraction)

    @property
    def reliable(self) -> bool:
        return self.defect <= 0.05


def besov_ratio(fld: SampledField, s: float, p: float, q: float, mu_max: float, per_octave: int = 4, sampling: Sampling | None = None) -> BesovReport:
    """``rhs / lhs`` with ``lhs = int_{1/mu_max}^1 (t^-s omega(f,t)_p)^q dt/t`` and
    ``rhs = int_1^{mu_max} (mu^s ||E_{1,mu} f||_p)^q dmu/mu``.

    Both integrals use the trapezoid rule in ``log t`` (resp. ``log mu``). The
    top-decade fractions measure how much of each side sits in the decade
    nearest the cut; the result is flagged unreliable above 5%. A top
    decade that outweighs the decade before it signals divergence.
    """
    if not (0 < s < 1):
        raise ValueError("s must lie in (0, 1)")
    if not (1 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    if not (1 <= q < math.inf):
        raise ValueError("q must lie in [1, inf)")
    grid = fld.grid
    if mu_max <= 10 or 1.0 / mu_max < 2.0 * grid.spacing * (1 - 1e-12):
        raise ValueError("mu_max must exceed 10 and keep 1/mu_max >= 2h")
    if 1.0 >= 0.5 * grid.length:
        raise ValueError("torus too small for shifts up to 1")
    sampling = default_sampling(grid) if sampling is None else sampling
    count = int(round(math.log2(mu_max) * per_octave)) + 1
    mus = np.geomspace(1.0, mu_max, count)
    ts = 1.0 / mus
    omega = np.array([modulus_of_continuity(fld, t, p, sampling) for t in ts])
    err = np.array([approx_error(fld, 1.0, mu, p) for mu in mus])
    if not np.any(omega > 0):
        return BesovReport(1.0, 0.0, 0.0, 0.0, 0.0)
    lhs_vals = (ts**-s * omega) ** q
    rhs_vals = (mus**s * err) ** q
    lhs = _log_trapezoid(lhs_vals, mus)
    rhs = _log_trapezoid(rhs_vals, mus)
    top = mus >= mu_max / 10 * (1 - 1e-12)
    prev = (mus >= mu_max / 100 * (1 - 1e-12)) & (mus <= mu_max / 10 * (1 + 1e-12))
    fractions = []
    for vals, total in ((lhs_vals, lhs), (rhs_vals, rhs)):
        top_part = _log_trapezoid(vals[top], mus[top])
        prev_part = _log_trapezoid(vals[prev], mus[prev])
        if top_part >= prev_part:
            raise ValueError("top decade does not decay; the seminorm integral appears divergent")
        fractions.append(top_part / total)
    return BesovReport(rhs / lhs, lhs, rhs, fractions[0], fractions[1])


# ---------------------------------------------------------------------------
# maximal functions and potentials


def truncated_maximal(fld: SampledField, alpha: float, delta: float) -> SampledField:
    """``sup_{r in {h, 2h, .., delta}} r^(alpha-d) * mass of |f| on the closed r-ball``.

    In one dimension masses use the trapezoid rule (half weight on the two
    boundary points), so a constant ``c`` has mass exactly ``2 c r``. In
    higher dimensions the mass is the lattice point count times ``h^d``.
    """
    grid = fld.grid
    h = grid.spacing
    if delta < h * (1 - 1e-12):
        raise ValueError(f"delta must be at least h = {h!r}")
    m_max = int(math.floor(delta / h + 1e-9))
    if m_max >= grid.n // 2:
        raise ValueError("delta too large for the torus")
    absf = np.abs(fld.values)
    if grid.dim == 1:
        return SampledField(grid, _kernels.maximal_1d(np.ascontiguousarray(absf, dtype=float), h, float(alpha), m_max))
    fa = np.fft.fftn(absf)
    r = np.sqrt(sum(np.minimum(k, grid.n - k) ** 2 for k in np.meshgrid(*[np.arange(grid.n)] * grid.dim, indexing="ij")))
    best = np.zeros(grid.shape)
    for m in range(1, m_max + 1):
        ball = (r <= m + 1e-9).astype(float)
        mass = np.fft.ifftn(fa * np.fft.fftn(ball)).real * h**grid.dim
        np.maximum(best, (m * h) ** (alpha - grid.dim) * mass, out=best)
    return SampledField(grid, best)


def riesz_potential(fld: SampledField, alpha: float = 1.0, dc_policy: str = "error") -> SampledField:
    return apply_symbol(fld, SymbolSpec("riesz_potential", alpha, 1.0), dc_policy=dc_policy)


def muckenhoupt_wheeden_check(fld: SampledField, p: float, mus, dc_policy: str = "error", sampling: Sampling | None = None, safety: float = 1.5, workers=None) -> CurveResult:
    """``lhs = omega(I_1 f, 1/mu)_p`` against ``rhs = ||M_{1,1/mu} f||_p``.

    The Riesz potential drops the zero mode; ``dc_policy='error'`` refuses
    fields with a nonzero mean. ``meta`` records the constant fitted at the
    smallest ``mu`` and whether ``safety`` times it dominates the grid.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    grid = fld.grid
    mus = check_mu_grid(grid, mus)
    sampling = default_sampling(grid) if sampling is None else sampling
    pot = riesz_potential(fld, 1.0, dc_policy)

    def one(mu):
        lhs = modulus_of_continuity(pot, 1.0 / mu, p, sampling)
        rhs = lp_norm(truncated_maximal(fld, 1.0, 1.0 / mu), p)
        return lhs, rhs

    lhs, rhs = map(np.array, zip(*sweep(one, mus, workers)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, 0.0)
    meta = {"p": p, "riesz_dc": "zero mode dropped"}
    if rhs[0] > 0:
        C, holds, worst = fitted_envelope(lhs, rhs, 0, safety)
        meta.update(constant=C, holds=holds, worst=worst)
    else:
        meta.update(constant=0.0, holds=bool(np.all(lhs == 0)), worst=0.0)
    return CurveResult(mus, {"lhs": lhs, "rhs": rhs, "ratio": ratio}, meta=meta)


# ---------------------------------------------------------------------------
# pointwise behaviour away from the support


def nearest_index(grid: GridSpec, x0):
    x0 = np.broadcast_to(np.asarray(x0, dtype=float), (grid.dim,))
    idx = np.rint((x0 + 0.5 * grid.length) / grid.spacing).astype(int) % grid.n
    return tuple(int(i) for i in idx)


def vanishing_radius(fld: SampledField, x0) -> float:
    """Largest ``delta`` with ``f = 0`` at every grid point of ``|x - x0| < delta``."""
    rel = _offsets(fld.grid, x0)
    r = np.sqrt(sum(x * x for x in rel))
    nz = r[fld.values != 0]
    return float(nz.min()) if nz.size else math.inf


def localization_slope(fld: SampledField, alpha: float, x0, mus, delta: float | None = None, workers=None) -> CurveResult:
    """``|E_{alpha,mu} f(x0)|`` over ``mus`` with its fitted slope.

    ``delta`` defaults to the measured vanishing radius; every ``mu`` must
    satisfy ``mu * delta > 1``. An all-zero series is reported with
    ``fits['value'] = None``.
    """
    grid = fld.grid
    mus = check_mu_grid(grid, mus)
    measured = vanishing_radius(fld, x0)
    delta = measured if delta is None else delta
    if not delta > 0:
        raise ValueError("delta must be positive")
    if delta > measured + 1e-12:
        raise ValueError(f"field does not vanish on |x - x0| < {delta}")
    if math.isfinite(delta) and mus.min() * delta <= 1:
        raise ValueError("need mu * delta > 1 across the grid")
    idx = nearest_index(grid, x0)
    vals = np.array(sweep(lambda mu: abs(apply_symbol(fld, SymbolSpec("quotient", alpha, mu)).values[idx]), mus, workers))
    curve = CurveResult(mus, {"value": vals}, meta={"alpha": alpha, "delta": delta})
    curve.fits["value"] = rate_fit(curve, "value") if np.all(vals > 0) else None
    return curve


def localization_delta_sweep(grid: GridSpec, alpha: float, deltas, mus, width: float = 2.0) -> np.ndarray:
    """``max_mu mu^(alpha/2) |E f(0)|`` for smooth annular bumps on ``[delta, delta + width]``."""
    out = []
    for delta in deltas:
        fld = build_field(TestFunctionSpec("annular", inner=delta, outer=delta + width), grid)
        curve = localization_slope(fld, alpha, 0.0, mus)
        out.append(float(np.max(curve.mu ** (0.5 * alpha) * curve["value"])))
    return np.array(out)


def uniform_maximal_check(fld: SampledField, alpha: float, sigma: float, delta: float, mus, x0=0.0) -> float:
    """``sup_{|x - x0| <= sigma, mu} |E_{alpha,mu} f(x)| / ||f||_inf`` for ``f`` vanishing on ``|x - x0| < delta``."""
    if not sigma < delta:
        raise ValueError("sigma must be smaller than delta")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    grid = fld.grid
    if vanishing_radius(fld, x0) < delta - 1e-12:
        raise ValueError(f"field does not vanish on |x - x0| < {delta}")
    norm = sup_norm(fld)
    if norm == 0:
        return 0.0
    rel = _offsets(grid, x0)
    near = np.sqrt(sum(x * x for x in rel)) <= sigma + 1e-12
    best = 0.0
    for mu in check_mu_grid(grid, mus):
        e = apply_symbol(fld, SymbolSpec("quotient", alpha, mu)).values
        best = max(best, float(np.abs(e[near]).max()))
    return best / norm


# ---------------------------------------------------------------------------
# logarithmic rate from a spectral profile (d = 1, no grid)


def log_weighted_norm(profile, probe=(1e3, 1e12)) -> float:
    """``|| sqrt(ln(1 + xi^2)) fhat ||_2`` for an even profile on the line.

    Divergence is detected before integrating: in ``u = ln xi`` the
    integrand must decay at least like ``u^-1.1`` over ``probe``.
    """
    def integrand_u(u):
        xi = np.exp(u)
        return np.log1p(xi * xi) * np.abs(profile(xi)) ** 2 * xi

    u = np.linspace(math.log(probe[0]), math.log(probe[1]), 24)
    g = integrand_u(u)
    if np.any(g > 0):
        pos = g > 0
        slope = np.polyfit(np.log(u[pos]), np.log(g[pos]), 1)[0]
        if slope > -1.1:
            raise ValueError(f"log-weighted norm diverges (integrand ~ u^{slope:.2f} in u = ln xi)")
    total = _half_line_integral(lambda xi: np.log1p(xi * xi) * np.abs(profile(xi)) ** 2)
    return math.sqrt(total / math.pi)


_U_MAX = 300.0  # xi = e^300 keeps xi^2 finite in double precision


def _half_line_integral(func, breaks=(1.0,)):
    """``int_0^inf func(xi) dxi`` in the variable ``u = ln xi``.

    The range is cut at ``u = 300``; beyond it the integrand is extended as
    the power of ``u`` fitted on ``[150, 300]``, which is how slowly decaying
    log-type profiles behave.
    """
    g = lambda u: float(func(np.exp(u)) * np.exp(u))  # noqa: E731
    pts = [-math.inf, *sorted(math.log(b) for b in breaks), _U_MAX]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(g, a, b, limit=400, epsabs=1e-15, epsrel=1e-11)
        total += val
    u = np.linspace(0.5 * _U_MAX, _U_MAX, 8)
    tail_vals = np.array([g(v) for v in u])
    if np.all(tail_vals > 0):
        slope = np.polyfit(np.log(u), np.log(tail_vals), 1)[0]
        if slope >= -1:
            raise ValueError("integrand decays too slowly in ln(xi) for a finite integral")
        total += tail_vals[-1] * _U_MAX / (-slope - 1.0)
    return total


def spectral_error(profile, mu: float) -> float:
    """``||E_{1,mu} f||_2`` for an even profile ``fhat`` on the line, by quadrature."""
    m_sq = lambda xi: xi * xi / (mu * mu + xi * xi)  # noqa: E731
    val = _half_line_integral(lambda xi: m_sq(xi) * np.abs(profile(xi)) ** 2, breaks=(1.0, mu))
    return math.sqrt(val / math.pi)


def ksp_log_rate(profile, mus) -> CurveResult:
    """``err(mu) * sqrt(ln mu)`` for a spectral profile with finite log-weighted norm."""
    mus = np.asarray(mus, dtype=float)
    if np.any(mus <= 1):
        raise ValueError("mu must exceed 1")
    weighted = log_weighted_norm(profile)
    err = np.array([spectral_error(profile, mu) for mu in mus])
    return CurveResult(mus, {"err": err, "scaled": err * np.sqrt(np.log(mus))}, meta={"weighted_norm": weighted})


def log_profile(log_power: float = 1.5):
    """``|xi|^-1/2 (1 + ln(1 + xi^2))^-log_power`` on ``|xi| >= 1``."""
    def fhat(xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        with np.errstate(divide="ignore"):
            val = xi**-0.5 * (1.0 + np.log1p(xi * xi)) ** -log_power
        return np.where(xi >= 1.0, val, 0.0)

    return fhat
