"""Real-space side of the quotient operator.

The complement symbol ``1 - m_{a,mu}(xi) = sum_j a_j (1 + |xi/mu|^2)^-j`` is the
transform of the positive kernel ``A = mu^-d sum_j a_j G_{2j}(mu z)``. This
module truncates that series with a certified tail, applies it, extracts
kernels of arbitrary radial symbols on a grid and measures their decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import GridSpec, SampledField, forward_coefficients, inverse_values
from .special import (
    SPHERE_AREA,
    binom_coeffs,
    g_at_origin,
    series_tail,
)
from .symbols import BoundReport, SymbolSpec, evaluate

# Largest truncation evaluated term by term in real space (coefficient table
# of 8 bytes per term). Spectral evaluation has no such limit.
REAL_SPACE_TERM_CAP = 1 << 24
# Per-frequency term budget for the truncated symbol.
SPECTRAL_TERM_CAP = 200_000_000
_SLACK = 1e-9


@dataclass(frozen=True)
class SeriesKernelSpec:
    """Truncation of the binomial series at ``J`` terms with certified tail mass."""

    alpha: float
    J: int
    tail_mass: float
    exact_tail: float
    mu: float | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def bind(self, mu: float) -> "SeriesKernelSpec":
        if not mu > 0:
            raise ValueError(f"mu must be positive, got {mu!r}")
        return SeriesKernelSpec(self.alpha, self.J, self.tail_mass, self.exact_tail, float(mu), self._cache)

    def coefficients(self, count: int | None = None) -> np.ndarray:
        """``a_{alpha,1..count}`` (default ``J``), computed once and cached."""
        count = self.J if count is None else min(int(count), self.J)
        if count > REAL_SPACE_TERM_CAP:
            raise ValueError(
                f"{count} coefficients exceed the real-space cap {REAL_SPACE_TERM_CAP}; "
                "use a larger tail tolerance"
            )
        have = self._cache.get("coeffs")
        if have is None or have.size < count:
            have = binom_coeffs(self.alpha, max(count, 1))
            self._cache["coeffs"] = have
        return have[:count]


def series_truncation(alpha: float, tail_tol: float) -> SeriesKernelSpec:
    """Smallest ``J`` whose certified tail is at most ``tail_tol``.

    The tail ``1 - sum_{j<=J} a_j`` has a closed form, so the certificate is
    that value inflated by a relative slack of 1e-9 to cover rounding.
    Doubling brackets ``J``, bisection pins it down.
    """
    if not (0 < tail_tol < 1):
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}")

    def certified(J):
        return series_tail(alpha, J) * (1.0 + _SLACK)

    hi = 1
    while certified(hi) > tail_tol:
        hi *= 2
        if hi > 1 << 62:
            raise ValueError("tail tolerance unreachable")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if certified(mid) <= tail_tol:
            hi = mid
        else:
            lo = mid
    return SeriesKernelSpec(alpha=float(alpha), J=int(hi), tail_mass=certified(hi), exact_tail=series_tail(alpha, hi))


def _bound_mu(spec, mu):
    mu = spec.mu if mu is None else mu
    if mu is None or not mu > 0:
        raise ValueError("a positive mu must be supplied or bound to the spec")
    return float(mu)


def truncated_series_symbol(spec: SeriesKernelSpec, mu: float, xi_abs) -> np.ndarray:
    """``sum_{j<=J} a_j (1 + |xi/mu|^2)^-j`` at the given frequency magnitudes.

    Each frequency stops once ``x^j`` drops below 1e-17; at ``xi = 0`` the
    closed-form partial sum ``1 - tail`` is used.
    """
    r = np.asarray(xi_abs, dtype=float)
    flat = r.ravel()
    q2 = (flat / mu) ** 2
    x = 1.0 / (1.0 + q2)
    out = np.empty_like(flat)
    dc = q2 == 0
    out[dc] = 1.0 - spec.exact_tail
    rest = ~dc
    if rest.any():
        # -log(x) = log1p(q^2) keeps precision for tiny q
        needed = np.ceil(39.2 / np.log1p(q2[rest]))
        needed = np.minimum(needed, spec.J)
        if needed.max() > SPECTRAL_TERM_CAP:
            raise ValueError("frequency too close to zero for the truncated symbol; enlarge mu or the torus")
        out[rest] = _kernels.binom_series(spec.alpha, x[rest], needed.astype(np.int64))
    return out.reshape(r.shape)


def convolve_series(fld: SampledField, spec: SeriesKernelSpec, mu: float | None = None) -> SampledField:
    """``T f = A * f`` for the truncated kernel, applied through its exact transform."""
    mu = _bound_mu(spec, mu)
    grid = fld.grid
    mult = truncated_series_symbol(spec, mu, grid.freq_radius())
    coeffs = forward_coefficients(fld) * mult
    return SampledField(grid, inverse_values(grid, coeffs, fld.is_real))


@dataclass(frozen=True)
class KernelValue:
    value: float
    tail_bound: float


def series_kernel_value(spec: SeriesKernelSpec, mu: float, z_radius, d: int):
    """Truncated ``A_{alpha,mu}`` at ``|z| = z_radius``.

    Returns arrays (or scalars) of values plus a bound on the omitted tail,
    ``tail_mass * mu^d * G_{2(J+1)}(0)``, which dominates every ``G_{2j}(mu z)``
    with ``j > J`` because those kernels are radially decreasing and their
    peaks decrease in ``j``.
    """
    z = np.asarray(z_radius, dtype=float)
    if np.any(z <= 0):
        raise ValueError("series kernel is evaluated only at z_radius > 0")
    if d not in (1, 2, 3):
        raise ValueError(f"d must be 1, 2 or 3, got {d!r}")
    coeffs = spec.coefficients()
    flat = np.atleast_1d(z).ravel() * mu
    vals = mu**d * _kernels.series_kernel_sum(coeffs, float(d), flat, spec.J)
    tail = spec.tail_mass * mu**d * g_at_origin(spec.J + 1, d)
    if z.ndim == 0:
        return KernelValue(float(vals[0]), tail)
    return KernelValue(vals.reshape(z.shape), tail)


def gauss_legendre_radial(func, d: int, r_min: float, r_max: float, panels_per_decade: int = 8, order: int = 24, s: float = 0.0):
    """``|S^{d-1}| int_{r_min}^{r_max} F(r) r^(s+d-1) dr`` on log-spaced Gauss panels.

    ``func`` is called once with the full node array, so vectorized
    profiles (such as the series kernel) are evaluated in a single batch.
    """
    decades = math.log10(r_max / r_min)
    edges = np.geomspace(r_min, r_max, max(1, int(math.ceil(decades * panels_per_decade))) + 1)
    t, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * t[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    vals = np.asarray(func(nodes.ravel())).reshape(nodes.shape)
    return SPHERE_AREA[d] * float(np.sum(weights * vals * nodes ** (s + d - 1)))


def series_kernel_mass(spec: SeriesKernelSpec, mu: float, d: int, r_min_scaled: float = 1e-8, reach: float = 40.0) -> float:
    """Radial quadrature of the truncated kernel over ``mu |z| <= reach * sqrt(J)``."""
    r_max = reach * math.sqrt(spec.J) + 50.0
    return gauss_legendre_radial(
        lambda z: series_kernel_value(spec, mu, z, d).value,
        d,
        r_min_scaled / mu,
        r_max / mu,
    )


def series_moment_partial_sums(alpha: float, s: float, d: int, checkpoints) -> np.ndarray:
    """Partial sums in ``J`` of ``int A_alpha(y) |y|^s dy = sum_j a_j int G_{2j} |y|^s``."""
    cps = np.asarray(checkpoints, dtype=np.int64)
    if np.any(np.diff(cps) <= 0) or cps[0] < 1:
        raise ValueError("checkpoints must be positive and strictly increasing")
    b = 0.5 * s
    pref = 2.0**s * math.exp(math.lgamma(0.5 * (d + s)) - math.lgamma(0.5 * d))
    return pref * _kernels.moment_partial_sums(alpha, b, cps)


def series_moment_limit(alpha: float, s: float, d: int) -> float:
    """Closed-form ``int A_alpha |y|^s dy``, finite for ``s < alpha``."""
    a, b = 0.5 * alpha, 0.5 * s
    if b >= a:
        return math.inf
    pref = 2.0**s * math.exp(math.lgamma(0.5 * (d + s)) - math.lgamma(0.5 * d))
    return pref * math.gamma(1 + b) * math.gamma(a - b) / (math.gamma(a) * math.gamma(1 - b))


# ---------------------------------------------------------------------------
# kernels of radial symbols on a grid


def lp_bump(t):
    """Smooth step: 1 for ``t <= 1``, 0 for ``t >= 2``, built from ``exp(-1/t)``."""
    t = np.asarray(t, dtype=float)

    def e(u):
        return np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)

    u = 2.0 - t
    v = t - 1.0
    return e(u) / (e(u) + e(v))


def lp_piece(xi_abs, j: int):
    """``phi(2^-j xi)`` with ``phi(s) = bump(s) - bump(2 s)``, supported in ``[2^(j-1), 2^(j+1)]``."""
    s = np.asarray(xi_abs, dtype=float) * 2.0 ** (-j)
    return lp_bump(s) - lp_bump(2.0 * s)


def _radial_bins(grid: GridSpec):
    # exact lattice radii: group by the integer sum of squared index offsets
    k = np.rint(grid.axis / grid.spacing).astype(np.int64)
    sq = k * k
    total = sq
    for _ in range(grid.dim - 1):
        total = np.add.outer(total, sq)
    keys = total.ravel()
    uniq, inverse = np.unique(keys, return_inverse=True)
    return np.sqrt(uniq) * grid.spacing, inverse


@dataclass
class KernelProfile:
    symbol: SymbolSpec
    grid: GridSpec
    values: np.ndarray
    radii: np.ndarray
    radial_values: np.ndarray
    bin_spread: np.ndarray
    dyadic_pieces: dict = field(default_factory=dict)
    dc_value: float = 0.0

    @property
    def radial_samples(self):
        return np.column_stack([self.radii, self.radial_values])

    def to_rows(self):
        return np.column_stack([self.radii, self.radial_values, self.bin_spread])


def _bin_stats(values, inverse, nbins):
    flat = values.ravel()
    count = np.bincount(inverse, minlength=nbins)
    mean = np.bincount(inverse, weights=flat, minlength=nbins) / count
    hi = np.full(nbins, -np.inf)
    lo = np.full(nbins, np.inf)
    np.maximum.at(hi, inverse, flat)
    np.minimum.at(lo, inverse, flat)
    return mean, hi - lo


def kernel_values(symbol: SymbolSpec, grid: GridSpec, mult=None) -> np.ndarray:
    """Values of ``(2 pi)^-d int e^{ix.xi} b(xi) dxi`` at the grid points (periodized)."""
    if not symbol.bounded:
        raise ValueError("kernel extraction needs a bounded symbol")
    if mult is None:
        mult = evaluate(symbol, grid.freq_radius())
    return inverse_values(grid, mult.astype(complex), real=True)


def extract_kernel(symbol: SymbolSpec, grid: GridSpec, dyadic=None) -> KernelProfile:
    """Kernel of ``symbol`` on ``grid``, binned by exact lattice radius.

    ``dyadic`` may be ``True`` (all pieces covering the lattice) or an
    iterable of band indices ``j``; piece ``j`` is the kernel of
    ``phi(2^-j xi) b(xi)``.
    """
    if not symbol.bounded:
        raise ValueError("kernel extraction needs a bounded symbol")
    xi = grid.freq_radius()
    mult = evaluate(symbol, xi)
    vals = kernel_values(symbol, grid, mult)
    radii, inverse = _radial_bins(grid)
    mean, spread = _bin_stats(vals, inverse, radii.size)
    pieces = {}
    if dyadic is not None and dyadic is not False:
        js = dyadic_band_range(grid) if dyadic is True else list(dyadic)
        for j in js:
            pieces[int(j)] = inverse_values(grid, (lp_piece(xi, j) * mult).astype(complex), real=True)
    dc = float(mult.ravel()[0]) / grid.length**grid.dim
    return KernelProfile(symbol, grid, vals, radii, mean, spread, pieces, dc)


def dyadic_band_range(grid: GridSpec) -> list[int]:
    """Band indices whose pieces sum to 1 on every nonzero lattice frequency."""
    lo = math.floor(math.log2(grid.xi_step))
    hi = math.ceil(math.log2(grid.nyquist * math.sqrt(grid.dim))) + 1
    return list(range(lo, hi + 1))


def reconstruct(profile: KernelProfile) -> np.ndarray:
    return sum(profile.dyadic_pieces.values()) + profile.dc_value


def _weight(alpha, mu, r):
    s = mu * r
    return np.where(s > 1.0, (2.0 * s) ** (0.5 * alpha), (1.0 + s * s) ** (0.5 * alpha))


def _fit_slope(x, y):
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(intercept), resid


def decay_check(profile: KernelProfile, alpha: float, mu: float, scaled_range=(0.05, 100.0), far_range=(2.0, 100.0)) -> BoundReport:
    """Compensated quantity ``Q = |B(x)| |x|^d w(x)`` over the resolved radii.

    ``w = (2 mu |x|)^(alpha/2)`` when ``mu |x| > 1`` and ``(1 + mu^2 |x|^2)^(alpha/2)``
    otherwise. Radii below ``2h`` or beyond ``L/4`` are treated as unresolved.
    ``extra`` carries the sup, per-decade maxima and the far-field slope of
    ``|B|`` against ``|x|``.
    """
    grid = profile.grid
    r = profile.radii
    lo, hi = scaled_range
    r_lo = max(lo / mu, 2.0 * grid.spacing)
    r_hi = min(hi / mu, 0.25 * grid.length)
    if math.log10(r_hi * mu) - math.log10(r_lo * mu) < 3.0 - 1e-9 or not (r_lo * mu <= 1.0 < r_hi * mu):
        raise ValueError(
            f"profile resolves mu|x| in [{r_lo * mu:.3g}, {r_hi * mu:.3g}]; need 3 decades spanning mu|x| = 1"
        )
    sel = (r >= r_lo) & (r <= r_hi)
    rs, bs = r[sel], np.abs(profile.radial_values[sel])
    q = bs * rs**grid.dim * _weight(alpha, mu, rs)
    decade = np.floor(np.log10(rs * mu)).astype(int)
    per_decade = {int(k): float(q[decade == k].max()) for k in np.unique(decade)}
    far = (rs * mu >= far_range[0]) & (rs * mu <= far_range[1])
    slope = _fit_slope(rs[far], bs[far]) if far.sum() >= 4 else (math.nan, math.nan, math.nan)
    extra = {
        "sup": float(q.max()),
        "per_decade": per_decade,
        "far_slope": slope[0],
        "far_fit": slope,
        "near_sup": float(q[rs * mu <= 1.0].max()),
    }
    return BoundReport(samples=rs * mu, ratios=q, extra=extra)


def decay_sweep(kind: str, alpha: float, mus, grid: GridSpec, **kw) -> dict:
    """Run :func:`decay_check` for each ``mu`` on one grid; report the drift of sup Q."""
    reports = {float(mu): decay_check(extract_kernel(SymbolSpec(kind, alpha, mu), grid), alpha, mu, **kw) for mu in mus}
    sups = [rep.extra["sup"] for rep in reports.values()]
    return {"reports": reports, "sups": sups, "drift": max(sups) / min(sups)}


def hormander_bound(mu: float, y) -> np.ndarray:
    s = mu * np.abs(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore"):
        return np.where(s > 1.0, (2.0 * s) ** -0.5, (1.0 + s * s) ** -0.5)


def hormander_check(symbol: SymbolSpec, y_list, grid: GridSpec, values=None) -> BoundReport:
    """``H(y) = int_{2|y| <= |x| <= L/4} |B(x+y) - B(x)| dx`` against the reference bound.

    Offsets must be whole multiples of ``h`` along the first axis with
    ``|y| >= 2h`` (or exactly 0, giving 0). The mass of ``|B|`` beyond the
    cut, doubled, is extrapolated from a power fit of the outer radii and
    reported as ``tail_estimate``.
    """
    if grid.dim != 1:
        raise ValueError("hormander_check is implemented for d = 1")
    h, mu = grid.spacing, symbol.mu
    B = kernel_values(symbol, grid) if values is None else values
    x = grid.axis
    cut = 0.25 * grid.length
    ys = np.asarray(y_list, dtype=float)
    H = np.zeros(ys.size)
    for i, y in enumerate(ys):
        if y == 0:
            continue
        steps = y / h
        if abs(y) < 2 * h - 1e-15 or abs(steps - round(steps)) > 1e-9:
            raise ValueError(f"offset {y!r} is not a resolvable multiple of h = {h!r} with |y| >= 2h")
        shifted = np.roll(B, -int(round(steps)))
        region = (np.abs(x) >= 2 * abs(y)) & (np.abs(x) <= cut)
        H[i] = h * np.abs(shifted - B)[region].sum()
    outer = (np.abs(x) >= cut / 8) & (np.abs(x) <= cut) & (B != 0)
    slope, intercept, _ = _fit_slope(np.abs(x[outer]), np.abs(B[outer]))
    tail = 2.0 * 2.0 * math.exp(intercept) * cut ** (slope + 1) / (-(slope + 1)) if slope < -1 else math.inf
    bound = hormander_bound(mu, ys)
    ratios = np.where(ys == 0, 0.0, H / bound)
    nz = ratios[ys != 0]
    extra = {"integrals": H, "bound": bound, "tail_estimate": tail, "spread": float(nz.max() / nz.min()) if nz.size else math.nan}
    return BoundReport(samples=mu * np.abs(ys), ratios=ratios, extra=extra)
