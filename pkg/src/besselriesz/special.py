"""Special functions behind the series kernel.

Binomial coefficients ``a_{alpha,j}`` of ``(1 - t)^{alpha/2} = 1 - sum_j a_j t^j``,
the modified Bessel function ``K_nu``, the Bessel kernels ``G_{2j}`` (inverse
transforms of ``(1 + |xi|^2)^{-j}``) and their radial moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _kernels

SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


def _check_alpha(alpha):
    if not (0 < alpha <= 1):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")


def binom_coeff(alpha: float, j: int) -> float:
    """``a_{alpha,j} = |binom(alpha/2, j)|`` by the product recurrence."""
    _check_alpha(alpha)
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j!r}")
    return float(binom_coeffs(alpha, int(j))[-1])


def binom_coeffs(alpha: float, count: int) -> np.ndarray:
    """``a_{alpha,1..count}``; ``a_1 = alpha/2``, ``a_{j+1} = a_j (j - alpha/2)/(j + 1)``."""
    _check_alpha(alpha)
    half = 0.5 * alpha
    j = np.arange(1, count, dtype=float)
    ratios = (j - half) / (j + 1.0)
    return half * np.concatenate(([1.0], np.cumprod(ratios)))


def log_gamma_ratio(z: float, c: float) -> float:
    """``ln(Gamma(z + c) / Gamma(z))`` without the cancellation of two large lgammas."""
    if z <= 0 or z + c <= 0:
        raise ValueError("log_gamma_ratio needs z > 0 and z + c > 0")
    if z < 20:
        return math.lgamma(z + c) - math.lgamma(z)
    # Stirling series difference
    w = z + c
    out = (z - 0.5) * math.log1p(c / z) + c * math.log(w) - c
    bern = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0)
    for k, b in enumerate(bern):
        e = 2 * k + 1
        out += b * (w**-e - z**-e)
    return out


def binom_coeff_gamma(alpha: float, j: int) -> float:
    """Same coefficient through Gamma functions, used to cross-check the recurrence."""
    _check_alpha(alpha)
    half = 0.5 * alpha
    return half / math.gamma(1.0 - half) * math.exp(log_gamma_ratio(j + 1.0, -1.0 - half))


def series_tail(alpha: float, J: int) -> float:
    """Exact ``1 - sum_{j<=J} a_{alpha,j}``.

    The partial sums of the binomial series at t = 1 telescope to
    ``Gamma(J + 1 - alpha/2) / (Gamma(1 - alpha/2) Gamma(J + 1))``.
    """
    _check_alpha(alpha)
    if J < 0:
        raise ValueError("J must be nonnegative")
    half = 0.5 * alpha
    if J == 0:
        return 1.0
    return math.exp(log_gamma_ratio(J + 1.0, -half) - math.lgamma(1.0 - half))


def bessel_k(nu: float, t):
    """Modified Bessel function of the second kind ``K_nu(t)`` for real order, ``t > 0``.

    Half-integer orders up to 21/2 use the terminating closed form; other
    orders use Temme's series below t = 2 and Steed's continued fraction
    above it, then recur upward in the order.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0) or np.any(~np.isfinite(arr)):
        raise ValueError("bessel_k needs finite t > 0")
    nu = abs(float(nu))
    half = nu - 0.5
    if half >= 0 and half == int(half) and half <= 10:
        out = _bessel_k_half(int(half), arr)
    elif arr.ndim == 0:
        out = np.float64(_kernels.bessel_k_scalar(nu, float(arr)))
    else:
        out = _kernels.bessel_k_array(nu, arr.ravel()).reshape(arr.shape)
    return float(out) if np.ndim(out) == 0 else out


def _bessel_k_half(n, t):
    # K_{n+1/2}(t) = sqrt(pi/(2t)) e^{-t} sum_k (n+k)! / (k! (n-k)! (2t)^k)
    coeffs = [math.factorial(n + k) / (math.factorial(k) * math.factorial(n - k)) for k in range(n + 1)]
    acc = np.full_like(t, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc / (2.0 * t) + c
    return np.sqrt(math.pi / (2.0 * t)) * np.exp(-t) * acc


@dataclass(frozen=True)
class BesselKernelParams:
    j: int
    d: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError(f"j must be >= 1, got {self.j!r}")
        if self.d not in (1, 2, 3):
            raise ValueError(f"d must be 1, 2 or 3, got {self.d!r}")

    @property
    def nu(self) -> float:
        return 0.5 * (self.d - 2 * self.j)


def bessel_kernel_g(params: BesselKernelParams, r):
    """``G_{2j}(r)``, the Bessel kernel of order 2j in dimension d, at radius ``r > 0``."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("bessel_kernel_g is evaluated only at r > 0")
    j, d = params.j, params.d
    if abs(params.nu) <= 10:
        log_pref = -((d + 2 * j - 2) / 2.0) * math.log(2.0) - 0.5 * d * math.log(math.pi) - math.lgamma(j)
        out = math.exp(log_pref) * bessel_k(params.nu, arr) * arr ** ((2 * j - d) / 2.0)
    else:
        coeffs = np.zeros(j)
        coeffs[-1] = 1.0
        flat = np.atleast_1d(arr).ravel()
        out = _kernels.series_kernel_sum(coeffs, float(d), flat, j).reshape(arr.shape)
    return float(out) if np.ndim(out) == 0 else out


def g_sequence(d: int, J: int, r) -> np.ndarray:
    """``G_{2j}(r)`` for j = 1..J as a (J, len(r)) array, via the order recurrence."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty((J, r.size))
    out[0] = bessel_kernel_g(BesselKernelParams(1, d), r)
    if J > 1:
        out[1] = bessel_kernel_g(BesselKernelParams(2, d), r)
    for j in range(2, J):
        out[j] = r * r / (4.0 * j * (j - 1)) * out[j - 2] + (1.0 - 0.5 * d / j) * out[j - 1]
    return out


def g_at_origin(j: int, d: int) -> float:
    """``G_{2j}(0)``, finite only when 2j > d."""
    if 2 * j <= d:
        return math.inf
    return math.exp(log_gamma_ratio(j, -0.5 * d) - 0.5 * d * math.log(4.0 * math.pi))


def g_moment(j: int, s: float, d: int) -> float:
    """``int G_{2j}(y) |y|^s dy = 2^s Gamma((d+s)/2)/Gamma(d/2) * Gamma(j+s/2)/Gamma(j)``."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s!r}")
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j!r}")
    return _moment_prefactor(s, d) * math.exp(log_gamma_ratio(j, 0.5 * s))


def _moment_prefactor(s, d):
    return 2.0**s * math.exp(math.lgamma(0.5 * (d + s)) - math.lgamma(0.5 * d))


def k_moment_closed_form(beta: float, nu: float) -> float:
    """``2^(beta-2) Gamma((beta+nu)/2) Gamma((beta-nu)/2)``, valid for |nu| < beta."""
    if abs(nu) >= beta:
        raise ValueError("closed form needs |nu| < beta")
    return 2.0 ** (beta - 2.0) * math.gamma(0.5 * (beta + nu)) * math.gamma(0.5 * (beta - nu))


def k_moment_quadrature(beta: float, nu: float) -> float:
    """``int_0^inf t^(beta-1) K_nu(t) dt`` by adaptive quadrature of :func:`bessel_k`."""
    f = lambda t: t ** (beta - 1.0) * bessel_k(nu, t)  # noqa: E731
    total = 0.0
    for a, b in ((0.0, 1.0), (1.0, 10.0), (10.0, 60.0), (60.0, 800.0)):
        val, _ = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=400)
        total += val
    return total


def radial_quadrature(func, d: int, s: float = 0.0, breaks=(1.0, 10.0, 50.0), upper=math.inf) -> float:
    """``int_{R^d} F(|y|) |y|^s dy`` for a radial profile ``F`` by adaptive quadrature."""
    pts = [0.0, *[b for b in breaks if b < upper], upper]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(lambda r: func(r) * r ** (s + d - 1), a, b, epsabs=1e-15, epsrel=1e-12, limit=500)
        total += val
    return SPHERE_AREA[d] * total
