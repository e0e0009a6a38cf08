"""Inner loops, each in a numba and a pure-numpy flavour.

Public modules call the un-suffixed names at the bottom of this file, which
point at one backend or the other depending on ``_accel.USE_NUMBA``. The
``*_numba`` / ``*_numpy`` pairs stay importable so tests and the benchmark
can compare them directly.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

EULER_GAMMA = 0.5772156649015329
_EPS = 1e-16
_MAXIT = 100000


# ---------------------------------------------------------------------------
# K_nu: Temme series for x < 2, Steed's continued fraction for x >= 2,
# upward recurrence from |mu| <= 1/2.

def _bessel_k_py(nu, x):
    return _bessel_k_core(nu, x, False)


def _bessel_k_core(nu, x, scaled):
    # scaled=True returns e^x K_nu(x)
    nu = abs(nu)
    nl = int(nu + 0.5)
    mu = nu - nl
    mu2 = mu * mu
    xi2 = 2.0 / x
    if x < 2.0:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = mu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gampl = 1.0 / math.gamma(1.0 + mu)
        gammi = 1.0 / math.gamma(1.0 - mu)
        if abs(mu) < 1e-3:
            # odd part of the Taylor series of 1/Gamma(1+x)
            gam1 = -(EULER_GAMMA + mu2 * (-0.0420026350340952 + mu2 * -0.0421977345555443))
        else:
            gam1 = (gammi - gampl) / (2.0 * mu)
        gam2 = 0.5 * (gammi + gampl)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        dd = x2 * x2
        total1 = p
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= dd / i
            p /= i - mu
            q /= i + mu
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if abs(delta) < abs(total) * _EPS:
                break
        kmu = total
        k1 = total1 * xi2
        if scaled:
            kmu *= math.exp(x)
            k1 *= math.exp(x)
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = d
        delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - mu2
        q = a1
        c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, _MAXIT):
            a -= 2.0 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1 = q2
            q2 = qnew
            q += c * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = q * delh
            s += dels
            if abs(dels / s) < _EPS:
                break
        h = a1 * h
        kmu = math.sqrt(math.pi / (2.0 * x)) / s
        if not scaled:
            kmu *= math.exp(-x)
        k1 = kmu * (mu + x + 0.5 - h) / x
    for i in range(1, nl + 1):
        knext = (mu + i) * xi2 * k1 + kmu
        kmu = k1
        k1 = knext
    return kmu


_bessel_k_core_nb = njit(_bessel_k_core)


@njit
def _bessel_k_nb(nu, x):
    return _bessel_k_core_nb(nu, x, False)


@njit
def _bessel_k_array_numba(nu, t):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _bessel_k_nb(nu, t[i])
    return out


def _bessel_k_array_numpy(nu, t):
    return np.array([_bessel_k_py(nu, float(v)) for v in t], dtype=float)


# ---------------------------------------------------------------------------
# Bessel kernels G_{2j}(r), j = 1, 2, ... by the order recurrence
#   G_{2(j+1)} = r^2 / (4 j (j-1)) G_{2(j-1)} + (1 - d / (2j)) G_{2j},
# which is K_{m+1} = K_{m-1} + (2m/r) K_m rewritten for the normalized
# kernels. K grows with the order, so the forward direction is stable.
# Seeds carry the factor e^r and the running sum is renormalized, so radii
# far past the underflow point of e^-r still work.

_BIG = 1e200


def _g_seed_scale(d, j):
    return 1.0 / (2.0 ** (0.5 * d + j - 1.0) * math.pi ** (0.5 * d) * math.gamma(j))


@njit
def _series_kernel_sum_numba(coeffs, d, r, nterms):
    out = np.empty(r.shape[0])
    s1 = 1.0 / (2.0 ** (0.5 * d) * math.pi ** (0.5 * d))
    s2 = 0.5 * s1
    m1 = 1.0 - 0.5 * d
    m2 = 2.0 - 0.5 * d
    for i in range(r.shape[0]):
        x = r[i]
        prev = s1 * _bessel_k_core_nb(m1, x, True) * x**m1
        cur = s2 * _bessel_k_core_nb(m2, x, True) * x**m2
        logscale = -x
        acc = coeffs[0] * prev
        if nterms >= 2:
            acc += coeffs[1] * cur
        r2 = x * x
        for j in range(2, nterms):
            nxt = r2 / (4.0 * j * (j - 1)) * prev + (1.0 - 0.5 * d / j) * cur
            acc += coeffs[j] * nxt
            prev = cur
            cur = nxt
            if cur > _BIG:
                prev /= _BIG
                cur /= _BIG
                acc /= _BIG
                logscale += math.log(_BIG)
        out[i] = acc * math.exp(logscale) if acc > 0 else 0.0
    return out


def _series_kernel_sum_numpy(coeffs, d, r, nterms):
    m1 = 1.0 - 0.5 * d
    m2 = 2.0 - 0.5 * d
    prev = _g_seed_scale(d, 1) * np.array([_bessel_k_core(m1, v, True) for v in r]) * r**m1
    cur = _g_seed_scale(d, 2) * np.array([_bessel_k_core(m2, v, True) for v in r]) * r**m2
    logscale = -r.copy()
    acc = coeffs[0] * prev
    if nterms >= 2:
        acc = acc + coeffs[1] * cur
    r2 = r * r
    for j in range(2, nterms):
        nxt = r2 / (4.0 * j * (j - 1)) * prev + (1.0 - 0.5 * d / j) * cur
        acc += coeffs[j] * nxt
        prev, cur = cur, nxt
        big = cur > _BIG
        if big.any():
            prev[big] /= _BIG
            cur[big] /= _BIG
            acc[big] /= _BIG
            logscale[big] += math.log(_BIG)
    return np.where(acc > 0, acc * np.exp(logscale), 0.0)


# ---------------------------------------------------------------------------
# sum_{j=1}^{n_i} a_{alpha,j} x_i^j with a per-point term count; the binomial
# coefficients are generated on the fly so no coefficient table is stored

@njit
def _binom_series_numba(alpha, x, nterms):
    half = 0.5 * alpha
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xi = x[i]
        a = half
        p = xi
        acc = 0.0
        for j in range(1, nterms[i] + 1):
            acc += a * p
            p *= xi
            if p < 1e-300:
                # the rest is below 1e-300; stop before subnormals slow the loop
                break
            a *= (j - half) / (j + 1.0)
        out[i] = acc
    return out


def _binom_series_numpy(alpha, x, nterms):
    half = 0.5 * alpha
    out = np.zeros(x.shape[0])
    active = np.flatnonzero(nterms > 0)
    if active.size == 0:
        return out
    # one pass over j in chunks; points drop out once their term count is reached
    acc = np.zeros(active.size)
    p = x[active].copy()
    need = nterms[active]
    a0 = half
    chunk = 2048
    start = 1
    jmax = int(need.max())
    while start <= jmax:
        live = need >= start
        if not live.all():
            out[active[~live]] = acc[~live]
            active, acc, p, need = active[live], acc[live], p[live], need[live]
        stop = min(start + chunk, jmax + 1)
        j = np.arange(start, stop, dtype=float)
        a = a0 * np.concatenate(([1.0], np.cumprod((j[:-1] - half) / (j[:-1] + 1.0))))
        xs = x[active]
        powers = p[:, None] * xs[:, None] ** np.arange(stop - start)
        mask = (start + np.arange(stop - start))[None, :] <= need[:, None]
        acc += (powers * mask) @ a
        p = powers[:, -1] * xs
        a0 = a[-1] * (j[-1] - half) / (j[-1] + 1.0)
        start = stop
    out[active] = acc
    return out


# ---------------------------------------------------------------------------
# truncated fractional maximal function, d = 1, trapezoid ball masses

@njit
def _maximal_1d_numba(absf, h, alpha, m_max):
    n = absf.shape[0]
    out = np.empty(n)
    w = np.empty(m_max + 1)
    for m in range(1, m_max + 1):
        w[m] = h * (m * h) ** (alpha - 1.0)
    for i in range(n):
        inner = absf[i]
        best = 0.0
        for m in range(1, m_max + 1):
            il = i - m
            if il < 0:
                il += n
            ir = i + m
            if ir >= n:
                ir -= n
            left = absf[il]
            right = absf[ir]
            val = w[m] * (inner + 0.5 * (left + right))
            if val > best:
                best = val
            inner += left + right
        out[i] = best
    return out


def _maximal_1d_numpy(absf, h, alpha, m_max):
    inner = absf.copy()
    best = np.zeros_like(absf)
    for m in range(1, m_max + 1):
        left = np.roll(absf, m)
        right = np.roll(absf, -m)
        val = (m * h) ** (alpha - 1.0) * h * (inner + 0.5 * (left + right))
        np.maximum(best, val, out=best)
        inner += left + right
    return best


# ---------------------------------------------------------------------------
# partial sums of sum_j a_{alpha,j} Gamma(j+b)/Gamma(j), recorded at checkpoints

@njit
def _moment_partial_sums_numba(alpha, b, checkpoints):
    half = 0.5 * alpha
    out = np.empty(checkpoints.shape[0])
    a = half
    g = math.gamma(1.0 + b)
    acc = 0.0
    comp = 0.0
    k = 0
    jmax = checkpoints[-1]
    for j in range(1, jmax + 1):
        term = a * g - comp
        t = acc + term
        comp = (t - acc) - term
        acc = t
        while k < checkpoints.shape[0] and checkpoints[k] == j:
            out[k] = acc
            k += 1
        a *= (j - half) / (j + 1.0)
        g *= (j + b) / j
    return out


def _moment_partial_sums_numpy(alpha, b, checkpoints):
    half = 0.5 * alpha
    out = np.empty(checkpoints.shape[0])
    jmax = int(checkpoints[-1])
    chunk = 1 << 20
    acc = 0.0
    a0 = half
    g0 = math.gamma(1.0 + b)
    k = 0
    for start in range(1, jmax + 1, chunk):
        stop = min(start + chunk, jmax + 1)
        j = np.arange(start, stop, dtype=float)
        a = a0 * np.concatenate(([1.0], np.cumprod((j[:-1] - half) / (j[:-1] + 1.0))))
        g = g0 * np.concatenate(([1.0], np.cumprod((j[:-1] + b) / j[:-1])))
        partial = acc + np.cumsum(a * g)
        while k < checkpoints.shape[0] and checkpoints[k] < stop:
            out[k] = partial[int(checkpoints[k]) - start]
            k += 1
        acc = partial[-1]
        a0 = a[-1] * (j[-1] - half) / (j[-1] + 1.0)
        g0 = g[-1] * (j[-1] + b) / j[-1]
    return out


# ---------------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    bessel_k_scalar = _bessel_k_nb
    bessel_k_array = _bessel_k_array_numba
    series_kernel_sum = _series_kernel_sum_numba
    binom_series = _binom_series_numba
    maximal_1d = _maximal_1d_numba
    moment_partial_sums = _moment_partial_sums_numba
else:
    bessel_k_scalar = _bessel_k_py
    bessel_k_array = _bessel_k_array_numpy
    series_kernel_sum = _series_kernel_sum_numpy
    binom_series = _binom_series_numpy
    maximal_1d = _maximal_1d_numpy
    moment_partial_sums = _moment_partial_sums_numpy
