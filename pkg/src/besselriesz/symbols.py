"""Radial Fourier multipliers and their action on sampled fields.

All symbols depend on ``|xi|`` only. The quotient ``m(xi) = |xi|^a / (mu^2 + |xi|^2)^(a/2)``
is evaluated as ``(q^2 / (1 + q^2))^(a/2)`` with ``q = |xi|/mu`` so that the
dilation identity ``m_{a,mu}(xi) = m_{a,1}(xi/mu)`` holds to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import SampledField, forward_coefficients, inverse_values

KINDS = ("quotient", "complement", "bessel_potential", "riesz_potential", "remainder")
DC_POLICIES = ("zero", "keep", "error")


@dataclass(frozen=True)
class SymbolSpec:
    kind: str
    alpha: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}; expected one of {KINDS}")
        upper = 2.0 if self.kind in ("bessel_potential", "riesz_potential") else 1.0
        if not (0 < self.alpha <= upper):
            raise ValueError(f"alpha={self.alpha!r} outside (0, {upper}] for {self.kind}")
        if self.kind == "remainder" and self.alpha != 1.0:
            raise ValueError("the remainder symbol is defined for alpha = 1 only")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be positive, got {self.mu!r}")

    @property
    def bounded(self) -> bool:
        return self.kind != "riesz_potential"


def quotient(alpha, mu):
    return SymbolSpec("quotient", alpha, mu)


def complement(alpha, mu):
    return SymbolSpec("complement", alpha, mu)


def evaluate(spec: SymbolSpec, xi_abs) -> np.ndarray:
    """Symbol values at an array of frequency magnitudes ``|xi|``.

    The Riesz symbol is returned as ``inf`` at ``xi = 0``; callers decide
    what to do with the zero mode.
    """
    r = np.asarray(xi_abs, dtype=float)
    a, mu = spec.alpha, spec.mu
    kind = spec.kind
    if kind in ("quotient", "complement"):
        q2 = (r / mu) ** 2
        if kind == "quotient":
            return (q2 / (1.0 + q2)) ** (0.5 * a)
        # 1 - exp((a/2) ln(q^2/(1+q^2))), accurate at both ends of the q range
        with np.errstate(divide="ignore"):
            return -np.expm1(0.5 * a * (np.log(q2) - np.log1p(q2)))
    if kind == "bessel_potential":
        return (mu * mu + r * r) ** (-0.5 * a)
    if kind == "riesz_potential":
        with np.errstate(divide="ignore"):
            return np.where(r > 0, r ** (-a), np.inf)
    # remainder
    return mu / (np.sqrt(mu * mu + r * r) + r)


def symbol_value(spec: SymbolSpec, xi) -> float:
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    r = float(np.linalg.norm(xi))
    if spec.kind == "riesz_potential" and r == 0:
        raise ValueError("the Riesz symbol is singular at xi = 0")
    return float(evaluate(spec, r))


def apply_multiplier(fld: SampledField, mult) -> SampledField:
    """Multiply the spectrum by ``mult`` (array on the lattice, or callable of |xi|)."""
    grid = fld.grid
    if callable(mult):
        mult = mult(grid.freq_radius())
    coeffs = forward_coefficients(fld) * mult
    return SampledField(grid, inverse_values(grid, coeffs, fld.is_real))


def lattice_symbol(spec: SymbolSpec, grid, dc_policy: str = "zero", coeffs=None) -> np.ndarray:
    if dc_policy not in DC_POLICIES:
        raise ValueError(f"dc_policy must be one of {DC_POLICIES}, got {dc_policy!r}")
    xi = grid.freq_radius()
    if spec.kind != "riesz_potential":
        return evaluate(spec, xi)
    with np.errstate(divide="ignore"):
        mult = np.where(xi > 0, xi, 1.0) ** (-spec.alpha)
    dc = (0,) * grid.dim
    if dc_policy == "zero":
        mult[dc] = 0.0
    elif dc_policy == "keep":
        mult[dc] = 1.0
    else:
        c0 = abs(coeffs[dc]) if coeffs is not None else 0.0
        scale = np.abs(coeffs).max() if coeffs is not None else 0.0
        if c0 > 1e-12 * max(scale, 1e-300) and c0 > 0:
            raise ValueError("Riesz potential of a field with nonzero mean (dc_policy='error')")
        mult[dc] = 0.0
    return mult


def apply_symbol(fld: SampledField, spec: SymbolSpec, dc_policy: str = "zero") -> SampledField:
    """``b(D) f`` for the radial symbol ``spec``.

    ``dc_policy`` only matters for the Riesz potential: ``zero`` drops the
    mean, ``keep`` passes it through unchanged, ``error`` refuses fields
    with a nonzero mean.
    """
    grid = fld.grid
    coeffs = forward_coefficients(fld)
    mult = lattice_symbol(spec, grid, dc_policy, coeffs)
    return SampledField(grid, inverse_values(grid, coeffs * mult, fld.is_real))


@dataclass
class BoundReport:
    """Per-sample compensated ratios plus their supremum and any side data."""

    samples: np.ndarray
    ratios: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        finite = self.ratios[np.isfinite(self.ratios)]
        return float(finite.max()) if finite.size else math.nan

    @property
    def min_ratio(self) -> float:
        finite = self.ratios[np.isfinite(self.ratios)]
        return float(finite.min()) if finite.size else math.nan

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio


def derivative_bound(spec: SymbolSpec, order: int, xi_abs) -> np.ndarray:
    """Reference bound for ``|d^beta b(xi)|`` with ``|beta| = order``.

    quotient / complement: ``|xi|^(a - k) (mu^2 + |xi|^2)^(-a/2)``;
    remainder: ``2 / |xi|`` for k = 1 and ``|xi|^-k`` beyond;
    Bessel potential: ``(mu^2 + |xi|^2)^(-(a + k)/2)``; Riesz: ``|xi|^(-a - k)``.
    """
    r = np.asarray(xi_abs, dtype=float)
    a, mu = spec.alpha, spec.mu
    if spec.kind in ("quotient", "complement"):
        return r ** (a - order) * (mu * mu + r * r) ** (-0.5 * a)
    if spec.kind == "remainder":
        return 2.0 / r if order == 1 else r ** (-float(order))
    if spec.kind == "bessel_potential":
        return (mu * mu + r * r) ** (-0.5 * (a + order))
    return r ** (-a - order)


def derivative_bound_check(spec: SymbolSpec, order: int, sample_set, step_rel: float = 1e-4) -> BoundReport:
    """Compare central finite-difference derivatives of ``spec`` against :func:`derivative_bound`.

    ``sample_set`` holds nonzero frequencies, either magnitudes (treated as
    one-dimensional) or an (m, d) array of vectors. For vectors every partial
    derivative of the requested order is formed and the largest is kept.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    pts = np.asarray(sample_set, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    radii = np.linalg.norm(pts, axis=1)
    if np.any(radii == 0):
        raise ValueError("derivative bounds are checked away from xi = 0")
    dim = pts.shape[1]
    derivs = np.zeros(len(pts))
    for i, (x, r) in enumerate(zip(pts, radii)):
        h = step_rel * r
        f = lambda y: float(evaluate(spec, np.linalg.norm(y)))  # noqa: E731
        best = 0.0
        eye = np.eye(dim)
        if order == 1:
            for k in range(dim):
                e = h * eye[k]
                best = max(best, abs(f(x + e) - f(x - e)) / (2 * h))
        else:
            for k in range(dim):
                for m in range(k, dim):
                    ek, em = h * eye[k], h * eye[m]
                    val = (f(x + ek + em) - f(x + ek - em) - f(x - ek + em) + f(x - ek - em)) / (4 * h * h)
                    best = max(best, abs(val))
        derivs[i] = best
    bound = derivative_bound(spec, order, radii)
    return BoundReport(samples=radii, ratios=derivs / bound, extra={"derivatives": derivs, "bound": bound})


def dyadic_samples(mu: float, scales: int = 4, per_octave: int = 4) -> np.ndarray:
    """Frequencies spanning ``scales`` octaves on each side of ``mu``."""
    return mu * 2.0 ** np.linspace(-scales, scales, 2 * scales * per_octave + 1)
