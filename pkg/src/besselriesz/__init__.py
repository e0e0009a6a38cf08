"""Spectral toolkit for the Bessel-Riesz quotient operator and its approximation experiments."""

from ._accel import USE_NUMBA, backend_name
from .approx import CurveResult, TestFunctionSpec, build_field
from .grid import GridSpec, SampledField, SpectralField, make_grid
from .kernels import KernelProfile, SeriesKernelSpec, series_truncation
from .symbols import SymbolSpec, apply_symbol

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "CurveResult",
    "TestFunctionSpec",
    "build_field",
    "GridSpec",
    "SampledField",
    "SpectralField",
    "make_grid",
    "KernelProfile",
    "SeriesKernelSpec",
    "series_truncation",
    "SymbolSpec",
    "apply_symbol",
]

__version__ = "0.1.0"
