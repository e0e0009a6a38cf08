import os
import subprocess
import sys

import numpy as np
import pytest

from besselriesz import _kernels, special

pytest.importorskip("numba")


def test_bessel_k_array():
    t = np.geomspace(1e-4, 400, 57)
    for nu in (0.0, 0.5, 1.3, 4.0):
        assert np.allclose(_kernels._bessel_k_array_numba(nu, t), _kernels._bessel_k_array_numpy(nu, t), rtol=1e-13, atol=0)


def test_bessel_k_scalar():
    for nu, x in ((0.0, 0.01), (2.5, 1.99), (1.0, 2.01), (7.0, 60.0)):
        assert _kernels._bessel_k_nb(nu, x) == pytest.approx(_kernels._bessel_k_py(nu, x), rel=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_series_kernel_sum(d):
    coeffs = special.binom_coeffs(1.0, 3000)
    r = np.geomspace(1e-3, 80, 40)
    a = _kernels._series_kernel_sum_numba(coeffs, d, r, 3000)
    b = _kernels._series_kernel_sum_numpy(coeffs, d, r, 3000)
    assert np.allclose(a, b, rtol=1e-11, atol=0)


def test_binom_series():
    x = np.linspace(0.0, 0.999, 33)
    n = np.arange(33) * 50
    a = _kernels._binom_series_numba(0.5, x, n)
    b = _kernels._binom_series_numpy(0.5, x, n)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_maximal(alpha):
    rng = np.random.default_rng(0)
    f = np.abs(rng.standard_normal(512))
    a = _kernels._maximal_1d_numba(f, 0.05, alpha, 100)
    b = _kernels._maximal_1d_numpy(f, 0.05, alpha, 100)
    assert np.allclose(a, b, rtol=1e-12)


def test_moment_partial_sums():
    cp = np.array([1, 10, 1000, 2**20 + 5], dtype=np.int64)
    a = _kernels._moment_partial_sums_numba(1.0, 0.5, cp)
    b = _kernels._moment_partial_sums_numpy(1.0, 0.5, cp)
    assert np.allclose(a, b, rtol=1e-10)


def test_env_flag_selects_numpy():
    env = dict(os.environ, BESSELRIESZ_NO_NUMBA="1")
    code = "from besselriesz._accel import backend_name; print(backend_name())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["BESSELRIESZ_NO_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
