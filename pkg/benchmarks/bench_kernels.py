"""Time the numba and numpy implementations of each hot loop side by side.

    python benchmarks/bench_kernels.py [--repeat 3]

The numba functions are called once before timing so JIT compilation is not
counted. Each row also reports the largest relative gap between the outputs.
"""

import argparse
import time

import numpy as np

from besselriesz import _kernels, special


def cases():
    coeffs = special.binom_coeffs(1.0, 3183)
    r = np.geomspace(1e-3, 50.0, 400)
    yield "series kernel (d=1, J=3183, 400 radii)", _kernels._series_kernel_sum_numba, _kernels._series_kernel_sum_numpy, (coeffs, 1, r, 3183)

    x = np.linspace(0.0, 0.9999, 2000)
    n = np.full(2000, 20000, dtype=np.int64)
    yield "binomial series (2000 points x 20000 terms)", _kernels._binom_series_numba, _kernels._binom_series_numpy, (0.5, x, n)

    f = np.abs(np.random.default_rng(0).standard_normal(2**14))
    yield "maximal function (n=2^14, 512 radii)", _kernels._maximal_1d_numba, _kernels._maximal_1d_numpy, (f, 1e-3, 1.0, 512)

    cp = np.array([2**10, 2**16, 2**22], dtype=np.int64)
    yield "moment partial sums (2^22 terms)", _kernels._moment_partial_sums_numba, _kernels._moment_partial_sums_numpy, (1.0, 0.5, cp)

    t = np.geomspace(1e-3, 300.0, 20000)
    yield "Bessel K array (20000 arguments)", _kernels._bessel_k_array_numba, _kernels._bessel_k_array_numpy, (1.5, t)


def best_of(func, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    print(f"{'case':48s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max rel gap':>12s}")
    for name, fast, slow, fargs in cases():
        fast(*fargs)
        t_fast, a = best_of(fast, fargs, args.repeat)
        t_slow, b = best_of(slow, fargs, args.repeat)
        gap = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        print(f"{name:48s} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:8.1f} {gap:12.2e}")


if __name__ == "__main__":
    main()
