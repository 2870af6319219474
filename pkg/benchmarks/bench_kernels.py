"""Compare the compiled and numpy kernels on theta and elliptic-gamma batches.

Usage: python3 benchmarks/bench_kernels.py [--size 2000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from ybx import _kernels_py
from ybx.kernels import BACKEND

try:
    from ybx import _kernels
except ImportError:
    _kernels = None


def batch(size, seed=0):
    rng = np.random.default_rng(seed)
    return (rng.uniform(-0.5, 0.5, size) + 1j * rng.uniform(-0.3, 0.3, size)).astype(np.complex128)


def time_call(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    z = batch(args.size)
    tau, p, q = 1j, np.exp(-2 * np.pi), np.exp(4j * np.pi * (0.17 + 0.11j))
    cases = {
        "theta1_series": lambda mod: (lambda: mod.theta1_series(z, tau, 30)),
        "egamma_product": lambda mod: (lambda: mod.egamma_product(z, p, q, 40)),
    }
    print(f"selected backend: {BACKEND}; batch size {args.size}")
    print(f"{'kernel':16s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for name, make in cases.items():
        t_py = time_call(make(_kernels_py), args.repeat)
        if _kernels is None:
            print(f"{name:16s} {1e3 * t_py:11.2f} {'n/a':>12s}")
            continue
        t_c = time_call(make(_kernels), args.repeat)
        a, b = make(_kernels_py)(), make(_kernels)()
        if isinstance(a, tuple):
            a, b = a[0], b[0]
        diff = float(np.abs(np.asarray(a) - np.asarray(b)).max() / np.abs(a).max())
        print(f"{name:16s} {1e3 * t_py:11.2f} {1e3 * t_c:12.2f} {t_py / t_c:8.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()
