"""Compare the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``; prints one line per kernel
with the per-call time of each backend and the speed-up.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from extsource import _kernels_py

try:
    from extsource import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def cases(rng: np.random.Generator):
    b, c, d = rng.normal(size=3)
    zb, zc, zd = rng.normal(size=3) + 1j * rng.normal(size=3)
    bb = rng.normal(size=2000) + 1j * rng.normal(size=2000)
    cc = rng.normal(size=2000) + 1j * rng.normal(size=2000)
    dd = rng.normal(size=2000) + 1j * rng.normal(size=2000)
    coeffs = rng.normal(size=7).astype(complex)
    zs = rng.normal(size=2000) + 1j * rng.normal(size=2000)
    poly = np.array([1.0, -2.0, 0.5, 3.0, -1.0, 0.25, 1.0], dtype=complex)
    start = 2.0 * np.exp(2j * np.pi * (np.arange(6) + 0.25) / 6)
    return {
        "cubic_roots_real": lambda m: m.cubic_roots_real(b, c, d),
        "cubic_roots": lambda m: m.cubic_roots(zb, zc, zd),
        "cubic_roots_batch[2000]": lambda m: m.cubic_roots_batch(bb, cc, dd),
        "horner[2000]": lambda m: m.horner(coeffs, zs),
        "aberth[deg 6]": lambda m: m.aberth(poly, start.copy()),
    }


def per_call(fn, repeat: int) -> float:
    number = max(1, repeat)
    return min(timeit.repeat(fn, number=number, repeat=3)) / number


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)
    table = cases(np.random.default_rng(args.seed))
    print(f"{'kernel':26s} {'python [us]':>12s} {'cython [us]':>12s} {'speed-up':>9s}")
    for name, call in table.items():
        reps = args.repeat if "2000" not in name else max(1, args.repeat // 50)
        t_py = per_call(lambda: call(_kernels_py), reps) * 1e6
        if _compiled is None:
            print(f"{name:26s} {t_py:12.2f} {'n/a':>12s} {'n/a':>9s}")
            continue
        t_cy = per_call(lambda: call(_compiled), reps) * 1e6
        print(f"{name:26s} {t_py:12.2f} {t_cy:12.2f} {t_py / t_cy:9.1f}")


if __name__ == "__main__":
    main()
