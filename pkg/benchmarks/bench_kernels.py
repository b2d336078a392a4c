"""Times the compiled kernels against the pure-NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gapeval._kernels import np_backend

try:
    from gapeval._kernels import _ckern
except ImportError:
    _ckern = None


def bench(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def fmt(seconds):
    return f"{seconds * 1e3:9.3f} ms"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _ckern is None:
        print("compiled backend not built; showing NumPy fallback only")

    rng = np.random.default_rng(0)
    rows = []

    for n in (200, 2_000, 10_000):
        pts = np.ascontiguousarray(rng.uniform(0, 1000, (n, 2)))
        label = f"nn2_grid       n={n:>6}"
        np_t = bench(np_backend.nn2_grid, pts, repeat=args.repeat)
        cy_t = (bench(_ckern.nn2_grid, pts, repeat=args.repeat)
                if _ckern else None)
        rows.append((label, np_t, cy_t))
        if n <= 2_000:
            label = f"nn2_exhaustive n={n:>6}"
            np_t = bench(np_backend.nn2_exhaustive, pts, repeat=args.repeat)
            cy_t = (bench(_ckern.nn2_exhaustive, pts, repeat=args.repeat)
                    if _ckern else None)
            rows.append((label, np_t, cy_t))

    for shape in ((480, 640), (1080, 1920)):
        img = np.ascontiguousarray(rng.uniform(0, 255, shape))
        label = f"laplacian      {shape[0]}x{shape[1]}"
        np_t = bench(np_backend.laplacian_response, img, repeat=args.repeat)
        cy_t = (bench(_ckern.laplacian_response, img, repeat=args.repeat)
                if _ckern else None)
        rows.append((label, np_t, cy_t))

    header = f"{'kernel':<28} {'numpy':>12} {'cython':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, np_t, cy_t in rows:
        if cy_t is None:
            print(f"{label:<28} {fmt(np_t)} {'-':>12} {'-':>9}")
        else:
            print(f"{label:<28} {fmt(np_t)} {fmt(cy_t)} {np_t / cy_t:8.1f}x")


if __name__ == "__main__":
    main()
