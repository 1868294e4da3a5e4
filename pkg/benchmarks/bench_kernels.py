"""Compiled vs numpy kernels: phi_pair_grid and max_pair_ratio.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from titchmarsh import _purepy

try:
    from titchmarsh import _kernels
except ImportError:
    _kernels = None

CASES = [("R^1", 0, 1), ("R^3", 0, 3), ("H^3", 1, 3), ("H^2", 1, 2)]


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=256)
    args = ap.parse_args()
    lam = np.linspace(0.0, 50.0, args.size)
    t = np.linspace(1e-6, 3.0, args.size)
    print(f"{'kernel':<24}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for label, hyp, n in CASES:
        py = bench(lambda: _purepy.phi_pair_grid(hyp, n, lam, t), args.repeat)
        line = f"{'phi_pair_grid ' + label:<24}{1e3 * py:>14.2f}"
        if _kernels is not None:
            c = bench(lambda: _kernels.phi_pair_grid(hyp, n, lam, t), args.repeat)
            line += f"{1e3 * c:>16.2f}{py / c:>10.1f}"
        print(line)
    v = np.abs(np.random.default_rng(0).standard_normal(2000)) + 0.1
    py = bench(lambda: _purepy.max_pair_ratio(v), args.repeat)
    line = f"{'max_pair_ratio':<24}{1e3 * py:>14.2f}"
    if _kernels is not None:
        c = bench(lambda: _kernels.max_pair_ratio(v), args.repeat)
        line += f"{1e3 * c:>16.2f}{py / c:>10.1f}"
    print(line)


if __name__ == "__main__":
    main()
