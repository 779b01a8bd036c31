"""Compiled kernel vs numpy fallback.

Times the raw LP kernel on random dominance LPs of several shapes, then one
rbip cross-sum run per backend. Run with ``python3 benchmarks/bench_kernel.py``
after ``python3 setup.py build_ext --inplace``.
"""

import argparse
import time

import numpy as np

from regionprune import _kernels
from regionprune._kernels import fallback
from regionprune.algorithms import rbip_prune
from regionprune.bench import problem_sets

try:
    from regionprune._kernels import _simplex
except ImportError:
    _simplex = None


def lp_batch(rng, m, n, count):
    out = []
    for _ in range(count):
        G = rng.uniform(-10, 10, (m, n))
        out.append((G, np.ones(m, dtype=bool)))
    return out


def per_call(fn, batch, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for G, c in batch:
            fn(G, c)
        best = min(best, (time.perf_counter() - t0) / len(batch))
    return best


def prune_time(fn, sets):
    saved = _kernels.max_slack
    _kernels.max_slack = fn
    try:
        t0 = time.perf_counter()
        rbip_prune(sets)
        return time.perf_counter() - t0
    finally:
        _kernels.max_slack = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200, help="LPs per shape")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _simplex is None:
        print("compiled kernel not built; run: python3 setup.py build_ext --inplace")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'shape':>10} {'cython_us':>10} {'python_us':>10} {'ratio':>7}")
    for m, n in [(10, 4), (50, 10), (300, 10), (100, 30)]:
        batch = lp_batch(rng, m, n, args.count)
        fast = per_call(_simplex.max_slack, batch, args.repeat)
        slow = per_call(fallback.max_slack, batch, args.repeat)
        print(f"{f'{m}x{n}':>10} {fast * 1e6:>10.1f} {slow * 1e6:>10.1f} {slow / fast:>7.1f}")

    sets = problem_sets(4, 8, 10, args.seed)
    fast = prune_time(_simplex.max_slack, sets)
    slow = prune_time(fallback.max_slack, sets)
    print(f"rbip k=4 n=8 S=10: cython {fast:.3f}s  python {slow:.3f}s  ratio {slow / fast:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
