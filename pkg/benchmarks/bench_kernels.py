#!/usr/bin/env python3
"""Time the compiled kernels against the pure numpy backend.

Both produce bit-identical results (asserted here on every run); this
script only answers "how much faster is the extension".

    python benchmarks/bench_kernels.py --sizes 200,400,800
"""

import argparse
import time

import numpy as np

from greenspoof._kernels import numpy_backend
from greenspoof.classifiers.svm import rbf_kernel

try:
    from greenspoof import _fast
except ImportError:
    raise SystemExit("compiled extension not built; nothing to compare")


def time_call(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_smo(n, rng):
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    y[:2] = (-1.0, 1.0)
    X = rng.normal(size=(n, 24)) + 0.5 * y[:, None]
    K = rbf_kernel(X, X, 0.05, same=True)
    t_c, res_c = time_call(_fast.smo_solve, K, y, 1.0, 1e-3, 10_000_000)
    t_n, res_n = time_call(numpy_backend.smo_solve, K, y, 1.0, 1e-3,
                           10_000_000)
    assert res_c[0].tobytes() == res_n[0].tobytes(), "backends disagree"
    return t_c, t_n, f"{res_c[2]} iters"


def bench_tree_split(m, rng):
    d = 32
    X = np.round(rng.normal(size=(m, d)), 2)
    labels = rng.integers(0, 2, m, dtype=np.uint8)
    order = np.argsort(X, axis=0, kind="stable")
    vals = np.ascontiguousarray(np.take_along_axis(X, order, axis=0))
    labs = np.ascontiguousarray(np.take_along_axis(
        np.repeat(labels[:, None], d, axis=1), order, axis=0))
    table = np.empty(m + 1)
    table[0] = 0.0
    table[1:] = np.log2(np.arange(1, m + 1, dtype=np.float64))
    t_c, res_c = time_call(_fast.tree_best_split, vals, labs, 1, table)
    t_n, res_n = time_call(numpy_backend.tree_best_split, vals, labs, 1,
                           table)
    assert res_c == res_n, "backends disagree"
    return t_c, t_n, f"{d} features"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="200,400,800",
                        help="comma-separated problem sizes")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<12} {'size':>6} {'compiled':>10} {'numpy':>10} "
          f"{'speedup':>8}  notes")
    for name, fn in (("smo", bench_smo), ("tree_split", bench_tree_split)):
        for n in sizes:
            t_c, t_n, note = fn(n, rng)
            print(f"{name:<12} {n:>6} {t_c * 1e3:>8.2f}ms {t_n * 1e3:>8.2f}ms "
                  f"{t_n / t_c:>7.1f}x  {note}")


if __name__ == "__main__":
    main()
