"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_backends.py [--n 500,1000,2000] [--repeat 3]

Each row reports the best-of-``repeat`` wall time of one call (after a
warm-up call, so numba compilation is excluded) and the largest absolute
difference between the two backends' outputs.
"""

import argparse
import time

import numpy as np

from dreamtest import _backend


def best_time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n, q, repeat, rng):
    T = rng.standard_normal((n, q))
    y = rng.standard_normal(n)
    Z = rng.standard_normal((n, 4))
    cases = {
        "loo_sums/gauss4": lambda m: m.loo_sums(T, y, 0.5, _backend.family_code("gauss4")),
        "ustat_sums/quartic": lambda m: m.ustat_sums(T, y, 0.7, _backend.family_code("quartic")),
        "dominance_matrix": lambda m: m.dominance_matrix(Z),
    }
    nb, npy = _backend.module("numba"), _backend.module("numpy")
    for name, call in cases.items():
        t_nb = best_time(lambda: call(nb), repeat)
        t_np = best_time(lambda: call(npy), repeat)
        a, b = call(nb), call(npy)
        diff = max(float(np.max(np.abs(np.asarray(x) - np.asarray(z)))) for x, z in zip(np.atleast_1d(a), np.atleast_1d(b)))
        print(f"{name:20s} n={n:5d} q={q}  numba {t_nb * 1e3:9.2f} ms  numpy {t_np * 1e3:9.2f} ms  "
              f"speedup {t_np / t_nb:6.1f}x  max|diff| {diff:.1e}")


def main():
    p = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    p.add_argument("--n", default="500,1000,2000")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if not _backend.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    rng = np.random.default_rng(0)
    for n in (int(v) for v in args.n.split(",")):
        bench(n, args.q, args.repeat, rng)


if __name__ == "__main__":
    main()
