"""Time the numba kernels against the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py --n 500 1000 --repeat 3

Each kernel is warmed up once per backend (so numba compile time is
excluded) and the best of ``--repeat`` runs is reported.  Outputs of both
backends are compared before timing.
"""
import argparse
import time

import numpy as np

from awcd import _accel, kernels, sbm
from awcd.detect import DEBIASED, count_matrices


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n, seed):
    # sparse regime near the k = 2 sweet spot of the experiments
    g, _ = sbm.sample(sbm.SbmSpec.symmetric(n, 2, 8.0 / n, 2.0 / n), seed)
    D = kernels.bounded_distances(g.adjacency, 2)
    S, N = count_matrices(g, D == 1, DEBIASED, 1)
    return {
        "bounded_distances(k=3)": (lambda: kernels.bounded_distances(g.adjacency, 3)),
        "test_matrix": (lambda: kernels.test_matrix(S, N)),
        "plus_counts(k=2)": (lambda: kernels.plus_counts(D == 2, D == 1, g.adjacency)),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    fin = np.isfinite(a)
    return np.array_equal(fin, np.isfinite(b)) and np.allclose(a[fin], b[fin], rtol=1e-11, atol=1e-11)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[250, 500, 1000], help="block sizes (2 blocks)")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<24}{'vertices':>9}{'numba s':>11}{'numpy s':>11}{'speedup':>9}  match")
    prev = _accel.numba_enabled()
    try:
        for n in args.n:
            for name, fn in cases(n, args.seed).items():
                _accel.use_numba(True)
                out_nb = fn()
                t_nb = best_time(fn, args.repeat)
                _accel.use_numba(False)
                out_np = fn()
                t_np = best_time(fn, args.repeat)
                print(f"{name:<24}{2 * n:>9}{t_nb:>11.4f}{t_np:>11.4f}{t_np / t_nb:>9.2f}  {same(out_nb, out_np)}")
    finally:
        _accel.use_numba(prev)


if __name__ == "__main__":
    main()
