"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-m "not slow"`` to
skip the rate experiment) or directly with ``python tests/test_acceptance.py``.
Tolerances are fixed up front; failing criteria are left failing.
"""
import math
import os
import sys
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402
from awcd import _accel, sbm  # noqa: E402
from awcd.detect import (CIRCLE, DEBIASED, PLUS, AwcdConfig, bernoulli_kl,  # noqa: E402
                         count_matrices, initial_test_matrix, step)
from awcd.evaluation import auto_lambda_grid, rand_index_over_grid  # noqa: E402
from awcd.experiments import (fit_slope, iteration_rand, parse_lambda_grid, run_rate,  # noqa: E402
                              theta_min_per_n)
from awcd.graph import Graph, bounded_distances, format_edge_list  # noqa: E402
from awcd.theory import ak_bk, consistency_polygon, expected_counts_k1  # noqa: E402

SEED = 1                       # the single SBM instance for criteria 1 and 2
FIG4 = sbm.SbmSpec.symmetric(2000, 2, 0.01, 0.0025)
GRID_POINTS = 20


_capture = None


@pytest.fixture(autouse=True)
def _uncaptured(request):
    """Let :func:`report` print past pytest's output capture."""
    global _capture
    _capture = request.config.pluginmanager.getplugin("capturemanager")
    yield
    _capture = None


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    if _capture is not None:
        with _capture.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)
    return ok


_fig4_cache = {}


def fig4_instance():
    if "g" not in _fig4_cache:
        _fig4_cache["g"] = sbm.sample(FIG4, SEED)
    return _fig4_cache["g"]


# --------------------------------------------------------------------------

def criterion_1():
    g, labels = fig4_instance()
    w_star = sbm.true_weights(labels)
    best = {}
    for k in (1, 2, 3):
        T = initial_test_matrix(g, k, DEBIASED)
        best[k] = float(rand_index_over_grid(T, w_star, auto_lambda_grid(T, GRID_POINTS)).max())
    ok = best[2] >= 0.95 and best[1] <= 0.75 and best[3] <= 0.75
    detail = ", ".join(f"k={k}: {v:.4f}" for k, v in best.items())
    return report(1, ok, f"max-over-lambda Rand {detail} (need k=2 >= 0.95, k=1,3 <= 0.75)")


def criterion_2():
    g, labels = fig4_instance()
    T = initial_test_matrix(g, 1, DEBIASED)
    lams = auto_lambda_grid(T, GRID_POINTS)
    R = iteration_rand(g, labels, 1, DEBIASED, lams, 3, T=T)
    rise = float(np.max(R[:, 1:].max(axis=1) - R[:, 0]))
    best = R.max(axis=0)
    ok = rise <= 0.02
    return report(2, ok, f"largest per-lambda increase {rise:.4f} over 3 iterations (need <= 0.02); "
                         f"best per iteration {np.round(best, 4).tolist()}")


def criterion_3():
    n_list = [250, 500, 1000, 2000]
    theta_grid = np.geomspace(0.025, 0.3, 16).tolist()
    pts = run_rate(n_list, theta_grid, 4.0, 1, 0, 5, parse_lambda_grid(f"auto:{GRID_POINTS}"))
    tmin = theta_min_per_n(pts, 0.95)
    slope = fit_slope(tmin)
    ok = slope is not None and len(tmin) == len(n_list) and -0.85 <= slope <= -0.50
    found = {n: round(p.theta, 4) for n, p in tmin.items()}
    return report(3, ok, f"theta_min {found}, slope {slope if slope is None else round(slope, 4)} "
                         f"(need in [-0.85, -0.50])")


def criterion_4():
    rng = np.random.default_rng(2024)
    bad = []
    for trial in range(100):
        n = int(rng.integers(2, 41))
        edges = oracles.random_graph(rng, n, float(rng.uniform(0.02, 0.35)))
        g = Graph.from_edges(n, edges)
        nb = oracles.adjacency_sets(n, edges)
        for k in (1, 2):
            expect = {tag: oracles.counts(nb, k, tag) for tag in ("circle", "debiased", "plus")}
            for use in (True, False):
                prev = _accel.use_numba(use)
                try:
                    D = bounded_distances(g, k)
                    for v, tag in ((CIRCLE, "circle"), (DEBIASED, "debiased"), (PLUS, "plus")):
                        S, N = count_matrices(g, D == k, v, k, D == k - 1 if k > 1 else None)
                        So, No = expect[tag]
                        if not (np.array_equal(S, So) and np.array_equal(N, No)):
                            bad.append((trial, k, tag, "numba" if use else "numpy"))
                finally:
                    _accel.use_numba(prev)
    return report(4, not bad, f"100 graphs x k in (1, 2) x 3 variants x 2 backends, mismatches: {bad[:5] or 0}")


def criterion_5():
    rng = np.random.default_rng(5)
    worst = 0.0
    worst_float = 0.0
    for _ in range(1000):
        rho, theta = sorted(rng.random(2))
        K = int(rng.integers(2, 7))
        th, rh = Fraction(theta), Fraction(rho)
        for k in range(1, 11):
            a, b = ak_bk(th, rh, K, k)
            worst = max(worst, abs(float(a - b - (th - rh) ** k)))
            af, bf = ak_bk(theta, rho, K, k)
            worst_float = max(worst_float, abs((af - bf) - (theta - rho) ** k))
    homog = all(expected_counts_k1(Fraction(t), Fraction(t), K, 100)[0] ==
                expected_counts_k1(Fraction(t), Fraction(t), K, 100)[1]
                for t in (0.1, 0.37, 0.5, 0.99) for K in (2, 3, 6))
    F = Fraction
    polys = (consistency_polygon("debiased", 1).vertices ==
             ((0, 0), (0, F(-1, 6)), (F(-1, 2), F(-1, 12)), (F(-2, 3), 0)) and
             consistency_polygon("circle", 1).vertices ==
             ((0, 0), (0, F(-1, 6)), (F(-1, 3), F(-1, 9)), (F(-1, 2), 0)))
    ok = worst <= 1e-12 and homog and polys
    return report(5, ok, f"max |a_k - b_k - (theta-rho)^k| = {worst:.1e} exact arithmetic "
                         f"(float64 inputs: {worst_float:.1e}); a == c at rho = theta: {homog}; "
                         f"polygons match: {polys}")


def criterion_6():
    spec = sbm.SbmSpec.symmetric(300, 2, 0.3, 0.1)
    a, c, _ = expected_counts_k1(0.3, 0.1, 2, 300)
    same_sum = cross_sum = 0.0
    same_cnt = cross_cnt = 0
    for s in range(20):
        g, labels = sbm.sample(spec, s)
        D = bounded_distances(g, 1)
        S, _ = count_matrices(g, D == 1, DEBIASED, 1)
        iu = np.triu_indices(g.n_vertices, 1)
        same = labels[iu[0]] == labels[iu[1]]
        vals = S[iu]
        same_sum += vals[same].sum()
        cross_sum += vals[~same].sum()
        same_cnt += int(same.sum())
        cross_cnt += int((~same).sum())
    ms, mc = same_sum / same_cnt, cross_sum / cross_cnt
    es, ec = abs(ms / a - 1), abs(mc / c - 1)
    ok = es <= 0.05 and ec <= 0.05
    return report(6, ok, f"mean S same {ms:.1f} vs a={a:.0f} ({es:.2%}), "
                         f"cross {mc:.1f} vs c={c:.0f} ({ec:.2%}); need <= 5%")


def criterion_7():
    rng = np.random.default_rng(7)
    failures = []
    # KL nonnegativity and identity of indiscernibles on a grid
    grid = np.linspace(0, 1, 51)
    for p in grid:
        for q in grid[1:-1]:
            v = bernoulli_kl(p, q)
            if v < 0 or (v == 0) != (p == q):
                failures.append(("kl", p, q))
    for trial in range(40):
        n = int(rng.integers(2, 31))
        g = Graph.from_edges(n, oracles.random_graph(rng, n, float(rng.uniform(0.05, 0.5))))
        perm = rng.permutation(n)
        for k in (1, 2):
            for v in (CIRCLE, DEBIASED, PLUS):
                W, T = step(g, None, AwcdConfig(k=k, lam=2.0, variant=v))
                if not (np.array_equal(W, W.T) and np.all(np.diag(W) == 1)):
                    failures.append(("symmetry", trial, k, str(v)))
                W_hi, _ = step(g, None, AwcdConfig(k=k, lam=6.0, variant=v))
                if np.any(W > W_hi):
                    failures.append(("monotone", trial, k, str(v)))
                Wp, Tp = step(g.relabel(perm), None, AwcdConfig(k=k, lam=2.0, variant=v))
                if not (np.array_equal(Wp[np.ix_(perm, perm)], W) and
                        np.allclose(Tp[np.ix_(perm, perm)], T, rtol=1e-12, atol=1e-12)):
                    failures.append(("equivariance", trial, k, str(v)))
    spec = sbm.SbmSpec.symmetric(50, 3, 0.3, 0.05)
    if format_edge_list(sbm.sample(spec, 42)[0]) != format_edge_list(sbm.sample(spec, 42)[0]):
        failures.append(("rerun",))
    return report(7, not failures, f"symmetry, lambda-monotonicity, KL grid, equivariance, reruns; "
                                   f"violations: {failures[:5] or 0}")


# --------------------------------------------------------------------------

def test_criterion_1():
    assert criterion_1()


def test_criterion_2():
    assert criterion_2()


@pytest.mark.slow
def test_criterion_3():
    assert criterion_3()


def test_criterion_4():
    assert criterion_4()


def test_criterion_5():
    assert criterion_5()


def test_criterion_6():
    assert criterion_6()


def test_criterion_7():
    assert criterion_7()


if __name__ == "__main__":
    skip_slow = "--fast" in sys.argv
    results = [criterion_1(), criterion_2()]
    if not skip_slow:
        results.append(criterion_3())
    results += [criterion_4(), criterion_5(), criterion_6(), criterion_7()]
    sys.exit(0 if all(results) else 1)
