"""Parameter sweeps over symmetric SBMs with deterministic seeding and CSV output."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field, fields
from typing import Sequence

import numpy as np

from . import sbm
from .detect import DEBIASED, Variant, initial_test_matrix, iterate_from, threshold
from .evaluation import (auto_lambda_grid, exact_recovery, modularity, partition_from_weights,
                         rand_index, rand_index_over_grid)

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# formatting and grid parsing

def format_value(x) -> str:
    """Shortest round-trip decimal for floats, ``inf``/``-inf``/``nan`` tokens."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


@dataclass(frozen=True)
class LambdaGrid:
    """Either explicit values or ``auto``: a linear grid fitted to each test matrix."""

    values: tuple = ()
    auto_count: int = 0

    def resolve(self, T: np.ndarray) -> np.ndarray:
        if self.auto_count:
            return auto_lambda_grid(T, self.auto_count)
        return np.asarray(self.values, dtype=np.float64)

    @property
    def is_auto(self) -> bool:
        return self.auto_count > 0


def parse_lambda_grid(text: str) -> LambdaGrid:
    """``start:stop:count`` (linear), ``auto:count`` or a comma-separated list."""
    text = text.strip()
    if text.startswith("auto"):
        _, _, count = text.partition(":")
        count = int(count or 20)
        if count < 1:
            raise ValueError("grid count must be positive")
        return LambdaGrid(auto_count=count)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad lambda grid {text!r}; expected start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be positive")
        return LambdaGrid(values=tuple(np.linspace(start, stop, count).tolist()))
    values = parse_float_list(text)
    if not values:
        raise ValueError("empty lambda grid")
    return LambdaGrid(values=tuple(values))


def parse_float_list(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def parse_int_list(text: str) -> list:
    return [int(x) for x in text.split(",") if x.strip()]


def parse_theta_grid(text: str) -> list:
    """Comma list, or ``geom:start:stop:count`` for a geometric grid."""
    if text.startswith("geom:"):
        _, start, stop, count = text.split(":")
        return np.geomspace(float(start), float(stop), int(count)).tolist()
    return parse_float_list(text)


# --------------------------------------------------------------------------
# sweep

@dataclass(frozen=True)
class SweepConfig:
    n: int
    K: int
    theta_list: tuple
    rho_list: tuple
    k_list: tuple
    lambda_grid: LambdaGrid
    base_seed: int = 0
    reps: int = 1
    variant: Variant = DEBIASED
    neighborhood: str = "ring"

    def __post_init__(self):
        for name in ("theta_list", "rho_list", "k_list"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        for p in tuple(self.theta_list) + tuple(self.rho_list):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of [0, 1]: {p}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")

    def seeds(self) -> list:
        return [sbm.derive_seed(self.base_seed, r) for r in range(self.reps)]


@dataclass
class SweepRecord:
    n: int
    K: int
    theta: float
    rho: float
    k: int
    lam: float
    seed: int
    rand_index: float
    exact_recovery: bool
    modularity: float
    wall_time_seconds: float = field(compare=False)


SWEEP_HEADER = ["n", "K", "theta", "rho", "k", "lambda", "seed",
                "rand_index", "exact_recovery", "modularity", "wall_time_seconds"]


def _safe_modularity(g, labels):
    if g.n_edges == 0:
        return math.nan
    return modularity(g, labels)


def _sweep_task(args):
    n, K, theta, rho, k, seed, grid, variant, neighborhood = args
    g, labels = sbm.sample(sbm.SbmSpec.symmetric(n, K, theta, rho), seed)
    w_star = sbm.true_weights(labels)
    t0 = time.perf_counter()
    T = initial_test_matrix(g, k, variant, neighborhood=neighborhood)
    shared = time.perf_counter() - t0
    out = []
    for lam in grid.resolve(T):
        t1 = time.perf_counter()
        W = threshold(T, lam)
        rec = SweepRecord(n, K, theta, rho, k, float(lam), seed,
                          rand_index(W, w_star), exact_recovery(W, w_star),
                          _safe_modularity(g, partition_from_weights(W)), 0.0)
        rec.wall_time_seconds = shared + (time.perf_counter() - t1)
        out.append(rec)
    return out


def _map(func, tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, tasks))
    return [func(t) for t in tasks]


def run_sweep(config: SweepConfig, jobs: int = 1) -> list:
    """One record per (theta, rho, k, lambda, seed), in that lexicographic order.

    Each (theta, rho, k, seed) computes its test matrix once and thresholds it
    at every lambda.  With an ``auto`` grid the lambda values depend on the
    test matrix, so rows are ordered by grid position rather than value.
    """
    seeds = config.seeds()
    tasks = []
    for theta in config.theta_list:
        for rho in config.rho_list:
            for k in config.k_list:
                for seed in seeds:
                    tasks.append((config.n, config.K, float(theta), float(rho), int(k), seed,
                                  config.lambda_grid, config.variant, config.neighborhood))
    results = _map(_sweep_task, tasks, jobs)
    rows = []
    n_seeds = len(seeds)
    for block in range(0, len(results), n_seeds):
        per_seed = results[block:block + n_seeds]
        for li in range(len(per_seed[0])):
            rows.extend(recs[li] for recs in per_seed)
    return rows


def sweep_csv(records: Sequence[SweepRecord], timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in records:
        vals = list(astuple(r))
        if not timing:
            vals[-1] = 0.0
        w.writerow([format_value(v) for v in vals])
    return buf.getvalue()


def best_over_lambda(records: Sequence[SweepRecord]) -> dict:
    """Max Rand index over lambda for every (theta, rho, k, seed)."""
    best = {}
    for r in records:
        key = (r.theta, r.rho, r.k, r.seed)
        best[key] = max(best.get(key, -1.0), r.rand_index)
    return best


# --------------------------------------------------------------------------
# rate experiment

@dataclass(frozen=True)
class RatePoint:
    n: int
    theta: float
    rho: float
    mean_best_rand: float


def _rate_task(args):
    n, theta, quotient, k, seed, grid, variant, neighborhood = args
    rho = theta / quotient
    g, labels = sbm.sample(sbm.SbmSpec.symmetric(n, 2, theta, rho), seed)
    T = initial_test_matrix(g, k, variant, neighborhood=neighborhood)
    return float(np.max(rand_index_over_grid(T, sbm.true_weights(labels), grid.resolve(T))))


def run_rate(n_list, theta_grid, quotient, k, base_seed, reps, lambda_grid: LambdaGrid,
             variant: Variant = DEBIASED, jobs: int = 1, neighborhood: str = "ring") -> list:
    """Best-over-lambda Rand index averaged over ``reps`` seeds for every (n, theta)."""
    if quotient <= 1:
        raise ValueError("quotient must be > 1")
    seeds = [sbm.derive_seed(base_seed, r) for r in range(reps)]
    tasks = [(int(n), float(th), float(quotient), int(k), s, lambda_grid, variant, neighborhood)
             for n in n_list for th in theta_grid for s in seeds]
    scores = _map(_rate_task, tasks, jobs)
    points = []
    i = 0
    for n in n_list:
        for th in theta_grid:
            chunk = scores[i:i + len(seeds)]
            i += len(seeds)
            points.append(RatePoint(int(n), float(th), float(th) / quotient, float(np.mean(chunk))))
    return points


def theta_min_per_n(points: Sequence[RatePoint], threshold_value: float) -> dict:
    """Smallest grid theta whose mean best Rand reaches the threshold, per n."""
    out = {}
    for p in sorted(points, key=lambda p: (p.n, p.theta)):
        if p.n not in out and p.mean_best_rand >= threshold_value:
            out[p.n] = p
    return out


def fit_slope(theta_min: dict):
    """Least-squares slope of log theta_min against log n, or None with < 2 points."""
    if len(theta_min) < 2:
        return None
    ns = np.array(sorted(theta_min), dtype=np.float64)
    th = np.array([theta_min[int(n)].theta for n in ns])
    slope, _ = np.polyfit(np.log(ns), np.log(th), 1)
    return float(slope)


def rate_csv(points, theta_min, slope) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "n", "theta", "rho", "value"])
    for p in points:
        w.writerow(["point", p.n, format_value(p.theta), format_value(p.rho), format_value(p.mean_best_rand)])
    for n in sorted(theta_min):
        p = theta_min[n]
        w.writerow(["theta_min", n, format_value(p.theta), format_value(p.rho), format_value(p.mean_best_rand)])
    if slope is not None:
        w.writerow(["slope", "", "", "", format_value(slope)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# repeated iterations

def iteration_rand(g, labels, k: int, variant: Variant, lambdas, l_max: int, T=None) -> np.ndarray:
    """Rand index after each of ``l_max`` iterations, one row per lambda."""
    w_star = sbm.true_weights(labels)
    if T is None:
        T = initial_test_matrix(g, k, variant)
    out = np.empty((len(lambdas), l_max))
    for a, lam in enumerate(lambdas):
        W = threshold(T, lam)
        out[a, 0] = rand_index(W, w_star)
        for it in range(1, l_max):
            W, _ = iterate_from(g, W, variant, lam)
            out[a, it] = rand_index(W, w_star)
    return out
