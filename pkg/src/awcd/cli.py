"""Command-line entry point: ``awcd {generate,detect,sweep,rate,theory}``.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys

import numpy as np

from . import sbm, theory
from .detect import AwcdConfig, Variant, initial_test_matrix, iterate_from, threshold
from .evaluation import exact_recovery, partition_from_weights, rand_index, tune_lambda
from .experiments import (SweepConfig, fit_slope, format_value, parse_float_list, parse_int_list,
                          parse_lambda_grid, parse_theta_grid, rate_csv, run_rate, run_sweep,
                          sweep_csv, theta_min_per_n)
from .graph import GraphFormatError, load_edge_list, write_edge_list

log = logging.getLogger("awcd")

EXIT_USAGE = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _variant(text):
    try:
        return Variant.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown variant {text!r}") from None


def _typed(func):
    def conv(text):
        try:
            return func(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    conv.__name__ = func.__name__
    return conv


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _labels_text(labels):
    return "".join(f"{int(x)}\n" for x in labels)


def _read_labels(path):
    with open(path, encoding="utf-8") as fh:
        rows = [line.split("#", 1)[0].strip() for line in fh]
    try:
        return np.array([int(r) for r in rows if r], dtype=np.int64)
    except ValueError as exc:
        raise GraphFormatError(f"{path}: bad label: {exc}") from None


# --------------------------------------------------------------------------
# subcommands

def cmd_generate(args):
    if args.sizes is not None:
        sizes = parse_int_list(args.sizes)
        thetas = parse_float_list(args.thetas) if args.thetas else [args.theta] * len(sizes)
        spec = sbm.SbmSpec(tuple(sizes), tuple(thetas), args.rho)
    else:
        spec = sbm.SbmSpec.symmetric(args.n, args.K, args.theta, args.rho)
    g, labels = sbm.sample(spec, args.seed)
    labels_out = args.labels_out or f"{args.out}.labels"
    write_edge_list(g, args.out)
    _write_text(labels_out, _labels_text(labels))
    print(g.n_edges)
    return 0


def _read_graph(path):
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def cmd_detect(args):
    g = _read_graph(args.graph)
    config_kwargs = dict(k=args.k, l_max=args.iters, variant=args.variant, neighborhood=args.neighborhood)
    T = initial_test_matrix(g, args.k, args.variant, neighborhood=args.neighborhood)
    if args.lam == "auto":
        grid = parse_lambda_grid(args.lambda_grid).resolve(T)
        lam, q = tune_lambda(g, AwcdConfig(**config_kwargs), grid, T=T, tie_break=args.tie_break)
        print(f"lambda {format_value(lam)} modularity {format_value(q)}")
    else:
        lam = float(args.lam)
    config = AwcdConfig(lam=lam, **config_kwargs)
    W = threshold(T, lam)
    tests = [T]
    for _ in range(config.l_max - 1):
        W, T_next = iterate_from(g, W, config.variant, lam)
        tests.append(T_next)

    iu = np.triu_indices(g.n_vertices, 1)
    keep = W[iu] != 0
    pairs = "".join(f"{i} {j}\n" for i, j in zip(iu[0][keep].tolist(), iu[1][keep].tolist()))
    _write_text(args.out, pairs)
    labels_out = args.labels_out or (f"{args.out}.labels" if args.out not in (None, "-") else None)
    if labels_out:
        _write_text(labels_out, _labels_text(partition_from_weights(W)))
    if args.dump_test_matrix:
        _write_text(args.dump_test_matrix, matrix_csv(tests[-1]))
    if args.labels:
        truth = _read_labels(args.labels)
        if truth.size != g.n_vertices:
            raise GraphFormatError(f"{args.labels}: expected {g.n_vertices} labels, got {truth.size}")
        w_star = sbm.true_weights(truth)
        print(f"rand_index {format_value(rand_index(W, w_star))}")
        print(f"exact_recovery {str(exact_recovery(W, w_star)).lower()}")
    return 0


def matrix_csv(T) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(T):
        w.writerow([format_value(x) for x in row.tolist()])
    return buf.getvalue()


def cmd_sweep(args):
    config = SweepConfig(
        n=args.n, K=args.K,
        theta_list=tuple(parse_float_list(args.theta)),
        rho_list=tuple(parse_float_list(args.rho)),
        k_list=tuple(parse_int_list(args.k)),
        lambda_grid=parse_lambda_grid(args.lambda_grid),
        base_seed=args.seed, reps=args.reps, variant=args.variant,
        neighborhood=args.neighborhood,
    )
    records = run_sweep(config, jobs=args.jobs)
    _write_text(args.out, sweep_csv(records, timing=not args.no_timing))
    return 0


def cmd_rate(args):
    if args.quotient <= 1:
        raise UsageError("--quotient must be > 1")
    if not 0 <= args.threshold <= 1:
        raise UsageError("--threshold must lie in [0, 1]")
    n_list = parse_int_list(args.n)
    theta_grid = parse_theta_grid(args.theta_grid)
    points = run_rate(n_list, theta_grid, args.quotient, args.k, args.seed, args.reps,
                      parse_lambda_grid(args.lambda_grid), args.variant, jobs=args.jobs,
                      neighborhood=args.neighborhood)
    tmin = theta_min_per_n(points, args.threshold)
    slope = fit_slope(tmin)
    if slope is None:
        log.warning("fewer than two n values reach the threshold; slope omitted")
    _write_text(args.out, rate_csv(points, tmin, slope))
    return 0


def cmd_theory(args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    poly = theory.consistency_polygon(args.variant.tag, args.k)
    w.writerow(["section", "index", "x", "y", "x_exact", "y_exact"])
    for idx, (x, y) in enumerate(poly.vertices):
        w.writerow(["polygon", idx, format_value(float(x)), format_value(float(y)), str(x), str(y)])
    if args.ak_table:
        _require(args, "theta", "rho", "K")
        w.writerow(["section", "k", "a_k", "b_k", "a_k_minus_b_k", "theta_minus_rho_pow_k"])
        for k, a, b in theory.ak_bk_table(args.theta, args.rho, args.K, args.kmax):
            w.writerow(["ak_bk", k, format_value(a), format_value(b), format_value(a - b),
                        format_value((args.theta - args.rho) ** k)])
    if args.constants:
        _require(args, "theta", "rho", "K", "n")
        a, c, d = theory.expected_counts_k1(args.theta, args.rho, args.K, args.n)
        w.writerow(["section", "name", "value"])
        for name, val in (("a", a), ("c", c), ("d", d)):
            w.writerow(["constants", name, format_value(val)])
    _write_text(args.out, buf.getvalue())
    return 0


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


# --------------------------------------------------------------------------
# parser

def build_parser():
    p = _Parser(prog="awcd", description="Adaptive weights community detection.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True, jobs=False):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if jobs:
            sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--out", default="-", help="output path ('-' for stdout)")

    g = sub.add_parser("generate", help="sample a stochastic block model")
    g.add_argument("--n", type=int, default=100, help="block size")
    g.add_argument("--K", type=int, default=2)
    g.add_argument("--theta", type=float, default=0.5)
    g.add_argument("--rho", type=float, default=0.1)
    g.add_argument("--sizes", help="comma-separated block sizes (overrides --n/--K)")
    g.add_argument("--thetas", help="comma-separated within-block probabilities, one per block")
    g.add_argument("--labels-out")
    common(g)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("detect", help="run the detection procedure on an edge list")
    d.add_argument("graph")
    d.add_argument("--k", type=int, default=1)
    d.add_argument("--lambda", dest="lam", default="auto",
                   help="threshold, or 'auto' to maximise modularity over --lambda-grid")
    d.add_argument("--lambda-grid", default="auto:20")
    d.add_argument("--tie-break", choices=("smallest", "median"), default="smallest",
                   help="which of several lambdas with equal modularity to keep")
    d.add_argument("--variant", type=_variant, default=Variant.parse("debiased"))
    d.add_argument("--neighborhood", choices=("ring", "ball"), default="ring")
    d.add_argument("--iters", type=int, default=1)
    d.add_argument("--labels", help="ground-truth labels file; prints rand_index and exact_recovery")
    d.add_argument("--labels-out")
    d.add_argument("--dump-test-matrix", metavar="PATH")
    common(d, seed=False)
    d.set_defaults(func=cmd_detect)

    s = sub.add_parser("sweep", help="grid over (theta, rho, k, lambda, seed)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--K", type=int, default=2)
    s.add_argument("--theta", required=True, help="comma-separated")
    s.add_argument("--rho", required=True, help="comma-separated")
    s.add_argument("--k", default="1", help="comma-separated")
    s.add_argument("--lambda-grid", default="auto:20", help="start:stop:count, auto:count or a list")
    s.add_argument("--reps", type=int, default=1, help="replicates derived from --seed")
    s.add_argument("--variant", type=_variant, default=Variant.parse("debiased"))
    s.add_argument("--neighborhood", choices=("ring", "ball"), default="ring")
    s.add_argument("--no-timing", action="store_true", help="write 0 for wall time (byte-stable output)")
    common(s, jobs=True)
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("rate", help="minimal theta reaching a Rand threshold, per n")
    r.add_argument("--n", required=True, help="comma-separated block sizes")
    r.add_argument("--theta-grid", required=True, help="comma list or geom:start:stop:count")
    r.add_argument("--quotient", type=float, default=4.0)
    r.add_argument("--k", type=int, default=1)
    r.add_argument("--reps", type=int, default=10)
    r.add_argument("--threshold", type=float, default=0.95)
    r.add_argument("--lambda-grid", default="auto:20")
    r.add_argument("--variant", type=_variant, default=Variant.parse("debiased"))
    r.add_argument("--neighborhood", choices=("ring", "ball"), default="ring")
    common(r, jobs=True)
    r.set_defaults(func=cmd_rate)

    t = sub.add_parser("theory", help="consistency polygons and closed-form constants")
    t.add_argument("--variant", type=_variant, default=Variant.parse("debiased"))
    t.add_argument("--k", type=int, default=1)
    t.add_argument("--ak-table", action="store_true")
    t.add_argument("--constants", action="store_true")
    t.add_argument("--theta", type=float)
    t.add_argument("--rho", type=float)
    t.add_argument("--K", type=int)
    t.add_argument("--kmax", type=int, default=3)
    t.add_argument("--n", type=int, help="block size for --constants")
    common(t, seed=False)
    t.set_defaults(func=cmd_theory)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"awcd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError) as exc:
        print(f"awcd: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"awcd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
