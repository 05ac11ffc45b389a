"""Command-line experiment driver.

Exit status: 0 on success, 1 when a check finds a mismatch, 2 on a usage
error.
"""

import argparse
import sys

from ..cascade import GraphError, load_graph
from ..geometry import read_points
from .distributions import Distribution, trial_rng
from .experiments import (
    experiment_discrepancy_sum,
    experiment_graph_check,
    experiment_maxima_count,
    experiment_nn_check,
    experiment_nn_scaling,
    to_points,
)


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed {text} is not a u64")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _dist(text):
    try:
        return Distribution.parse(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="u64 seed (default 0)")
    common.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(
        prog="fraccascade",
        description="Experiments for discrepancy-sensitive fractional cascading.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("discrepancy", parents=[common],
                       help="sum of log2(delta) along a path of catalogs")
    p.add_argument("--dist", type=_dist, default=Distribution("uniform_square"),
                   metavar="KIND[:params]")
    p.add_argument("--k", type=int, default=64, help="path length in catalogs")
    p.add_argument("--n", type=_positive, default=4096, help="catalog size")
    p.add_argument("--queries", type=_positive, default=1000)

    p = sub.add_parser("maxima", parents=[common],
                       help="mean maxima count of uniform point sets vs H_n")
    p.add_argument("--n", type=_positive, nargs="+", default=[1024])
    p.add_argument("--trials", type=_positive, default=200)
    p.add_argument("--method", choices=("sweep", "xtree"), default="sweep")
    p.add_argument("--dist", type=_dist, default=Distribution("uniform_square"),
                   metavar="KIND[:params]")

    p = sub.add_parser("nn-scaling", parents=[common],
                       help="update/query timings and staircase sizes")
    p.add_argument("--n", type=_positive, nargs="+", default=[1024, 4096])
    p.add_argument("--trials", "--ops", dest="ops", type=_positive, default=100,
                   help="operations of each kind per n")
    p.add_argument("--dist", type=_dist, default=Distribution("uniform_square"),
                   metavar="KIND[:params]")
    p.add_argument("--p", type=float, default=2.0, help="Minkowski order")

    p = sub.add_parser("nn-check", parents=[common],
                       help="nearest neighbor vs linear scan on a dynamic set")
    p.add_argument("--points", metavar="FILE", help="x,y point file")
    p.add_argument("--dist", type=_dist, default=Distribution("uniform_square"),
                   metavar="KIND[:params]")
    p.add_argument("--n", type=_positive, default=1000,
                   help="points to generate when --points is absent")
    p.add_argument("--queries", type=_positive, default=100)

    p = sub.add_parser("graph-check", parents=[common],
                       help="load a graph file, audit bridges and path searches")
    p.add_argument("--graph", metavar="FILE", required=True)
    p.add_argument("--max-degree", type=_positive, default=3)
    p.add_argument("--queries", type=_positive, default=100)
    p.add_argument("--k", type=_positive, default=8, help="walk length of each query")
    return parser


def _emit(report, args):
    text = report.render(args.format)
    if args.out:
        with open(args.out, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    status = 0
    try:
        if args.command == "discrepancy":
            if args.k < 2:
                parser.error("--k must be at least 2")
            rep = experiment_discrepancy_sum(args.dist, args.k, args.n, args.queries,
                                             args.seed)
            agg = rep.aggregates()["all"]["log_delta_per_k"]
            print(f"discrepancy: mean sum(log2 delta)/k = {agg['mean']:.4f}, "
                  f"p99 = {agg['p99']:.4f}", file=sys.stderr)
        elif args.command == "maxima":
            rep = experiment_maxima_count(args.n, args.trials, args.seed,
                                          method=args.method, dist=args.dist)
            for n, agg in rep.aggregates().items():
                print(f"maxima n={n}: mean={agg['maxima']['mean']:.4f} "
                      f"H_n={agg['harmonic']:.4f} ratio={agg['ratio']:.4f}",
                      file=sys.stderr)
        elif args.command == "nn-scaling":
            rep = experiment_nn_scaling(args.n, args.ops, args.seed, dist=args.dist,
                                        metric=args.p)
        elif args.command == "nn-check":
            if args.points:
                pts = read_points(args.points)
            else:
                pts = to_points(args.dist.points(args.n, trial_rng(args.seed, 0)))
            rep = experiment_nn_check(pts, args.queries, args.seed)
            bad = sum(1 - r["match"] for r in rep.records)
            print(f"nn-check: {len(rep.records) - bad}/{len(rep.records)} match",
                  file=sys.stderr)
            status = 1 if bad else 0
        else:
            g = load_graph(args.graph, max_degree=args.max_degree, seed=args.seed)
            rep = experiment_graph_check(g, args.queries, args.seed, path_len=args.k)
            extra = rep.aggregates()["all"]
            bad = sum(1 - r["match"] for r in rep.records)
            print(f"graph-check: bridge mismatches={extra['bridge_mismatches']} "
                  f"monotone={extra['monotone']} query mismatches={bad}",
                  file=sys.stderr)
            status = 1 if bad or extra["bridge_mismatches"] or not extra["monotone"] else 0
    except (OSError, GraphError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    _emit(rep, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
