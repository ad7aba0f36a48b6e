"""Command-line interface.

Subcommands: cluster, spectrum, gen-sbm, gen-hsbm, kernel-graph, bench,
verify. Edge lists are whitespace-separated "u v w" lines with '#' comments;
generated graphs come with a "vertex label" sidecar.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import algorithms as alg
from .bench import bench_matrix, verify_suite, write_records_csv, write_records_jsonl
from .errors import ConfigParseError, GraphHCError
from .generators import gaussian_kernel_graph, gen_hsbm, gen_sbm
from .graph import read_edge_list, write_edge_list, write_labels
from .spectral import bottom_eigs
from .tree import tree_to_json


def _add_cluster(sub):
    p = sub.add_parser("cluster", help="build an HC tree for an edge-list graph")
    p.add_argument("--input", required=True, help="edge list file (u v w per line)")
    p.add_argument("--algo", default="specwrsc",
                   choices=["specwrsc", "caterpillar", "avglink", "balanced"])
    p.add_argument("--k", type=int, default=2, help="number of clusters")
    p.add_argument("--gamma", type=float, default=None,
                   help="weight-spread exponent (default: derived from data)")
    p.add_argument("--eta", type=float, default=None,
                   help="degree-ratio bound for the caterpillar variant")
    p.add_argument("--k-sweep", type=int, default=None, metavar="MAX",
                   help="run k'=1..MAX and keep the cheapest tree")
    p.add_argument("--eta-sweep", action="store_true",
                   help="sweep eta over powers of two (caterpillar only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-tree", default=None, metavar="FILE.json")
    p.add_argument("--emit-cost", action="store_true",
                   help="print the Dasgupta cost to stdout")
    p.add_argument("--merge-duplicates", action="store_true",
                   help="sum repeated undirected edges instead of rejecting them")
    p.add_argument("--dump-buckets", default=None, metavar="FILE.json",
                   help="write bucket membership (use '-' for stdout)")


def _cmd_cluster(args) -> int:
    g = read_edge_list(args.input, merge_duplicates=args.merge_duplicates)
    chosen = {}
    run = None
    if args.k_sweep is not None:
        tree, cost, k = alg.k_sweep(g, args.k_sweep, algorithm=args.algo,
                                    seed=args.seed, gamma=args.gamma, eta=args.eta)
        chosen["k"] = k
    elif args.eta_sweep:
        tree, cost, eta = alg.eta_sweep(g, args.k, seed=args.seed)
        chosen["eta"] = eta
    else:
        cfg = alg.AlgoConfig(k=args.k, gamma=args.gamma, eta=args.eta,
                             seed=args.seed, algorithm=args.algo)
        run = alg.run_algorithm(g, cfg)
        tree, cost = run.tree, run.cost

    if args.output_tree:
        with open(args.output_tree, "w", encoding="utf-8") as fh:
            fh.write(tree_to_json(tree))
            fh.write("\n")
    if args.dump_buckets is not None:
        payload = []
        if run is not None and run.bucketings:
            for bg in run.bucketings:
                payload.append({
                    "cluster": bg.cluster_index,
                    "anchor": bg.anchor,
                    "beta": bg.beta,
                    "buckets": [{"exponent": b.exponent,
                                 "vertices": [int(v) for v in b.vertices]}
                                for b in bg.buckets],
                })
        text = json.dumps(payload, sort_keys=True)
        if args.dump_buckets == "-":
            print(text)
        else:
            with open(args.dump_buckets, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
    if args.emit_cost:
        print(repr(cost))
    elif chosen:
        print(json.dumps(chosen), file=sys.stderr)
    return 0


def _add_spectrum(sub):
    p = sub.add_parser("spectrum", help="print the bottom k+1 eigenvalues and the gap")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--merge-duplicates", action="store_true")


def _cmd_spectrum(args) -> int:
    g = read_edge_list(args.input, merge_duplicates=args.merge_duplicates)
    report = bottom_eigs(g, min(args.k + 1, g.n), tol=args.tol, seed=args.seed)
    print(json.dumps({
        "n": g.n,
        "m": g.m,
        "k": args.k,
        "eigenvalues": [float(x) for x in report.eigenvalues],
        "gap": report.gap,
    }, sort_keys=True))
    return 0


def _add_gen_sbm(sub):
    p = sub.add_parser("gen-sbm", help="sample a stochastic block model graph")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="edge list output path")
    p.add_argument("--labels", default=None, help="planted-label sidecar path")


def _cmd_gen_sbm(args) -> int:
    g, parts = gen_sbm(args.k, args.n_k, args.p, args.q, seed=args.seed)
    write_edge_list(g, args.output)
    if args.labels:
        write_labels(parts.labels, args.labels)
    return 0


def _add_gen_hsbm(sub):
    p = sub.add_parser("gen-hsbm", help="sample the 5-block hierarchical SBM")
    p.add_argument("--n-k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q-min", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--labels", default=None)


def _cmd_gen_hsbm(args) -> int:
    g, parts = gen_hsbm(args.n_k, args.p, args.q_min, seed=args.seed)
    write_edge_list(g, args.output)
    if args.labels:
        write_labels(parts.labels, args.labels)
    return 0


def _add_kernel(sub):
    p = sub.add_parser("kernel-graph",
                       help="Gaussian similarity graph from a CSV of coordinates")
    p.add_argument("--points", required=True, help="CSV file, one point per row")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--threshold", type=float, default=1e-12)
    p.add_argument("--output", required=True)


def _cmd_kernel(args) -> int:
    pts = np.loadtxt(args.points, delimiter=",", ndmin=2)
    g = gaussian_kernel_graph(pts, args.sigma, args.threshold)
    write_edge_list(g, args.output)
    return 0


def _add_bench(sub):
    p = sub.add_parser("bench", help="run an experiment matrix from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-csv", default=None)
    p.add_argument("--output-jsonl", default=None)
    p.add_argument("--summary", default=None, help="summary JSON output path")


def _cmd_bench(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParseError(f"cannot read config {args.config}: {exc}") from exc
    records, summary = bench_matrix(config)
    if args.output_csv:
        write_records_csv(records, args.output_csv)
    if args.output_jsonl:
        write_records_jsonl(records, args.output_jsonl)
    text = json.dumps(summary, sort_keys=True, indent=2)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 1 if summary.get("errors") else 0


def _add_verify(sub):
    p = sub.add_parser("verify", help="run the oracle and invariant checks")
    p.add_argument("--quick", action="store_true", help="subset finishing under a minute")
    p.add_argument("--seed", type=int, default=0)


def _cmd_verify(args) -> int:
    report = verify_suite(quick=args.quick, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="graphhc",
        description="Hierarchical clustering for well-clustered graphs")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_cluster(sub)
    _add_spectrum(sub)
    _add_gen_sbm(sub)
    _add_gen_hsbm(sub)
    _add_kernel(sub)
    _add_bench(sub)
    _add_verify(sub)
    args = parser.parse_args(argv)
    handlers = {
        "cluster": _cmd_cluster,
        "spectrum": _cmd_spectrum,
        "gen-sbm": _cmd_gen_sbm,
        "gen-hsbm": _cmd_gen_hsbm,
        "kernel-graph": _cmd_kernel,
        "bench": _cmd_bench,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except GraphHCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
