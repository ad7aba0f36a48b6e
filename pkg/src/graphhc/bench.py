"""Experiment harness and the self-verification suite.

``bench_matrix`` runs a (graphs x algorithms x seeds) matrix from a JSON
config, timing only the algorithm itself (graph generation and I/O excluded,
the eigensolve included), and emits one record per cell plus per-(graph,
algo) aggregates with costs normalized by the spec_wrsc mean.

``verify_suite`` re-runs the library's oracle-equivalence and invariant
checks and reports pass/fail per check with a counterexample on failure.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import algorithms as alg
from .bucketing import bucket_count_bound_check, bucket_from_max_volume
from .errors import ConfigParseError, GraphHCError, GraphLoadError
from .generators import gaussian_kernel_graph, gen_hsbm, gen_sbm
from .graph import (
    Graph,
    Partition,
    build_graph,
    contract,
    graph_conductance_exact,
    is_connected,
    read_edge_list,
    weighted_sparsity,
)
from .spectral import bottom_eigs, sweep_cut
from .tree import (
    brute_force_opt,
    brute_force_wopt,
    dasgupta_cost,
    dasgupta_cost_naive,
)
from .wrsc import min_sparsity_cut, wrsc_tree

CSV_HEADER = "graph,n,m,algo,k,seed,cost,wall_time_s,depth,buckets,contracted_n"


@dataclass
class RunRecord:
    """One cell of the experiment matrix."""

    graph: str
    n: int
    m: int
    algo: str
    k: int
    seed: int
    cost: float
    wall_time_s: float
    depth: int
    buckets: int
    contracted_n: int
    config: dict = field(default_factory=dict)

    def csv_row(self) -> str:
        return (f"{self.graph},{self.n},{self.m},{self.algo},{self.k},{self.seed},"
                f"{self.cost!r},{self.wall_time_s!r},{self.depth},{self.buckets},"
                f"{self.contracted_n}")

    def json_dict(self) -> dict:
        return {
            "graph": self.graph, "n": self.n, "m": self.m, "algo": self.algo,
            "k": self.k, "seed": self.seed, "cost": self.cost,
            "wall_time_s": self.wall_time_s, "depth": self.depth,
            "buckets": self.buckets, "contracted_n": self.contracted_n,
            "config": self.config,
        }


def _build_cell_graph(spec: dict, seed: int) -> Graph:
    kind = spec.get("type")
    try:
        if kind == "sbm":
            g, _ = gen_sbm(int(spec["k"]), int(spec["n_k"]), float(spec["p"]),
                           float(spec["q"]), seed=seed)
            return g
        if kind == "hsbm":
            g, _ = gen_hsbm(int(spec["n_k"]), float(spec["p"]),
                            float(spec["q_min"]), seed=seed)
            return g
        if kind == "edgelist":
            return read_edge_list(spec["path"],
                                  merge_duplicates=bool(spec.get("merge_duplicates", False)))
        if kind == "kernel_csv":
            pts = np.loadtxt(spec["path"], delimiter=",", ndmin=2)
            return gaussian_kernel_graph(pts, float(spec["sigma"]),
                                         float(spec.get("threshold", 1e-12)))
    except GraphHCError:
        raise
    except (OSError, KeyError, TypeError) as exc:
        raise GraphLoadError(f"cannot load graph {spec!r}: {exc}") from exc
    raise ConfigParseError(f"unknown graph type {kind!r}")


def _graph_name(spec: dict, index: int) -> str:
    return str(spec.get("name", f"graph{index}"))


def run_cell(graph_name: str, g: Graph, algo_spec: dict, seed: int) -> RunRecord:
    """Run one algorithm on one graph; only the algorithm is timed."""
    tag = alg.canonical_algorithm(str(algo_spec.get("algo", "spec_wrsc")))
    k = int(algo_spec.get("k", 2))
    cfg = alg.AlgoConfig(
        k=k,
        gamma=algo_spec.get("gamma"),
        eta=algo_spec.get("eta"),
        seed=seed,
        algorithm=tag,
    )
    t0 = time.perf_counter()
    run = alg.run_algorithm(g, cfg)
    wall = time.perf_counter() - t0
    return RunRecord(
        graph=graph_name, n=g.n, m=g.m, algo=tag, k=k, seed=seed,
        cost=run.cost, wall_time_s=wall, depth=run.depth,
        buckets=run.n_buckets, contracted_n=run.contracted_n,
        config={"gamma": cfg.gamma, "eta": cfg.eta},
    )


def _aggregate(records: list[RunRecord]) -> dict:
    cells: dict[tuple[str, str], list[RunRecord]] = {}
    for rec in records:
        cells.setdefault((rec.graph, rec.algo), []).append(rec)
    base: dict[str, float] = {}
    for (graph, algo), recs in cells.items():
        if algo == "spec_wrsc":
            base[graph] = float(np.mean([r.cost for r in recs]))
    table = []
    for (graph, algo), recs in sorted(cells.items()):
        costs = np.asarray([r.cost for r in recs], dtype=np.float64)
        times = np.asarray([r.wall_time_s for r in recs], dtype=np.float64)
        row = {
            "graph": graph, "algo": algo, "runs": len(recs),
            "cost_mean": float(costs.mean()),
            "cost_std": float(costs.std(ddof=0)),
            "wall_time_mean_s": float(times.mean()),
        }
        if graph in base and base[graph] > 0:
            row["cost_normalized"] = float(costs.mean() / base[graph])
        table.append(row)
    return {"cells": table}


def fit_runtime_slope(records: list[RunRecord], algo: str = "spec_wrsc") -> float | None:
    """Least-squares slope of log(wall time) against log(edge count)."""
    pts = [(r.m, r.wall_time_s) for r in records
           if r.algo == algo and r.m > 0 and r.wall_time_s > 0]
    if len(pts) < 2:
        return None
    x = np.log(np.asarray([p[0] for p in pts], dtype=np.float64))
    y = np.log(np.asarray([p[1] for p in pts], dtype=np.float64))
    slope = float(np.polyfit(x, y, 1)[0])
    return slope


def bench_matrix(config: dict) -> tuple[list[RunRecord], dict]:
    """Run the full experiment matrix described by a config dict.

    Config keys: ``graphs`` (list of graph specs), ``algorithms`` (list of
    algorithm specs), ``seeds`` (list of ints). Generated graphs are
    regenerated per seed. Returns (records, summary); summary includes
    per-cell aggregates, normalized costs, the fitted runtime slope when
    requested, and any cell errors.
    """
    if not isinstance(config, dict):
        raise ConfigParseError("config must be a JSON object")
    for key in ("graphs", "algorithms"):
        if key not in config or not isinstance(config[key], list) or not config[key]:
            raise ConfigParseError(f"config needs a nonempty {key!r} list")
    seeds = config.get("seeds", [0])
    if not isinstance(seeds, list) or not seeds:
        raise ConfigParseError("config key 'seeds' must be a nonempty list")

    records: list[RunRecord] = []
    errors: list[dict] = []
    for gi, gspec in enumerate(config["graphs"]):
        name = _graph_name(gspec, gi)
        for seed in seeds:
            seed = int(seed)
            try:
                g = _build_cell_graph(gspec, seed)
            except GraphHCError as exc:
                errors.append({"graph": name, "seed": seed, "error": str(exc)})
                continue
            for aspec in config["algorithms"]:
                try:
                    records.append(run_cell(name, g, aspec, seed))
                except GraphHCError as exc:
                    errors.append({"graph": name, "seed": seed,
                                   "algo": str(aspec.get("algo")), "error": str(exc)})
    summary = _aggregate(records)
    summary["errors"] = errors
    if config.get("fit_runtime_slope"):
        summary["runtime_slope"] = fit_runtime_slope(records)
    return records, summary


def write_records_csv(records: list[RunRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def write_records_jsonl(records: list[RunRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.json_dict(), sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# verification suite


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class VerifyReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _random_connected_graph(rng: np.random.Generator, n: int,
                            weighted: bool = True) -> Graph:
    """Random spanning tree plus extra edges; weights in (0.5, 3.0]."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges[(u, v)] = 1.0
    extra = int(rng.integers(0, n * (n - 1) // 2 - (n - 1) + 1))
    for _ in range(extra):
        a = int(rng.integers(0, n))
        b = int(rng.integers(0, n))
        if a != b:
            edges[(min(a, b), max(a, b))] = 1.0
    out = []
    for (u, v) in sorted(edges):
        w = 0.5 + 2.5 * float(rng.random()) if weighted else 1.0
        out.append((u, v, w))
    return build_graph(out, n_vertices=n)


def _random_tree(rng: np.random.Generator, n: int):
    """Uniform-ish random binary tree by random merge order."""
    from .tree import TreeBuilder
    builder = TreeBuilder()
    nodes = [builder.leaf(v) for v in range(n)]
    while len(nodes) > 1:
        i = int(rng.integers(0, len(nodes)))
        a = nodes.pop(i)
        j = int(rng.integers(0, len(nodes)))
        b = nodes.pop(j)
        nodes.append(builder.internal(a, b))
    return builder.build(nodes[0])


def _random_contracted(rng: np.random.Generator, k: int):
    from .graph import ContractedGraph
    weight = np.zeros((k, k), dtype=np.float64)
    for i in range(k):
        for j in range(i + 1, k):
            if rng.random() < 0.7:
                weight[i, j] = weight[j, i] = float(np.round(rng.random() * 4 + 0.1, 3))
    vw = rng.integers(1, 6, size=k).astype(np.int64)
    return ContractedGraph(vertex_weight=vw, weight=weight)


def check_cost_oracle(trials: int = 100, seed: int = 0) -> CheckResult:
    """Fast Dasgupta-cost path equals the naive ancestor-set oracle exactly."""
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(2, 33))
        g = _random_connected_graph(rng, n)
        tree = _random_tree(rng, n)
        fast = dasgupta_cost(g, tree)
        slow = dasgupta_cost_naive(g, tree)
        if fast != slow:
            return CheckResult("dasgupta-cost-oracle", False,
                               f"trial {t}: fast={fast!r} naive={slow!r} (n={n})")
    return CheckResult("dasgupta-cost-oracle", True)


def check_wrsc_exactness(trials: int = 60, seed: int = 1) -> CheckResult:
    """Enumerated sparsest cut matches an independent double loop bit for bit."""
    rng = np.random.default_rng(seed)
    from itertools import combinations
    for t in range(trials):
        k = int(rng.integers(2, 10))
        h = _random_contracted(rng, k)
        side, sp = min_sparsity_cut(h)
        best = math.inf
        for size in range(1, k):
            for comb in combinations(range(1, k), size - 1):
                members = (0,) + comb
                val = weighted_sparsity(h, members)
                if val < best:
                    best = val
        if sp != best:
            return CheckResult("wrsc-exactness", False,
                               f"trial {t}: enumerated {sp!r} vs oracle {best!r}")
    return CheckResult("wrsc-exactness", True)


def check_cheeger(trials: int = 20, seed: int = 2) -> CheckResult:
    """lambda_2 / 2 <= conductance <= sqrt(2 lambda_2) on random graphs."""
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(4, 13))
        g = _random_connected_graph(rng, n)
        phi, _ = graph_conductance_exact(g)
        lam2 = float(bottom_eigs(g, 2).eigenvalues[1])
        if not (lam2 / 2.0 - 1e-9 <= phi <= math.sqrt(max(0.0, 2.0 * lam2)) + 1e-9):
            return CheckResult("cheeger-sandwich", False,
                               f"trial {t}: lambda2={lam2} phi={phi}")
    return CheckResult("cheeger-sandwich", True)


def check_sweep_cut(trials: int = 10, seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(4, 13))
        g = _random_connected_graph(rng, n)
        lam2 = float(bottom_eigs(g, 2).eigenvalues[1])
        _, phi = sweep_cut(g)
        if phi > math.sqrt(max(0.0, 2.0 * lam2)) + 1e-6:
            return CheckResult("sweep-cut-bound", False,
                               f"trial {t}: phi={phi} bound={math.sqrt(2 * lam2)}")
    return CheckResult("sweep-cut-bound", True)


def check_opt_bounds(trials: int = 25, seed: int = 4) -> CheckResult:
    """Brute-force OPT respects the degree lower bound and Fact-style cap."""
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(3, 8))
        g = _random_connected_graph(rng, n)
        tree, opt = brute_force_opt(g)
        phi, _ = graph_conductance_exact(g)
        dmax = float(g.degree.max())
        dmin = float(g.degree.min())
        lower = (2.0 * phi / 9.0) * max(g.total_volume ** 2 / dmax, dmin * n * n)
        if opt < lower * (1.0 - 1e-9):
            return CheckResult("degree-lower-bound", False,
                               f"trial {t}: OPT={opt} < bound={lower}")
        if opt > n * g.total_volume / 2.0 + 1e-9:
            return CheckResult("degree-lower-bound", False,
                               f"trial {t}: OPT={opt} above trivial cap")
    return CheckResult("degree-lower-bound", True)


def _connected_sbm(k: int, n_k: int, p: float, q: float, seed: int) -> Graph:
    for attempt in range(5):
        g, _ = gen_sbm(k, n_k, p, q, seed=seed + 1000 * attempt)
        if is_connected(g):
            return g
    raise GraphHCError(f"no connected SBM(k={k}, n_k={n_k}) in 5 attempts")


def check_crossing_identity(run_args=None, seed: int = 5,
                            corrupt=None) -> CheckResult:
    """Crossing-edge cost equals the weighted cost on the contracted graph.

    ``corrupt`` (tests only) mutates the run before checking, to demonstrate
    that a broken size attribute is caught with a concrete edge witness.
    """
    g = _connected_sbm(3, 12, 0.6, 0.05, seed=seed)
    cfg = alg.AlgoConfig(k=3, seed=seed)
    run = alg.spec_wrsc_full(g, cfg)
    if corrupt is not None:
        corrupt(run)
    lhs, rhs = alg.crossing_cost_identity(g, run)
    tol = 1e-9 * g.total_volume
    if abs(lhs - rhs) > tol:
        lab = alg.bucket_labels(g, run)
        witness = None
        for u, v in zip(g.edge_u, g.edge_v):
            if lab[u] != lab[v]:
                witness = (int(u), int(v))
                break
        return CheckResult("crossing-cost-identity", False,
                           f"|{lhs} - {rhs}| > {tol}; first crossing edge {witness}")
    tot, recomposed = alg.decomposition_identity(g, run)
    if tot != recomposed:
        return CheckResult("crossing-cost-identity", False,
                           f"decomposition {tot!r} != {recomposed!r}")
    return CheckResult("crossing-cost-identity", True)


def check_bucket_bound(seed: int = 6, quick: bool = False) -> CheckResult:
    """Total bucket count stays within k + ceil(log2 n) under auto gamma."""
    cases = [(3, 20, 0.5, 0.02), (5, 40, 0.3, 0.01)]
    if not quick:
        cases.append((5, 100, 0.1, 0.002))
    for k, n_k, p, q in cases:
        g = _connected_sbm(k, n_k, p, q, seed=seed)
        cfg = alg.AlgoConfig(k=k, seed=seed)
        run = alg.spec_wrsc_full(g, cfg)
        if not bucket_count_bound_check(run.bucketings, k, g.n):
            return CheckResult("bucket-count-bound", False,
                               f"SBM(k={k}, n_k={n_k}): {run.n_buckets} buckets")
    return CheckResult("bucket-count-bound", True)


def check_bucket_argmax(trials: int = 40, seed: int = 7) -> CheckResult:
    """Two-pointer max-volume anchor matches the quadratic evaluation."""
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(3, 16))
        g = _random_connected_graph(rng, n)
        beta = 1.5 + 2.0 * float(rng.random())
        bg = bucket_from_max_volume(g, np.arange(n), beta)
        best_vol = -1.0
        for u in range(n):
            du = float(g.degree[u])
            vol = sum(float(g.degree[v]) for v in range(n)
                      if du <= float(g.degree[v]) < beta * du)
            best_vol = max(best_vol, vol)
        got = sum(float(g.degree[v]) for v in range(n)
                  if float(g.degree[bg.anchor]) <= float(g.degree[v])
                  < beta * float(g.degree[bg.anchor]))
        if got < best_vol:
            return CheckResult("bucket-argmax", False,
                               f"trial {t}: anchor volume {got} < best {best_vol}")
    return CheckResult("bucket-argmax", True)


def check_contraction_conservation(trials: int = 40, seed: int = 8) -> CheckResult:
    rng = np.random.default_rng(seed)
    for t in range(trials):
        n = int(rng.integers(3, 16))
        g = _random_connected_graph(rng, n)
        k = int(rng.integers(2, n + 1))
        labels = rng.integers(0, k, size=n)
        labels[rng.permutation(n)[:k]] = np.arange(k)  # every label occupied
        parts = Partition.from_labels(labels)
        h = contract(g, parts)
        internal = math.fsum(
            w for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w)
            if labels[u] == labels[v])
        total = math.fsum(g.edge_w.tolist())
        crossing = h.total_edge_weight()
        if abs(crossing - (total - internal)) > 1e-12 * max(1.0, total):
            return CheckResult("contraction-conservation", False,
                               f"trial {t}: {crossing} vs {total - internal}")
        if h.total_vertex_weight != n:
            return CheckResult("contraction-conservation", False,
                               f"trial {t}: vertex weights sum to {h.total_vertex_weight}")
    return CheckResult("contraction-conservation", True)


def check_wrsc_vs_wopt(trials: int = 30, seed: int = 9) -> CheckResult:
    """WRSC cost within 6x of the exhaustive weighted optimum on small inputs."""
    rng = np.random.default_rng(seed)
    from .tree import weighted_dasgupta_cost
    for t in range(trials):
        k = int(rng.integers(2, 7))
        h = _random_contracted(rng, k)
        tree = wrsc_tree(h)
        got = weighted_dasgupta_cost(h, tree)
        _, wopt = brute_force_wopt(h)
        if got > 6.0 * wopt + 1e-9:
            return CheckResult("wrsc-approximation", False,
                               f"trial {t}: WCOST={got} WOPT={wopt}")
    return CheckResult("wrsc-approximation", True)


def verify_suite(quick: bool = False, seed: int = 0) -> VerifyReport:
    """Run every oracle-equivalence and invariant check; failures carry
    counterexamples. ``quick`` shrinks trial counts to finish within a
    minute."""
    f = 0.3 if quick else 1.0
    checks = [
        check_cost_oracle(trials=max(10, int(100 * f)), seed=seed),
        check_wrsc_exactness(trials=max(10, int(60 * f)), seed=seed + 1),
        check_cheeger(trials=max(5, int(20 * f)), seed=seed + 2),
        check_sweep_cut(trials=max(4, int(10 * f)), seed=seed + 3),
        check_opt_bounds(trials=max(8, int(25 * f)), seed=seed + 4),
        check_crossing_identity(seed=seed + 5),
        check_bucket_bound(seed=seed + 6, quick=quick),
        check_bucket_argmax(trials=max(10, int(40 * f)), seed=seed + 7),
        check_contraction_conservation(trials=max(10, int(40 * f)), seed=seed + 8),
        check_wrsc_vs_wopt(trials=max(8, int(30 * f)), seed=seed + 9),
    ]
    return VerifyReport(checks=checks)
