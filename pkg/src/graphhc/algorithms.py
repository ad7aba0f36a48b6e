"""Top-level hierarchical clustering algorithms and parameter sweeps.

Two pipelines share the same first steps (spectral clustering, then degree
bucketing, then a balanced tree per bucket) and differ in how bucket trees
are merged: ``spec_wrsc`` contracts the buckets and merges along recursive
sparsest cuts of the contracted graph, ``spec_caterpillar`` chains the bucket
trees smallest-first. Both return the tree together with its Dasgupta cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bucketing import (
    Bucketing,
    bucket_from_max_volume,
    bucket_from_min_degree,
    derive_gamma,
)
from .errors import BadBetaError, GraphHCError, KTooLargeError
from .graph import ContractedGraph, Graph, Partition, contract, require_connected
from .spectral import spectral_clustering
from .tree import (
    HCTree,
    TreeBuilder,
    _copy_into,
    average_linkage,
    balanced_tree,
    caterpillar_merge,
    dasgupta_cost,
    edge_cost_terms,
    weighted_dasgupta_cost,
)
from .wrsc import wrsc_tree

ALGORITHM_TAGS = ("spec_wrsc", "spec_caterpillar", "average_linkage", "balanced_random")

# CLI spellings accepted everywhere
_ALIASES = {
    "specwrsc": "spec_wrsc",
    "caterpillar": "spec_caterpillar",
    "avglink": "average_linkage",
    "balanced": "balanced_random",
}

# beyond this exponent 2^x overflows float64; treat beta as +inf
_LOG2_BETA_OVERFLOW = 1020.0


def canonical_algorithm(tag: str) -> str:
    tag = tag.strip().lower().replace("-", "_")
    tag = _ALIASES.get(tag, tag)
    if tag not in ALGORITHM_TAGS:
        raise GraphHCError(f"unknown algorithm tag {tag!r}")
    return tag


@dataclass
class AlgoConfig:
    """Configuration shared by the clustering algorithms.

    ``gamma`` and ``eta`` default to automatic derivation (gamma from the
    weight spread, eta via the sweep). Everything randomized is seeded.
    """

    k: int
    gamma: float | None = None
    eta: float | None = None
    seed: int = 0
    algorithm: str = "spec_wrsc"

    def __post_init__(self):
        if self.k < 1:
            raise GraphHCError(f"k must be >= 1, got {self.k}")
        if self.gamma is not None and self.gamma < 1.0:
            raise GraphHCError(f"gamma must be >= 1 when set, got {self.gamma}")
        if self.eta is not None and not self.eta > 1.0:
            raise BadBetaError(f"eta must exceed 1 when set, got {self.eta}")
        self.algorithm = canonical_algorithm(self.algorithm)


@dataclass
class HCRun:
    """Full record of one algorithm run (the tree plus its intermediates)."""

    algorithm: str
    tree: HCTree
    cost: float
    k: int
    seed: int
    clusters: Partition | None = None
    bucketings: list[Bucketing] = field(default_factory=list)
    bucket_parts: list[np.ndarray] = field(default_factory=list)
    bucket_trees: list[HCTree] = field(default_factory=list)
    contracted: ContractedGraph | None = None
    contracted_tree: HCTree | None = None
    beta: float | None = None
    gamma: float | None = None
    eta: float | None = None

    @property
    def n_buckets(self) -> int:
        return len(self.bucket_parts)

    @property
    def contracted_n(self) -> int:
        return self.contracted.k if self.contracted is not None else self.n_buckets

    @property
    def depth(self) -> int:
        return self.tree.max_depth

    @property
    def wrsc_depth(self) -> int:
        return self.contracted_tree.max_depth if self.contracted_tree is not None else 0


def _beta_from_k_gamma(k: int, gamma: float) -> float:
    log2_beta = k * (gamma + 1.0)
    if log2_beta >= _LOG2_BETA_OVERFLOW:
        return math.inf
    return 2.0 ** log2_beta


def _cluster_buckets(g: Graph, clusters: Partition, beta: float,
                     variant: str) -> list[Bucketing]:
    out = []
    for i, part in enumerate(clusters.parts):
        if variant == "min_degree":
            out.append(bucket_from_min_degree(g, part, beta, cluster_index=i))
        else:
            out.append(bucket_from_max_volume(g, part, beta, cluster_index=i))
    return out


def _bucket_trees(g: Graph, bucketings: list[Bucketing]) -> tuple[list[np.ndarray], list[HCTree]]:
    parts, trees = [], []
    for bg in bucketings:
        for bucket in bg.buckets:
            parts.append(bucket.vertices)
            trees.append(balanced_tree(bucket.vertices))  # degree-ascending order
    return parts, trees


def spec_wrsc_full(g: Graph, cfg: AlgoConfig) -> HCRun:
    """Spectral clustering, min-degree bucketing, contraction, and WRSC merge."""
    require_connected(g, "spec_wrsc")
    if cfg.k < 2 or cfg.k > g.n:
        raise KTooLargeError(f"k={cfg.k} not in [2, {g.n}]")
    gamma = cfg.gamma if cfg.gamma is not None else derive_gamma(g)
    beta = _beta_from_k_gamma(cfg.k, gamma)
    clusters = spectral_clustering(g, cfg.k, seed=cfg.seed)
    bucketings = _cluster_buckets(g, clusters, beta, "min_degree")
    parts, trees = _bucket_trees(g, bucketings)
    contracted = contract(g, Partition.from_parts(parts, g.n))
    ctree = wrsc_tree(contracted)

    # splice each bucket tree into the leaf holding its contracted vertex
    builder = TreeBuilder()
    replace = {}
    table = ctree.leaf_node_of()
    for b, btree in enumerate(trees):
        replace[int(table[b])] = _copy_into(builder, btree)
    root = _copy_into(builder, ctree, replace=replace)
    tree = builder.build(root)
    cost = dasgupta_cost(g, tree)
    return HCRun(algorithm="spec_wrsc", tree=tree, cost=cost, k=cfg.k, seed=cfg.seed,
                 clusters=clusters, bucketings=bucketings, bucket_parts=parts,
                 bucket_trees=trees, contracted=contracted, contracted_tree=ctree,
                 beta=beta, gamma=gamma)


def spec_wrsc(g: Graph, cfg: AlgoConfig) -> tuple[HCTree, float]:
    run = spec_wrsc_full(g, cfg)
    return run.tree, run.cost


def spec_caterpillar_full(g: Graph, cfg: AlgoConfig) -> HCRun:
    """Spectral clustering, max-volume bucketing, caterpillar merge."""
    require_connected(g, "spec_caterpillar")
    if cfg.k < 2 or cfg.k > g.n:
        raise KTooLargeError(f"k={cfg.k} not in [2, {g.n}]")
    if cfg.eta is None:
        raise BadBetaError("spec_caterpillar needs eta; set it or use eta_sweep")
    beta = float(cfg.eta)
    clusters = spectral_clustering(g, cfg.k, seed=cfg.seed)
    bucketings = _cluster_buckets(g, clusters, beta, "max_volume")
    parts, trees = _bucket_trees(g, bucketings)
    # ascending leaf count; stable sort keeps bucket construction order on ties
    order = sorted(range(len(trees)), key=lambda i: trees[i].n_leaves)
    tree = caterpillar_merge([trees[i] for i in order])
    cost = dasgupta_cost(g, tree)
    return HCRun(algorithm="spec_caterpillar", tree=tree, cost=cost, k=cfg.k,
                 seed=cfg.seed, clusters=clusters, bucketings=bucketings,
                 bucket_parts=parts, bucket_trees=trees, beta=beta, eta=beta)


def spec_caterpillar(g: Graph, cfg: AlgoConfig) -> tuple[HCTree, float]:
    run = spec_caterpillar_full(g, cfg)
    return run.tree, run.cost


def degree_sorted_balanced(g: Graph) -> HCTree:
    """Balanced tree over all vertices in (degree, id) order (the k=1 path)."""
    order = np.lexsort((np.arange(g.n), g.degree))
    return balanced_tree(order)


def balanced_random(g: Graph, seed: int = 0) -> HCTree:
    """Baseline: balanced tree over a seeded random vertex order."""
    order = np.random.default_rng(seed).permutation(g.n)
    return balanced_tree(order)


def run_algorithm(g: Graph, cfg: AlgoConfig) -> HCRun:
    """Dispatch on cfg.algorithm; baselines produce bare HCRun records."""
    algo = canonical_algorithm(cfg.algorithm)
    if algo == "spec_wrsc":
        return spec_wrsc_full(g, cfg)
    if algo == "spec_caterpillar":
        if cfg.eta is None:
            tree, cost, eta = eta_sweep(g, cfg.k, seed=cfg.seed)
            return HCRun(algorithm=algo, tree=tree, cost=cost, k=cfg.k,
                         seed=cfg.seed, eta=eta)
        return spec_caterpillar_full(g, cfg)
    if algo == "average_linkage":
        tree = average_linkage(g)
    else:
        tree = balanced_random(g, seed=cfg.seed)
    return HCRun(algorithm=algo, tree=tree, cost=dasgupta_cost(g, tree),
                 k=cfg.k, seed=cfg.seed)


def k_sweep(g: Graph, k_max: int, algorithm: str = "spec_wrsc", seed: int = 0,
            gamma: float | None = None, eta: float | None = None) -> tuple[HCTree, float, int]:
    """Run the algorithm for k' = 1..k_max and keep the cheapest tree.

    k' = 1 bypasses spectral clustering (the eigengap is undefined there) and
    produces a balanced tree over the degree-sorted vertices. Ties prefer the
    smaller k'.
    """
    if k_max < 1:
        raise GraphHCError(f"k_max must be >= 1, got {k_max}")
    algorithm = canonical_algorithm(algorithm)
    best: tuple[HCTree, float, int] | None = None
    for k in range(1, min(k_max, g.n) + 1):
        if k == 1:
            tree = degree_sorted_balanced(g)
            cost = dasgupta_cost(g, tree)
        else:
            cfg = AlgoConfig(k=k, gamma=gamma, eta=eta, seed=seed, algorithm=algorithm)
            run = run_algorithm(g, cfg)
            tree, cost = run.tree, run.cost
        if best is None or cost < best[1]:
            best = (tree, cost, k)
    return best


def eta_sweep_values(g: Graph) -> list[float]:
    """Candidate eta values 2^i for i spanning [ceil(log2 min-degree),
    ceil(log2 max-degree)], restricted to values > 1, plus +inf."""
    values: list[float] = []
    dmin = float(g.degree.min()) if g.n else 0.0
    dmax = float(g.degree.max()) if g.n else 0.0
    if dmin > 0.0:
        lo = math.ceil(math.log2(dmin))
        hi = math.ceil(math.log2(dmax))
        for i in range(lo, hi + 1):
            eta = 2.0 ** i
            if eta > 1.0:
                values.append(eta)
    values.append(math.inf)
    return values


def eta_sweep(g: Graph, k: int, seed: int = 0) -> tuple[HCTree, float, float]:
    """Run spec_caterpillar over the eta value grid; keep the cheapest tree.

    The grid has O(log(max-degree / min-degree)) values. Ties prefer the
    earlier (smaller) eta.
    """
    if k < 2:
        raise KTooLargeError(f"eta_sweep needs k >= 2, got {k}")
    best: tuple[HCTree, float, float] | None = None
    for eta in eta_sweep_values(g):
        cfg = AlgoConfig(k=k, eta=eta, seed=seed, algorithm="spec_caterpillar")
        tree, cost = spec_caterpillar(g, cfg)
        if best is None or cost < best[1]:
            best = (tree, cost, eta)
    return best


# ---------------------------------------------------------------------------
# identities used by the verification suite and tests


def bucket_labels(g: Graph, run: HCRun) -> np.ndarray:
    """Per-vertex bucket index for a run that produced buckets."""
    lab = np.full(g.n, -1, dtype=np.int64)
    for b, part in enumerate(run.bucket_parts):
        lab[part] = b
    return lab


def crossing_cost_identity(g: Graph, run: HCRun) -> tuple[float, float]:
    """Both sides of the crossing-cost identity for a spec_wrsc run.

    Left: total cost of bucket-crossing edges in the final tree. Right: the
    weighted Dasgupta cost of the WRSC tree on the contracted graph. The two
    agree up to floating-point accumulation.
    """
    if run.contracted is None or run.contracted_tree is None:
        raise GraphHCError("run carries no contracted graph")
    lab = bucket_labels(g, run)
    terms = edge_cost_terms(g, run.tree)
    cross = lab[g.edge_u] != lab[g.edge_v]
    lhs = math.fsum(terms[cross].tolist())
    rhs = weighted_dasgupta_cost(run.contracted, run.contracted_tree)
    return lhs, rhs


def decomposition_identity(g: Graph, run: HCRun) -> tuple[float, float]:
    """Total cost vs. the same cost recomputed from bucket-local pieces.

    Right side: per-bucket costs evaluated on the bucket trees plus the
    crossing-edge costs from the final tree, all per-edge terms combined in
    one exact sum. Agreement is exact because both sides sum the identical
    term multiset.
    """
    lab = bucket_labels(g, run)
    terms = edge_cost_terms(g, run.tree)
    cross = lab[g.edge_u] != lab[g.edge_v]
    pieces = terms[cross].tolist()
    for b, btree in enumerate(run.bucket_trees):
        inside = (lab[g.edge_u] == b) & (lab[g.edge_v] == b)
        if not inside.any():
            continue
        nodes = _bucket_lca(btree, g.edge_u[inside], g.edge_v[inside])
        pieces.extend((g.edge_w[inside] * btree.size[nodes].astype(np.float64)).tolist())
    lhs = math.fsum(terms.tolist())
    rhs = math.fsum(pieces)
    return lhs, rhs


def _bucket_lca(btree: HCTree, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    from .tree import _lca_nodes
    return _lca_nodes(btree, us, vs)
