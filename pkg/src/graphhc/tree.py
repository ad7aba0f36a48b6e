"""Hierarchical-clustering trees and Dasgupta-cost evaluation.

Trees are strictly binary and stored as flat arrays (parent, children, size,
depth, leaf vertex), which keeps whole-tree attribute recomputation cheap
after splicing and makes serialization straightforward. Leaves carry graph
vertex ids. Cost evaluation walks each edge's endpoints up to their lowest
common ancestor using the depth attribute, so it runs in O(m * depth); the
per-edge terms are combined with fsum, which makes the total independent of
summation order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappush, heappop
from typing import Sequence

import numpy as np

from .errors import (
    EmptyForestError,
    EmptyLeafSetError,
    KTooLargeError,
    LeafMismatchError,
    NotALeafError,
    TooLargeError,
    UnknownVertexError,
)
from .graph import ContractedGraph, Graph

BRUTE_FORCE_MAX_N = 16
_EXACT_ARITHMETIC_MAX_N = 12


@dataclass(eq=False)
class HCTree:
    """Rooted strictly-binary tree over n leaves.

    Arrays are indexed by node id. ``parent`` is -1 at the root, ``children``
    holds (-1, -1) at leaves, ``size`` counts leaves under each node,
    ``depth`` is 0 at the root, and ``leaf_vertex`` maps leaf nodes to graph
    vertices (-1 for internal nodes). Treat instances as immutable.
    """

    n_leaves: int
    parent: np.ndarray
    children: np.ndarray
    size: np.ndarray
    depth: np.ndarray
    leaf_vertex: np.ndarray
    root: int
    _leaf_node: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_nodes(self) -> int:
        return int(self.parent.shape[0])

    @property
    def max_depth(self) -> int:
        return int(self.depth.max())

    def is_leaf(self, node: int) -> bool:
        return self.children[node, 0] < 0

    def leaf_node_of(self) -> np.ndarray:
        """Array mapping vertex id -> leaf node id (-1 when absent)."""
        if self._leaf_node is None:
            top = int(self.leaf_vertex.max()) + 1 if self.n_leaves else 0
            table = np.full(top, -1, dtype=np.int64)
            leaves = np.flatnonzero(self.leaf_vertex >= 0)
            table[self.leaf_vertex[leaves]] = leaves
            object.__setattr__(self, "_leaf_node", table)
        return self._leaf_node

    def leaves_under(self, node: int) -> np.ndarray:
        """Vertex ids of all leaves in the subtree of ``node`` (sorted)."""
        out = []
        stack = [int(node)]
        while stack:
            x = stack.pop()
            if self.children[x, 0] < 0:
                out.append(int(self.leaf_vertex[x]))
            else:
                stack.append(int(self.children[x, 0]))
                stack.append(int(self.children[x, 1]))
        return np.asarray(sorted(out), dtype=np.int64)

    def __repr__(self) -> str:
        return f"HCTree(n_leaves={self.n_leaves}, depth={self.max_depth})"


class TreeBuilder:
    """Incremental construction: children must be created before parents."""

    def __init__(self):
        self._children: list[tuple[int, int]] = []
        self._leaf: list[int] = []

    def leaf(self, vertex: int) -> int:
        self._children.append((-1, -1))
        self._leaf.append(int(vertex))
        return len(self._children) - 1

    def internal(self, left: int, right: int) -> int:
        idx = len(self._children)
        if not (0 <= left < idx and 0 <= right < idx and left != right):
            raise ValueError("children must be distinct, already-built nodes")
        self._children.append((left, right))
        self._leaf.append(-1)
        return idx

    def build(self, root: int | None = None) -> HCTree:
        n_nodes = len(self._children)
        if n_nodes == 0:
            raise EmptyLeafSetError("no nodes")
        root = n_nodes - 1 if root is None else int(root)
        children = np.asarray(self._children, dtype=np.int64).reshape(n_nodes, 2)
        leaf_vertex = np.asarray(self._leaf, dtype=np.int64)
        parent = np.full(n_nodes, -1, dtype=np.int64)
        for idx in range(n_nodes):
            l, r = children[idx]
            if l >= 0:
                parent[l] = idx
                parent[r] = idx
        # children always precede parents, so one forward pass fixes sizes
        size = np.zeros(n_nodes, dtype=np.int64)
        for idx in range(n_nodes):
            l, r = children[idx]
            size[idx] = 1 if l < 0 else size[l] + size[r]
        depth = np.zeros(n_nodes, dtype=np.int64)
        order = [root]
        seen = 1
        head = 0
        while head < len(order):
            x = order[head]
            head += 1
            l, r = children[x]
            if l >= 0:
                depth[l] = depth[x] + 1
                depth[r] = depth[x] + 1
                order.append(int(l))
                order.append(int(r))
                seen += 2
        if seen != n_nodes:
            raise ValueError("builder nodes not all reachable from root")
        n_leaves = int((leaf_vertex >= 0).sum())
        return HCTree(
            n_leaves=n_leaves,
            parent=parent,
            children=children,
            size=size,
            depth=depth,
            leaf_vertex=leaf_vertex,
            root=root,
        )


def validate_tree(t: HCTree) -> None:
    """Raise ValueError unless all structural invariants hold."""
    n_nodes = t.n_nodes
    if t.parent[t.root] != -1:
        raise ValueError("root has a parent")
    internal = t.children[:, 0] >= 0
    if ((t.children[:, 0] >= 0) != (t.children[:, 1] >= 0)).any():
        raise ValueError("node with exactly one child")
    for idx in range(n_nodes):
        l, r = t.children[idx]
        if l >= 0:
            if t.parent[l] != idx or t.parent[r] != idx:
                raise ValueError("parent pointer mismatch")
            if t.size[idx] != t.size[l] + t.size[r]:
                raise ValueError(f"size mismatch at node {idx}")
            if t.depth[l] != t.depth[idx] + 1 or t.depth[r] != t.depth[idx] + 1:
                raise ValueError(f"depth mismatch at node {idx}")
        else:
            if t.size[idx] != 1:
                raise ValueError("leaf with size != 1")
    leaves = t.leaf_vertex[~internal]
    if (~internal).sum() != t.n_leaves:
        raise ValueError("leaf count mismatch")
    if sorted(int(x) for x in leaves) != sorted(set(int(x) for x in leaves)):
        raise ValueError("duplicate leaf vertices")
    if t.size[t.root] != t.n_leaves:
        raise ValueError("root size != leaf count")


def lca(t: HCTree, u: int, v: int) -> int:
    """Lowest common ancestor of the leaves for vertices u and v.

    Climbs the deeper leaf to the other's depth, then both in lockstep;
    O(depth) time.
    """
    table = t.leaf_node_of()
    if u == v:
        raise UnknownVertexError("lca needs two distinct vertices")
    for x in (u, v):
        if x < 0 or x >= table.shape[0] or table[x] < 0:
            raise UnknownVertexError(f"vertex {x} is not a leaf of the tree")
    a, b = int(table[u]), int(table[v])
    parent, depth = t.parent, t.depth
    while depth[a] > depth[b]:
        a = int(parent[a])
    while depth[b] > depth[a]:
        b = int(parent[b])
    while a != b:
        a = int(parent[a])
        b = int(parent[b])
    return a


def _check_leaves_match(g_n: int, t: HCTree) -> None:
    if t.n_leaves != g_n:
        raise LeafMismatchError(f"tree has {t.n_leaves} leaves, graph has {g_n} vertices")
    table = t.leaf_node_of()
    if table.shape[0] < g_n or (table[:g_n] < 0).any() or t.leaf_vertex.max() >= g_n:
        raise LeafMismatchError("tree leaves are not a bijection with graph vertices")


def _lca_nodes(t: HCTree, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Vectorized LCA climb for many (u, v) pairs at once."""
    table = t.leaf_node_of()
    a = table[us].copy()
    b = table[vs].copy()
    parent, depth = t.parent, t.depth
    da = depth[a].copy()
    db = depth[b].copy()
    while True:
        m = da > db
        if not m.any():
            break
        a[m] = parent[a[m]]
        da[m] -= 1
    while True:
        m = db > da
        if not m.any():
            break
        b[m] = parent[b[m]]
        db[m] -= 1
    while True:
        m = a != b
        if not m.any():
            break
        a[m] = parent[a[m]]
        b[m] = parent[b[m]]
    return a


def edge_cost_terms(g: Graph, t: HCTree) -> np.ndarray:
    """Per-edge Dasgupta cost terms w_e * |leaves(lca(u, v))|, edge order."""
    _check_leaves_match(g.n, t)
    if g.m == 0:
        return np.zeros(0, dtype=np.float64)
    nodes = _lca_nodes(t, g.edge_u, g.edge_v)
    return g.edge_w * t.size[nodes].astype(np.float64)


def dasgupta_cost(g: Graph, t: HCTree) -> float:
    """Dasgupta cost of t on g: sum over edges of w_e * |leaves(lca)|."""
    return math.fsum(edge_cost_terms(g, t).tolist())


def dasgupta_cost_naive(g: Graph, t: HCTree) -> float:
    """Independent oracle: per-edge ancestor-set intersection, then fsum."""
    _check_leaves_match(g.n, t)
    table = t.leaf_node_of()
    parent = t.parent
    terms = []
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        anc = set()
        x = int(table[int(u)])
        while x != -1:
            anc.add(x)
            x = int(parent[x])
        y = int(table[int(v)])
        while y not in anc:
            y = int(parent[y])
        terms.append(float(w) * int(t.size[y]))
    return math.fsum(terms)


def subtree_weight_sums(t: HCTree, leaf_weight: np.ndarray) -> np.ndarray:
    """Per-node sum of leaf weights under the node (bottom-up pass)."""
    ws = np.zeros(t.n_nodes, dtype=np.int64)
    order = np.argsort(t.depth, kind="stable")[::-1]
    for idx in order:
        l, r = t.children[idx]
        if l < 0:
            ws[idx] = leaf_weight[t.leaf_vertex[idx]]
        else:
            ws[idx] = ws[l] + ws[r]
    return ws


def weighted_dasgupta_cost(h: ContractedGraph, t: HCTree) -> float:
    """Dasgupta cost generalized to vertex weights.

    Each contracted edge contributes W(u, v) times the total vertex weight
    under the lowest common ancestor of u and v.
    """
    _check_leaves_match(h.k, t)
    edges = h.edges()
    if not edges:
        return 0.0
    ws = subtree_weight_sums(t, h.vertex_weight)
    us = np.asarray([e[0] for e in edges], dtype=np.int64)
    vs = np.asarray([e[1] for e in edges], dtype=np.int64)
    wts = np.asarray([e[2] for e in edges], dtype=np.float64)
    nodes = _lca_nodes(t, us, vs)
    return math.fsum((wts * ws[nodes].astype(np.float64)).tolist())


def balanced_tree(leaf_order: Sequence[int]) -> HCTree:
    """Balanced binary tree by recursive halving, ceil(n/2) on the left."""
    leaves = [int(x) for x in leaf_order]
    if not leaves:
        raise EmptyLeafSetError("balanced_tree needs at least one leaf")
    builder = TreeBuilder()

    def rec(lo: int, hi: int) -> int:
        if hi - lo == 1:
            return builder.leaf(leaves[lo])
        mid = lo + (hi - lo + 1) // 2
        left = rec(lo, mid)
        right = rec(mid, hi)
        return builder.internal(left, right)

    root = rec(0, len(leaves))
    return builder.build(root)


def _copy_into(builder: TreeBuilder, t: HCTree, replace: dict[int, int] | None = None) -> int:
    """Copy t's nodes into builder; returns the new root index.

    ``replace`` maps a leaf node id of t to an already-built node index that
    should take its place.
    """
    new_idx: dict[int, int] = {}
    # children-first order by descending depth keeps builder constraints
    order = np.argsort(t.depth, kind="stable")[::-1]
    for idx in order:
        idx = int(idx)
        if replace and idx in replace:
            new_idx[idx] = replace[idx]
        elif t.children[idx, 0] < 0:
            new_idx[idx] = builder.leaf(int(t.leaf_vertex[idx]))
        else:
            l, r = int(t.children[idx, 0]), int(t.children[idx, 1])
            new_idx[idx] = builder.internal(new_idx[l], new_idx[r])
    return new_idx[t.root]


def caterpillar_merge(trees: Sequence[HCTree]) -> HCTree:
    """Left-deep chain of merges, accumulating the given trees in order.

    Callers must pass trees sorted ascending by leaf count (ties in input
    order); each step roots the accumulated tree and the next one under a
    fresh node. A single tree is returned unchanged.
    """
    if len(trees) == 0:
        raise EmptyForestError("no trees to merge")
    if len(trees) == 1:
        return trees[0]
    builder = TreeBuilder()
    acc = _copy_into(builder, trees[0])
    for t in trees[1:]:
        nxt = _copy_into(builder, t)
        acc = builder.internal(acc, nxt)
    return builder.build(acc)


def replace_leaf(t: HCTree, leaf: int, sub: HCTree) -> HCTree:
    """Return a new tree where ``sub`` occupies the position of ``leaf``.

    All sizes and depths are recomputed globally.
    """
    if leaf < 0 or leaf >= t.n_nodes or not t.is_leaf(leaf):
        raise NotALeafError(f"node {leaf} is not a leaf")
    builder = TreeBuilder()
    sub_root = _copy_into(builder, sub)
    root = _copy_into(builder, t, replace={int(leaf): sub_root})
    return builder.build(root)


# ---------------------------------------------------------------------------
# exhaustive optima (test oracles)


def _subset_dp_opt(weight_of, sizes: Sequence, n: int):
    """Subset DP: OPT(S) = min over splits of cut(S1,S2)*measure(S) + OPT parts.

    ``weight_of(i, j)`` returns the (exact) edge weight between vertices i, j;
    ``sizes[i]`` the vertex measure. Returns (choice table, opt table).
    The recursion is exact for Dasgupta-style costs because every tree is a
    recursive bipartition and vice versa.
    """
    full = (1 << n) - 1
    # total internal weight of every subset, built by adding the lowest bit
    w_in = [None] * (full + 1)
    zero = weight_of(0, 0) * 0
    w_in[0] = zero
    msize = [zero] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & (-mask)
        v = low.bit_length() - 1
        rest = mask ^ low
        acc = w_in[rest]
        r = rest
        while r:
            lb = r & (-r)
            acc = acc + weight_of(v, lb.bit_length() - 1)
            r ^= lb
        w_in[mask] = acc
        msize[mask] = msize[rest] + sizes[v]

    opt = [zero] * (full + 1)
    choice = [0] * (full + 1)
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue  # singleton
        low = mask & (-mask)
        best = None
        best_sub = 0
        sub = (mask - 1) & mask
        while sub:
            if sub & low:  # enumerate unordered splits once
                comp = mask ^ sub
                cut = w_in[mask] - w_in[sub] - w_in[comp]
                cand = cut * msize[mask] + opt[sub] + opt[comp]
                if best is None or cand < best:
                    best = cand
                    best_sub = sub
            sub = (sub - 1) & mask
        opt[mask] = best
        choice[mask] = best_sub
    return choice, opt


def _tree_from_choice(n: int, choice) -> HCTree:
    builder = TreeBuilder()

    def rec(mask: int) -> int:
        if mask & (mask - 1) == 0:
            return builder.leaf(mask.bit_length() - 1)
        sub = choice[mask]
        return builder.internal(rec(sub), rec(mask ^ sub))

    root = rec((1 << n) - 1)
    return builder.build(root)


def brute_force_opt(g: Graph, max_n: int = BRUTE_FORCE_MAX_N) -> tuple[HCTree, float]:
    """Exact minimum-cost tree by subset DP over 2^n states.

    Uses exact rational arithmetic up to n=12 (so the reported optimum is the
    correctly rounded true value), float64 beyond. Capped at ``max_n``.
    """
    n = g.n
    if n > max_n or n > BRUTE_FORCE_MAX_N:
        raise TooLargeError(f"n={n} exceeds brute-force cap")
    if n == 0:
        raise EmptyLeafSetError("empty graph")
    if n == 1:
        b = TreeBuilder()
        b.leaf(0)
        return b.build(0), 0.0

    pair = {}
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        pair[(int(u), int(v))] = float(w)

    exact = n <= _EXACT_ARITHMETIC_MAX_N
    zero = Fraction(0) if exact else 0.0

    def weight_of(a: int, b: int):
        if a == b:
            return zero
        w = pair.get((min(a, b), max(a, b)), 0.0)
        return Fraction(w) if exact else w

    sizes = [Fraction(1) if exact else 1.0] * n
    choice, opt = _subset_dp_opt(weight_of, sizes, n)
    tree = _tree_from_choice(n, choice)
    return tree, float(opt[(1 << n) - 1])


def brute_force_wopt(h: ContractedGraph, max_n: int = BRUTE_FORCE_MAX_N) -> tuple[HCTree, float]:
    """Exact minimum weighted Dasgupta cost over all trees of h."""
    n = h.k
    if n > max_n or n > BRUTE_FORCE_MAX_N:
        raise TooLargeError(f"k={n} exceeds brute-force cap")
    if n == 1:
        b = TreeBuilder()
        b.leaf(0)
        return b.build(0), 0.0

    exact = n <= _EXACT_ARITHMETIC_MAX_N
    zero = Fraction(0) if exact else 0.0

    def weight_of(a: int, b: int):
        if a == b:
            return zero
        w = float(h.weight[a, b])
        return Fraction(w) if exact else w

    sizes = [Fraction(int(x)) if exact else float(x) for x in h.vertex_weight]
    choice, opt = _subset_dp_opt(weight_of, sizes, n)
    tree = _tree_from_choice(n, choice)
    return tree, float(opt[(1 << n) - 1])


# ---------------------------------------------------------------------------
# average-linkage baseline


def average_linkage(g: Graph) -> HCTree:
    """Agglomerative merging maximizing w(A, B) / (|A| * |B|).

    Pairs without edges count as similarity 0. Ties break on the smallest
    (min vertex id, min vertex id) pair, so the output is deterministic.
    Once no positive-similarity pair remains, the surviving clusters are
    folded together in min-id order (all remaining similarities are zero).
    """
    n = g.n
    builder = TreeBuilder()
    if n == 0:
        raise EmptyLeafSetError("empty graph")
    node_of = {}
    for v in range(n):
        node_of[v] = builder.leaf(v)
    if n == 1:
        return builder.build(node_of[0])

    sizes = {v: 1 for v in range(n)}
    min_id = {v: v for v in range(n)}
    active = set(range(n))
    nbr: dict[int, dict[int, float]] = {v: {} for v in range(n)}
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        u, v, w = int(u), int(v), float(w)
        nbr[u][v] = nbr[u].get(v, 0.0) + w
        nbr[v][u] = nbr[v].get(u, 0.0) + w

    heap: list[tuple[float, int, int, int, int]] = []

    def push(a: int, b: int) -> None:
        w = nbr[a].get(b, 0.0)
        if w <= 0.0:
            return
        avg = w / (sizes[a] * sizes[b])
        ka, kb = min_id[a], min_id[b]
        if ka > kb:
            ka, kb = kb, ka
        heappush(heap, (-avg, ka, kb, a, b))

    for u in range(n):
        for v in nbr[u]:
            if u < v:
                push(u, v)

    next_id = n
    while len(active) > 1:
        a = b = -1
        while heap:
            _, _, _, x, y = heappop(heap)
            if x in active and y in active:
                a, b = x, y
                break
        if a == -1:
            # all remaining pairs have zero similarity: fold by min id
            rest = sorted(active, key=lambda c: min_id[c])
            acc = rest[0]
            for c in rest[1:]:
                cid = next_id
                next_id += 1
                node_of[cid] = builder.internal(node_of[acc], node_of[c])
                sizes[cid] = sizes[acc] + sizes[c]
                min_id[cid] = min(min_id[acc], min_id[c])
                active.discard(acc)
                active.discard(c)
                active.add(cid)
                acc = cid
            break

        cid = next_id
        next_id += 1
        if min_id[a] > min_id[b]:
            a, b = b, a
        node_of[cid] = builder.internal(node_of[a], node_of[b])
        sizes[cid] = sizes[a] + sizes[b]
        min_id[cid] = min(min_id[a], min_id[b])
        active.discard(a)
        active.discard(b)

        merged: dict[int, float] = {}
        for src in (a, b):
            for d, w in nbr[src].items():
                if d in active:
                    merged[d] = merged.get(d, 0.0) + w
            nbr[src].clear()
        nbr[cid] = merged
        for d, w in merged.items():
            nbr[d][cid] = w
            nbr[d].pop(a, None)
            nbr[d].pop(b, None)
        active.add(cid)
        for d in sorted(merged, key=lambda c: min_id[c]):
            push(cid, d)

    root_cluster = next(iter(active))
    return builder.build(node_of[root_cluster])


def flat_clusters(t: HCTree, k: int) -> np.ndarray:
    """Cut the tree into k flat clusters; returns a per-vertex label array.

    Expands the frontier by splitting the largest node (ties: smallest node
    id) until k parts remain.
    """
    if k < 1 or k > t.n_leaves:
        raise KTooLargeError(f"k={k} not in [1, {t.n_leaves}]")
    frontier = [int(t.root)]
    while len(frontier) < k:
        cand = [x for x in frontier if not t.is_leaf(x)]
        nxt = max(cand, key=lambda x: (int(t.size[x]), -x))
        frontier.remove(nxt)
        frontier.append(int(t.children[nxt, 0]))
        frontier.append(int(t.children[nxt, 1]))
    labels = np.full(int(t.leaf_vertex.max()) + 1, -1, dtype=np.int64)
    for i, node in enumerate(sorted(frontier)):
        labels[t.leaves_under(node)] = i
    return labels


# ---------------------------------------------------------------------------
# JSON serialization (golden-file stable: sorted keys, compact separators)


def tree_to_json(t: HCTree) -> str:
    nodes = []
    for idx in range(t.n_nodes):
        l, r = int(t.children[idx, 0]), int(t.children[idx, 1])
        nodes.append({
            "parent": int(t.parent[idx]) if t.parent[idx] >= 0 else None,
            "children": [l, r] if l >= 0 else None,
            "leaf": int(t.leaf_vertex[idx]) if t.leaf_vertex[idx] >= 0 else None,
        })
    return json.dumps({"n_leaves": t.n_leaves, "nodes": nodes},
                      sort_keys=True, separators=(",", ":"))


def tree_from_json(text: str) -> HCTree:
    obj = json.loads(text)
    nodes = obj["nodes"]
    n_nodes = len(nodes)
    children = np.full((n_nodes, 2), -1, dtype=np.int64)
    leaf_vertex = np.full(n_nodes, -1, dtype=np.int64)
    root = -1
    for idx, node in enumerate(nodes):
        if node["parent"] is None:
            root = idx
        if node["children"] is not None:
            children[idx] = node["children"]
        if node["leaf"] is not None:
            leaf_vertex[idx] = node["leaf"]
    if root < 0:
        raise ValueError("tree JSON has no root")
    parent = np.full(n_nodes, -1, dtype=np.int64)
    size = np.zeros(n_nodes, dtype=np.int64)
    depth = np.zeros(n_nodes, dtype=np.int64)
    # iterative post-order for sizes, BFS for depth
    stack = [(root, False)]
    while stack:
        idx, done = stack.pop()
        l, r = int(children[idx, 0]), int(children[idx, 1])
        if l < 0:
            size[idx] = 1
            continue
        if done:
            size[idx] = size[l] + size[r]
        else:
            stack.append((idx, True))
            stack.append((l, False))
            stack.append((r, False))
            parent[l] = idx
            parent[r] = idx
    order = [root]
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        l, r = int(children[x, 0]), int(children[x, 1])
        if l >= 0:
            depth[l] = depth[x] + 1
            depth[r] = depth[x] + 1
            order.append(l)
            order.append(r)
    t = HCTree(
        n_leaves=int(obj["n_leaves"]),
        parent=parent,
        children=children,
        size=size,
        depth=depth,
        leaf_vertex=leaf_vertex,
        root=root,
    )
    validate_tree(t)
    return t
