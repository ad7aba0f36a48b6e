"""Vertex-weighted recursive sparsest cut on contracted graphs.

The sparsest cut is found exactly by enumerating all 2^(k-1) - 1 nontrivial
subsets (the intended regime keeps contracted graphs at k + log n vertices,
so the cap is never hit in practice). Beyond the cap a spectral-sweep
heuristic takes over; it carries no approximation guarantee and exists only
so oversized inputs still complete.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateError, TooLargeForExactError
from .graph import ContractedGraph, weighted_sparsity
from .tree import HCTree, TreeBuilder

ENUMERATION_CAP = 22
_FSUM_PATH_MAX_K = 15


def _members(rest_bits: int, k: int) -> tuple[int, ...]:
    return (0,) + tuple(v for v in range(1, k) if (rest_bits >> (v - 1)) & 1)


def min_sparsity_cut(h: ContractedGraph,
                     exact_cap: int = ENUMERATION_CAP) -> tuple[np.ndarray, float]:
    """Exact minimum-sparsity cut by subset enumeration.

    The returned side always contains vertex 0; ties pick the
    lexicographically smallest member tuple. Raises DegenerateError for a
    single vertex and TooLargeForExactError above the cap (callers may fall
    back to the heuristic).
    """
    k = h.k
    if k < 2:
        raise DegenerateError("no nontrivial cut on fewer than 2 vertices")
    if k > exact_cap:
        raise TooLargeForExactError(f"k={k} exceeds enumeration cap {exact_cap}")
    if k <= _FSUM_PATH_MAX_K:
        best_sp = math.inf
        best_members: tuple[int, ...] | None = None
        for rest in range(0, (1 << (k - 1)) - 1):  # skip the full set
            members = _members(rest, k)
            sp = weighted_sparsity(h, members)
            if sp < best_sp or (sp == best_sp and members < best_members):
                best_sp = sp
                best_members = members
        side = np.asarray(best_members, dtype=np.int64)
        return side, best_sp

    rest = np.arange((1 << (k - 1)) - 1, dtype=np.int64)
    bits = [None] * k
    bits[0] = np.ones(rest.shape[0], dtype=bool)
    for v in range(1, k):
        bits[v] = ((rest >> (v - 1)) & 1).astype(bool)
    cross = np.zeros(rest.shape[0], dtype=np.float64)
    for a, b, w in h.edges():
        cross += np.where(bits[a] != bits[b], w, 0.0)
    w_s = np.zeros(rest.shape[0], dtype=np.int64)
    for v in range(k):
        w_s += np.where(bits[v], int(h.vertex_weight[v]), 0)
    total = h.total_vertex_weight
    sparsity = cross / (w_s * (total - w_s)).astype(np.float64)
    smin = sparsity.min()
    candidates = np.flatnonzero(sparsity == smin)
    best_members = min(_members(int(rest[c]), k) for c in candidates)
    side = np.asarray(best_members, dtype=np.int64)
    return side, weighted_sparsity(h, side)


def min_sparsity_cut_heuristic(h: ContractedGraph) -> tuple[np.ndarray, float]:
    """Spectral-sweep fallback: best prefix of the second-eigenvector order.

    No guarantee; the returned sparsity is always >= the exact minimum.
    """
    k = h.k
    if k < 2:
        raise DegenerateError("no nontrivial cut on fewer than 2 vertices")
    deg = h.weight.sum(axis=1)
    s = np.zeros(k, dtype=np.float64)
    pos = deg > 0.0
    s[pos] = 1.0 / np.sqrt(deg[pos])
    lap = -(s[:, None] * h.weight * s[None, :])
    lap[np.arange(k), np.arange(k)] += np.where(pos, 1.0, 0.0)
    lap = (lap + lap.T) / 2.0
    _, vecs = np.linalg.eigh(lap)
    score = vecs[:, 1] * s  # D^{-1/2}-scaled sweep order
    order = np.lexsort((np.arange(k), score))
    best_sp = math.inf
    best_prefix = 1
    for i in range(1, k):
        sp = weighted_sparsity(h, order[:i])
        if sp < best_sp:
            best_sp = sp
            best_prefix = i
    side = np.sort(order[:best_prefix]).astype(np.int64)
    return side, best_sp


def wrsc_tree(h: ContractedGraph, exact_cap: int = ENUMERATION_CAP) -> HCTree:
    """Recursive sparsest-cut tree over the contracted vertices.

    Splits along the exact minimum-sparsity cut whenever the current piece is
    within the enumeration cap, otherwise along the heuristic cut, and recurs
    on the two induced vertex-weighted subgraphs. Leaves are the contracted
    vertex ids; the tree depth equals the recursion depth.
    """
    builder = TreeBuilder()
    # explicit stack: recursion depth equals tree depth, which is unbounded
    # in the heuristic regime
    tasks: list[tuple[str, np.ndarray | None]] = [("build", np.arange(h.k, dtype=np.int64))]
    out: list[int] = []
    while tasks:
        kind, vertices = tasks.pop()
        if kind == "combine":
            right = out.pop()
            left = out.pop()
            out.append(builder.internal(left, right))
            continue
        if vertices.shape[0] == 1:
            out.append(builder.leaf(int(vertices[0])))
            continue
        sub = h.induced(vertices)
        if sub.k <= exact_cap:
            local, _ = min_sparsity_cut(sub, exact_cap)
        else:
            local, _ = min_sparsity_cut_heuristic(sub)
        inside = np.zeros(sub.k, dtype=bool)
        inside[local] = True
        tasks.append(("combine", None))
        tasks.append(("build", vertices[~inside]))
        tasks.append(("build", vertices[inside]))
    return builder.build(out.pop())
