"""Weighted undirected graphs with cut, volume, conductance, and contraction.

Vertices are the integers ``0..n-1``. A :class:`Graph` is immutable once
built: edges are kept both as flat arrays (canonical ``u < v`` order, sorted)
and as CSR-style neighbor lists sorted by neighbor id, so every scan has a
fixed order and results are reproducible bit for bit. Degree and volume sums
use ``math.fsum`` and are therefore exact (correctly rounded) regardless of
summation order.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DisconnectedError,
    DuplicateEdgeError,
    EmptySetError,
    IncompletePartitionError,
    NonPositiveWeightError,
    OverlappingSetsError,
    SelfLoopError,
    TooLargeError,
    TrivialCutError,
)

# exhaustive conductance enumerates 2^(n-1) splits; keep it desk-scale
EXACT_CONDUCTANCE_MAX_N = 24

VertexSet = Sequence[int]


@dataclass(frozen=True)
class Graph:
    """Immutable weighted undirected graph.

    Attributes:
        n: vertex count.
        edge_u, edge_v, edge_w: edge arrays in canonical sorted (u, v) order
            with u < v and w > 0.
        indptr, nbr, nbr_w: CSR neighbor lists, neighbors sorted by id.
        degree: per-vertex weighted degree (exact fsum of incident weights).
        total_volume: sum of all degrees, equals twice the total edge weight.
        w_min, w_max: extreme edge weights (NaN for edgeless graphs).
        source_ids: optional mapping from vertex id back to the caller's ids.
    """

    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    indptr: np.ndarray
    nbr: np.ndarray
    nbr_w: np.ndarray
    degree: np.ndarray
    total_volume: float
    w_min: float
    w_max: float
    source_ids: np.ndarray | None = None

    @property
    def m(self) -> int:
        return int(self.edge_w.shape[0])

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = int(self.indptr[u]), int(self.indptr[u + 1])
        return self.nbr[lo:hi], self.nbr_w[lo:hi]

    def volume(self, vertices: VertexSet) -> float:
        idx = as_vertex_array(self.n, vertices)
        return math.fsum(self.degree[idx].tolist())

    def __repr__(self) -> str:  # keep reprs short in test output
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of the vertex set by nonempty parts."""

    labels: np.ndarray
    parts: tuple[np.ndarray, ...]

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @staticmethod
    def from_labels(labels: Iterable[int]) -> "Partition":
        lab = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels, dtype=np.int64)
        if lab.size == 0:
            raise IncompletePartitionError("empty label array")
        k = int(lab.max()) + 1
        if lab.min() < 0:
            raise IncompletePartitionError("negative label")
        parts = tuple(np.flatnonzero(lab == i).astype(np.int64) for i in range(k))
        for i, p in enumerate(parts):
            if p.size == 0:
                raise IncompletePartitionError(f"label {i} has no vertices")
        return Partition(labels=lab, parts=parts)

    @staticmethod
    def from_parts(parts: Sequence[VertexSet], n: int) -> "Partition":
        lab = np.full(n, -1, dtype=np.int64)
        norm = []
        for i, p in enumerate(parts):
            idx = as_vertex_array(n, p)
            if idx.size == 0:
                raise IncompletePartitionError(f"part {i} is empty")
            if (lab[idx] != -1).any():
                raise IncompletePartitionError("parts overlap")
            lab[idx] = i
            norm.append(idx)
        if (lab == -1).any():
            missing = int(np.flatnonzero(lab == -1)[0])
            raise IncompletePartitionError(f"vertex {missing} not covered")
        return Partition(labels=lab, parts=tuple(norm))


@dataclass(frozen=True)
class ContractedGraph:
    """Vertex- and edge-weighted graph obtained by contracting a partition.

    ``vertex_weight[i]`` is the size of part i (a positive integer) and
    ``weight[i, j]`` the total edge weight between parts i and j (symmetric,
    zero diagonal; internal edges are dropped).
    """

    vertex_weight: np.ndarray
    weight: np.ndarray

    @property
    def k(self) -> int:
        return int(self.vertex_weight.shape[0])

    @property
    def total_vertex_weight(self) -> int:
        return int(self.vertex_weight.sum())

    def total_edge_weight(self) -> float:
        iu, iv = np.triu_indices(self.k, 1)
        return math.fsum(self.weight[iu, iv].tolist())

    def edges(self) -> list[tuple[int, int, float]]:
        iu, iv = np.triu_indices(self.k, 1)
        w = self.weight[iu, iv]
        keep = w > 0.0
        return [(int(a), int(b), float(c)) for a, b, c in zip(iu[keep], iv[keep], w[keep])]

    def induced(self, vertices: VertexSet) -> "ContractedGraph":
        idx = as_vertex_array(self.k, vertices)
        if idx.size == 0:
            raise EmptySetError("empty contracted vertex set")
        return ContractedGraph(
            vertex_weight=self.vertex_weight[idx].copy(),
            weight=self.weight[np.ix_(idx, idx)].copy(),
        )

    def __repr__(self) -> str:
        return f"ContractedGraph(k={self.k})"


def as_vertex_array(n: int, vertices: VertexSet) -> np.ndarray:
    """Normalize a vertex collection to a sorted, deduplicated int64 array."""
    idx = np.unique(np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices, dtype=np.int64))
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise IndexError(f"vertex id out of range [0, {n})")
    return idx


def _assemble(n: int, eu: np.ndarray, ev: np.ndarray, ew: np.ndarray,
              source_ids: np.ndarray | None = None) -> Graph:
    """Build a Graph from validated edge arrays (no further checking)."""
    lo = np.minimum(eu, ev)
    hi = np.maximum(eu, ev)
    order = np.lexsort((hi, lo))
    eu, ev, ew = lo[order], hi[order], ew[order].astype(np.float64)

    m = eu.shape[0]
    heads = np.concatenate([eu, ev])
    tails = np.concatenate([ev, eu])
    ws = np.concatenate([ew, ew])
    srt = np.lexsort((tails, heads))
    heads, tails, ws = heads[srt], tails[srt], ws[srt]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, heads + 1, 1)
    indptr = np.cumsum(indptr)

    degree = np.zeros(n, dtype=np.float64)
    wlist = ws.tolist()
    for u in range(n):
        a, b = indptr[u], indptr[u + 1]
        if b > a:
            degree[u] = math.fsum(wlist[a:b])
    total = 2.0 * math.fsum(ew.tolist())

    return Graph(
        n=n,
        edge_u=eu,
        edge_v=ev,
        edge_w=ew,
        indptr=indptr,
        nbr=tails,
        nbr_w=ws,
        degree=degree,
        total_volume=total,
        w_min=float(ew.min()) if m else math.nan,
        w_max=float(ew.max()) if m else math.nan,
        source_ids=source_ids,
    )


def build_graph(edge_list: Iterable[tuple[int, int, float]],
                n_vertices: int | None = None) -> Graph:
    """Build a graph from an iterable of (u, v, w) triples.

    Vertex ids may be arbitrary nonnegative integers; they are compacted to
    ``0..n-1`` in order of first appearance unless ``n_vertices`` is given,
    in which case ids are used verbatim (allowing isolated vertices).

    Raises:
        NonPositiveWeightError: w <= 0 or not finite.
        SelfLoopError: u == v.
        DuplicateEdgeError: the same undirected pair appears twice.
    """
    us, vs, ws = [], [], []
    for u, v, w in edge_list:
        u, v, w = int(u), int(v), float(w)
        if u < 0 or v < 0:
            raise IndexError(f"negative vertex id in edge ({u}, {v})")
        if u == v:
            raise SelfLoopError(f"self-loop at vertex {u}")
        if not (w > 0.0) or not math.isfinite(w):
            raise NonPositiveWeightError(f"edge ({u}, {v}) has weight {w}")
        us.append(u)
        vs.append(v)
        ws.append(w)

    eu = np.asarray(us, dtype=np.int64)
    ev = np.asarray(vs, dtype=np.int64)
    ew = np.asarray(ws, dtype=np.float64)

    source_ids = None
    if n_vertices is None:
        # compact ids in order of first appearance
        flat = np.empty(2 * eu.size, dtype=np.int64)
        flat[0::2] = eu
        flat[1::2] = ev
        uniq, first = np.unique(flat, return_index=True)
        uniq = uniq[np.argsort(first)]
        remap = {int(orig): i for i, orig in enumerate(uniq)}
        eu = np.asarray([remap[int(x)] for x in eu], dtype=np.int64)
        ev = np.asarray([remap[int(x)] for x in ev], dtype=np.int64)
        n = len(uniq)
        source_ids = uniq
    else:
        n = int(n_vertices)
        if eu.size and max(int(eu.max()), int(ev.max())) >= n:
            raise IndexError("vertex id exceeds n_vertices")

    if eu.size:
        key = np.minimum(eu, ev) * np.int64(n) + np.maximum(eu, ev)
        uniq_keys, counts = np.unique(key, return_counts=True)
        if (counts > 1).any():
            bad = int(uniq_keys[np.argmax(counts > 1)])
            raise DuplicateEdgeError(f"duplicate undirected edge ({bad // n}, {bad % n})")

    return _assemble(n, eu, ev, ew, source_ids)


def _vertex_mask(n: int, vertices: VertexSet) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    mask[as_vertex_array(n, vertices)] = True
    return mask


def cut_weight(g: Graph, S: VertexSet, T: VertexSet) -> float:
    """Total weight of edges with one endpoint in S and the other in T.

    S and T must be disjoint. Empty sets give 0.
    """
    ms = _vertex_mask(g.n, S)
    mt = _vertex_mask(g.n, T)
    if (ms & mt).any():
        raise OverlappingSetsError("S and T overlap")
    cross = (ms[g.edge_u] & mt[g.edge_v]) | (mt[g.edge_u] & ms[g.edge_v])
    return math.fsum(g.edge_w[cross].tolist())


def conductance(g: Graph, S: VertexSet) -> float:
    """Conductance of S: cut(S, V\\S) / vol(S).

    Conventions: 1.0 for the empty set, 0.0 for the full vertex set, and
    0.0 whenever the boundary weight is zero (covers zero-volume sets).
    """
    idx = as_vertex_array(g.n, S)
    if idx.size == 0:
        return 1.0
    if idx.size == g.n:
        return 0.0
    mask = np.zeros(g.n, dtype=bool)
    mask[idx] = True
    cross = mask[g.edge_u] != mask[g.edge_v]
    cut = math.fsum(g.edge_w[cross].tolist())
    if cut == 0.0:
        return 0.0
    return cut / math.fsum(g.degree[idx].tolist())


def connected_components(g: Graph) -> tuple[int, np.ndarray]:
    """Number of connected components and a per-vertex component label."""
    label = np.full(g.n, -1, dtype=np.int64)
    comp = 0
    for start in range(g.n):
        if label[start] != -1:
            continue
        stack = [start]
        label[start] = comp
        while stack:
            u = stack.pop()
            nbrs, _ = g.neighbors(u)
            for v in nbrs:
                v = int(v)
                if label[v] == -1:
                    label[v] = comp
                    stack.append(v)
        comp += 1
    return comp, label


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return connected_components(g)[0] == 1


def require_connected(g: Graph, what: str = "this operation") -> None:
    if not is_connected(g):
        raise DisconnectedError(f"{what} requires a connected graph")


def graph_conductance_exact(g: Graph) -> tuple[float, np.ndarray]:
    """Exact graph conductance by exhaustive enumeration (test oracle).

    Minimizes cut(S, V\\S) / vol(S) over all S with vol(S) <= vol(V)/2.
    Requires a connected graph with 2 <= n <= EXACT_CONDUCTANCE_MAX_N.
    Returns the minimum and a witness set (sorted vertex array).
    """
    if g.n > EXACT_CONDUCTANCE_MAX_N:
        raise TooLargeError(f"n={g.n} exceeds exhaustive cap {EXACT_CONDUCTANCE_MAX_N}")
    if g.n < 2:
        raise TooLargeError("conductance needs at least 2 vertices")
    require_connected(g, "exact conductance")

    n = g.n
    # vertex 0 always inside S; the all-ones pattern (S = V) is excluded
    rest = np.arange((1 << (n - 1)) - 1, dtype=np.int64)
    cut = np.zeros(rest.shape[0], dtype=np.float64)
    bit = [None] * n
    bit[0] = np.ones(rest.shape[0], dtype=bool)
    for v in range(1, n):
        bit[v] = ((rest >> (v - 1)) & 1).astype(bool)
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        cut += np.where(bit[int(u)] != bit[int(v)], float(w), 0.0)
    vol_s = np.zeros(rest.shape[0], dtype=np.float64)
    for v in range(n):
        vol_s += np.where(bit[v], g.degree[v], 0.0)
    vol_c = g.total_volume - vol_s
    minvol = np.minimum(vol_s, vol_c)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = cut / minvol
    # the vectorized accumulation can be off by a few ulps; recompute exactly
    # for every near-minimal candidate and pick the true minimum
    window = phi.min() * (1.0 + 1e-9) + 1e-300
    best_value = math.inf
    best_side: np.ndarray | None = None
    for cand in np.flatnonzero(phi <= window):
        members = [0] + [v for v in range(1, n) if (int(rest[cand]) >> (v - 1)) & 1]
        side = np.asarray(members, dtype=np.int64)
        if vol_s[cand] > vol_c[cand]:
            side = np.setdiff1d(np.arange(n, dtype=np.int64), side)
        value = conductance(g, side)
        if value < best_value:
            best_value = value
            best_side = side
    return best_value, best_side


def induced_subgraph(g: Graph, S: VertexSet) -> Graph:
    """Subgraph on S, relabeled to 0..|S|-1 (sorted order of S).

    The returned graph's ``source_ids`` maps new ids back to ids in g.
    """
    idx = as_vertex_array(g.n, S)
    if idx.size == 0:
        raise EmptySetError("cannot induce on the empty set")
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[idx] = np.arange(idx.size, dtype=np.int64)
    keep = (pos[g.edge_u] >= 0) & (pos[g.edge_v] >= 0)
    eu = pos[g.edge_u[keep]]
    ev = pos[g.edge_v[keep]]
    ew = g.edge_w[keep].copy()
    source = idx if g.source_ids is None else g.source_ids[idx]
    return _assemble(int(idx.size), eu, ev, ew, source_ids=source)


def contract(g: Graph, parts: Partition) -> ContractedGraph:
    """Contract each part to a single vertex; one pass over the edges.

    Part i becomes vertex i with weight |part i|; the contracted edge weight
    between i and j is the total crossing weight. Internal edges vanish.
    """
    if parts.n != g.n:
        raise IncompletePartitionError(
            f"partition covers {parts.n} vertices, graph has {g.n}")
    k = parts.k
    lab = parts.labels
    lu = lab[g.edge_u]
    lv = lab[g.edge_v]
    cross = lu != lv
    weight = np.zeros((k, k), dtype=np.float64)
    np.add.at(weight, (lu[cross], lv[cross]), g.edge_w[cross])
    weight = weight + weight.T
    vertex_weight = np.asarray([p.size for p in parts.parts], dtype=np.int64)
    return ContractedGraph(vertex_weight=vertex_weight, weight=weight)


def weighted_sparsity(h: ContractedGraph, S: VertexSet) -> float:
    """Sparsity of the cut (S, V\\S) on a vertex-weighted graph.

    Returns W(S, V\\S) / (w(S) * w(V\\S)) where w sums vertex weights. The
    numerator is an exact (fsum) sum, so equal cuts compare bit-identically.
    """
    idx = as_vertex_array(h.k, S)
    if idx.size == 0 or idx.size == h.k:
        raise TrivialCutError("cut side must be a nonempty proper subset")
    comp = np.setdiff1d(np.arange(h.k, dtype=np.int64), idx)
    crossing = math.fsum(h.weight[np.ix_(idx, comp)].ravel().tolist())
    denom = int(h.vertex_weight[idx].sum()) * int(h.vertex_weight[comp].sum())
    return crossing / denom


# ---------------------------------------------------------------------------
# edge-list text format: "u v w" per line, '#' comments, blank lines ignored


def read_edge_list(path, merge_duplicates: bool = False) -> Graph:
    """Read a whitespace-separated edge list file.

    Each data line is ``u v w``. Vertex ids are arbitrary nonnegative
    integers and get compacted to 0..n-1 in sorted id order, so a file whose
    ids are already 0..n-1 reads back unchanged (label sidecars stay
    aligned). When ``merge_duplicates`` is set, repeated undirected pairs are
    summed on ingestion instead of rejected.
    """
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'u v w', got {raw!r}")
            u, v, w = int(fields[0]), int(fields[1]), float(fields[2])
            edges.append((u, v, w))
    if merge_duplicates:
        acc: dict[tuple[int, int], float] = {}
        order: list[tuple[int, int]] = []
        for u, v, w in edges:
            key = (min(u, v), max(u, v))
            if key not in acc:
                acc[key] = 0.0
                order.append((u, v))
            acc[key] += w
        edges = [(u, v, acc[(min(u, v), max(u, v))]) for u, v in order]
    ids = sorted({u for u, _, _ in edges} | {v for _, v, _ in edges})
    remap = {orig: i for i, orig in enumerate(ids)}
    g = build_graph([(remap[u], remap[v], w) for u, v, w in edges],
                    n_vertices=len(ids))
    return dataclasses.replace(g, source_ids=np.asarray(ids, dtype=np.int64))


def write_edge_list(g: Graph, path, comment: str | None = None) -> None:
    """Write the canonical edge list; weights use repr for exact round-trip."""
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
            fh.write(f"{int(u)} {int(v)} {float(w)!r}\n")


def write_labels(labels: np.ndarray, path) -> None:
    """Write 'vertex label' lines (the sidecar format of the generators)."""
    with open(path, "w", encoding="utf-8") as fh:
        for v, lab in enumerate(labels):
            fh.write(f"{v} {int(lab)}\n")


def read_labels(path) -> np.ndarray:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            v, lab = line.split()
            pairs.append((int(v), int(lab)))
    out = np.zeros(max(v for v, _ in pairs) + 1, dtype=np.int64) if pairs else np.zeros(0, dtype=np.int64)
    for v, lab in pairs:
        out[v] = lab
    return out
