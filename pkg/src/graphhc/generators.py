"""Synthetic graph generators: planted block models and kernel graphs.

Every block pair is sampled from its own RNG stream derived from
(seed, i, j), so generation is reproducible byte for byte and block pairs
could be sampled concurrently without changing the output. Small blocks use
one Bernoulli draw per vertex pair; blocks beyond _BERNOULLI_MAX_BLOCK
switch to geometric gap skipping, which samples the identical distribution
while only touching the realized edges.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist

from .errors import BadProbabilityError, BadSigmaError, EmptySetError
from .graph import Graph, Partition, _assemble

_BERNOULLI_MAX_BLOCK = 2000


def _hsbm_q_matrix(q_min: float) -> np.ndarray:
    # fixed 5-block hierarchy: {1,2,3} vs {4,5} at the top, then {1,2} vs {3}
    # and {4} vs {5}, then {1} vs {2} (1-indexed blocks)
    q = np.full((5, 5), q_min, dtype=np.float64)
    for i in (0, 1):
        q[i, 2] = q[2, i] = 2.0 * q_min
    q[3, 4] = q[4, 3] = 2.0 * q_min
    q[0, 1] = q[1, 0] = 3.0 * q_min
    np.fill_diagonal(q, 0.0)
    return q


def _check_prob(p: float, name: str) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise BadProbabilityError(f"{name}={p} outside [0, 1]")
    return p


def _pair_rng(seed: int, i: int, j: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(i), int(j)])


def _sample_indices(rng: np.random.Generator, count: int, p: float,
                    geometric: bool) -> np.ndarray:
    """Indices of successes among `count` iid Bernoulli(p) trials."""
    if p <= 0.0 or count == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(count, dtype=np.int64)
    if not geometric:
        return np.flatnonzero(rng.random(count) < p).astype(np.int64)
    picks = []
    pos = -1
    chunk = max(16, int(count * p * 1.2) + 16)
    while True:
        gaps = rng.geometric(p, size=chunk)
        steps = np.cumsum(gaps)
        hits = pos + steps
        inside = hits < count
        picks.append(hits[inside])
        if not inside.all():
            break
        pos = int(hits[-1])
    return np.concatenate(picks).astype(np.int64) if picks else np.zeros(0, dtype=np.int64)


def _triu_decode(t: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map linear indices over the strict upper triangle (row-major) of an
    n x n matrix to (row, col) pairs without materializing the triangle."""
    tt = t.astype(np.float64)
    r = np.floor((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8 * tt)) / 2).astype(np.int64)
    offset = r * (2 * n - r - 1) // 2
    c = t - offset + r + 1
    return r, c


def _block_pair_edges(seed: int, i: int, j: int, off_i: int, off_j: int,
                      n_i: int, n_j: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    geometric = max(n_i, n_j) > _BERNOULLI_MAX_BLOCK
    rng = _pair_rng(seed, i, j)
    if i == j:
        count = n_i * (n_i - 1) // 2
        hits = _sample_indices(rng, count, p, geometric)
        r, c = _triu_decode(hits, n_i)
        return off_i + r, off_i + c
    count = n_i * n_j
    hits = _sample_indices(rng, count, p, geometric)
    return off_i + hits // n_j, off_j + hits % n_j


def _planted_graph(block_sizes: list[int], q: np.ndarray, seed: int) -> tuple[Graph, Partition]:
    offsets = np.concatenate([[0], np.cumsum(block_sizes)])
    n = int(offsets[-1])
    us, vs = [], []
    k = len(block_sizes)
    for i in range(k):
        for j in range(i, k):
            eu, ev = _block_pair_edges(seed, i, j, int(offsets[i]), int(offsets[j]),
                                       block_sizes[i], block_sizes[j], float(q[i, j]))
            us.append(eu)
            vs.append(ev)
    eu = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    ev = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    ew = np.ones(eu.shape[0], dtype=np.float64)
    g = _assemble(n, eu, ev, ew)
    labels = np.repeat(np.arange(k, dtype=np.int64), block_sizes)
    return g, Partition.from_labels(labels)


def gen_sbm(k: int, n_k: int, p: float, q: float, seed: int = 0) -> tuple[Graph, Partition]:
    """Stochastic block model: k blocks of n_k vertices, unit edge weights.

    An edge appears with probability p inside a block and q across blocks,
    independently. Returns the graph (isolated vertices permitted) together
    with the planted partition.
    """
    p = _check_prob(p, "p")
    q = _check_prob(q, "q")
    if k < 1 or n_k < 1 or k * n_k < 2:
        raise EmptySetError(f"need at least 2 vertices, got k={k}, n_k={n_k}")
    probs = np.full((k, k), q, dtype=np.float64)
    np.fill_diagonal(probs, p)
    return _planted_graph([n_k] * k, probs, seed)


def gen_hsbm(n_k: int, p: float, q_min: float, seed: int = 0) -> tuple[Graph, Partition]:
    """Hierarchical SBM with the fixed 5-block hierarchy.

    Intra-block probability is p; the cross-block probability is q_min
    scaled by how close two blocks sit in the hierarchy: 3x for blocks
    (1,2), 2x for (1,3), (2,3) and (4,5), and 1x between {1,2,3} and {4,5}.
    """
    p = _check_prob(p, "p")
    q_min = _check_prob(q_min, "q_min")
    _check_prob(3.0 * q_min, "3*q_min")
    if n_k < 1:
        raise EmptySetError("n_k must be >= 1")
    probs = _hsbm_q_matrix(q_min)
    np.fill_diagonal(probs, p)
    return _planted_graph([n_k] * 5, probs, seed)


def hsbm_q_matrix(q_min: float) -> np.ndarray:
    """Cross-block probability matrix of the 5-block hierarchy (zero diagonal)."""
    return _hsbm_q_matrix(_check_prob(q_min, "q_min"))


def gaussian_kernel_graph(points, sigma: float, threshold: float = 1e-12) -> Graph:
    """Complete similarity graph with w_uv = exp(-|x_u - x_v|^2 / (2 sigma^2)).

    Edges lighter than ``threshold`` are dropped so the graph stays
    sparse-representable; the default keeps essentially all mass.
    """
    if not (sigma > 0.0):
        raise BadSigmaError(f"sigma must be positive, got {sigma}")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if n < 2:
        raise EmptySetError("need at least 2 points")
    d2 = cdist(pts, pts, metric="sqeuclidean")
    w = np.exp(-d2 / (2.0 * sigma * sigma))
    iu, iv = np.triu_indices(n, 1)
    keep = w[iu, iv] >= threshold
    return _assemble(n, iu[keep].astype(np.int64), iv[keep].astype(np.int64),
                     w[iu, iv][keep])
