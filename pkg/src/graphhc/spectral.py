"""Normalized Laplacian spectra, spectral embeddings, and spectral clustering.

The eigensolver works on the shifted operator 2I - L (largest eigenpairs of
the shift correspond to the bottom of L) so the iterative path only ever
applies the adjacency implicitly. Small problems fall back to a dense
symmetric solve. All randomized pieces are seeded and therefore reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, lobpcg

from .errors import (
    InsufficientVectorsError,
    KTooLargeError,
    NoConvergenceError,
    RankDeficientError,
)
from .graph import Graph, Partition, conductance, require_connected

DENSE_EIGENSOLVER_MAX_N = 2000
DEFAULT_TOL = 1e-8
KMEANS_RESTARTS = 5


@dataclass
class SpectrumReport:
    """Bottom eigenpairs of the normalized Laplacian.

    ``eigenvalues`` are ascending; ``eigenvectors`` has one column per pair,
    orthonormal; ``gap`` is the ratio of the two largest reported eigenvalues
    (the lambda_{k+1}/lambda_k statistic when k+1 pairs were requested), or
    None when the smaller of the two is numerically zero.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray
    gap: float | None

    @property
    def r(self) -> int:
        return int(self.eigenvalues.shape[0])


@dataclass
class Embedding:
    """Spectral embedding: row u is the k-dimensional point for vertex u."""

    points: np.ndarray
    normalization: str = "unit_row"

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])


def _adjacency_csr(g: Graph) -> sp.csr_matrix:
    rows = np.concatenate([g.edge_u, g.edge_v])
    cols = np.concatenate([g.edge_v, g.edge_u])
    vals = np.concatenate([g.edge_w, g.edge_w])
    return sp.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


def _normalized_laplacian_dense(g: Graph) -> np.ndarray:
    n = g.n
    s = np.zeros(n, dtype=np.float64)
    pos = g.degree > 0.0
    s[pos] = 1.0 / np.sqrt(g.degree[pos])
    A = _adjacency_csr(g).toarray()
    L = -(s[:, None] * A * s[None, :])
    # zero-degree vertices are their own components: eigenvalue 0 by convention
    diag = np.where(pos, 1.0, 0.0)
    L[np.arange(n), np.arange(n)] += diag
    return (L + L.T) / 2.0


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: the largest-magnitude extreme is positive.

    The rule depends only on the value multiset, so it is stable under vertex
    relabeling (up to exact-magnitude ties).
    """
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        if -col.min() > col.max():
            out[:, j] = -col
    return out


def bottom_eigs(g: Graph, r: int, tol: float = DEFAULT_TOL,
                max_iter: int | None = None, seed: int = 0) -> SpectrumReport:
    """Bottom-r eigenpairs of the normalized Laplacian of g.

    Deterministic given the seed. Dense solve for small n (or when the block
    would be too large for the iterative method); otherwise LOBPCG on 2I - L
    with a seeded start block. ``max_iter`` caps the number of matrix
    applications, defaulting to 10n.

    Raises:
        RankDeficientError: r outside [1, n].
        NoConvergenceError: residuals above tol after max_iter (iterative path).
    """
    n = g.n
    if r < 1 or r > n:
        raise RankDeficientError(f"requested {r} eigenpairs of an {n}x{n} operator")
    if max_iter is None:
        max_iter = 10 * n

    if n <= DENSE_EIGENSOLVER_MAX_N or r > n // 5:
        L = _normalized_laplacian_dense(g)
        vals, vecs = np.linalg.eigh(L)
        vals = vals[:r].copy()
        vecs = vecs[:, :r].copy()
        resid = np.linalg.norm(L @ vecs - vecs * vals[None, :], axis=0)
    else:
        s = np.zeros(n, dtype=np.float64)
        pos = g.degree > 0.0
        s[pos] = 1.0 / np.sqrt(g.degree[pos])
        A = _adjacency_csr(g)
        diag = np.where(pos, 1.0, 0.0)

        def apply_l(x):
            return diag[:, None] * x - s[:, None] * (A @ (s[:, None] * x))

        def apply_shifted(x):
            x2 = x if x.ndim == 2 else x[:, None]
            y = 2.0 * x2 - apply_l(x2)
            return y if x.ndim == 2 else y[:, 0]

        shifted = LinearOperator((n, n), matvec=apply_shifted,
                                 matmat=apply_shifted, dtype=np.float64)
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((n, r))
        X, _ = np.linalg.qr(X)
        maxiter = max(20, max_iter // max(1, r))
        mu, vecs = lobpcg(shifted, X, tol=tol / 10.0, maxiter=maxiter, largest=True)
        vals = 2.0 - mu
        order = np.argsort(vals, kind="stable")
        vals = vals[order]
        vecs = vecs[:, order]
        resid = np.linalg.norm(apply_l(vecs) - vecs * vals[None, :], axis=0)
        bound = tol * np.maximum(1.0, np.abs(vals))
        if (resid > bound).any():
            raise NoConvergenceError(
                f"eigensolver residuals {resid.max():.3e} above tolerance {tol:.1e}",
                residuals=resid)

    vecs = _fix_signs(np.ascontiguousarray(vecs))
    gap = None
    if r >= 2 and vals[-2] > 1e-12:
        gap = float(vals[-1] / vals[-2])
    return SpectrumReport(eigenvalues=vals, eigenvectors=vecs,
                          residual_norms=resid, gap=gap)


def spectral_embedding(report: SpectrumReport, k: int) -> Embedding:
    """Embed vertices via the first k eigenvectors, rows scaled to unit norm.

    Zero rows (possible for zero-degree vertices) are left as zero.
    """
    if k < 1 or k > report.r:
        raise InsufficientVectorsError(
            f"need {k} eigenvectors, report holds {report.r}")
    pts = report.eigenvectors[:, :k].copy()
    norms = np.linalg.norm(pts, axis=1)
    pos = norms > 0.0
    pts[pos] /= norms[pos, None]
    return Embedding(points=pts)


def _plusplus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centers[0] = points[first]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(np.argmin(d2))  # all points coincide with some center
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = points[idx]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _assign(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # squared distances without materializing the full (n, k, d) cube
    d2 = (points ** 2).sum(axis=1)[:, None] - 2.0 * points @ centers.T \
        + (centers ** 2).sum(axis=1)[None, :]
    return np.argmin(d2, axis=1)


def _lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int) -> tuple[np.ndarray, float]:
    k = centers.shape[0]
    labels = _assign(points, centers)
    for _ in range(max_iter):
        # repair empty clusters: split the largest one at its farthest point
        counts = np.bincount(labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            big = int(np.argmax(counts))
            members = np.flatnonzero(labels == big)
            far = ((points[members] - centers[big]) ** 2).sum(axis=1)
            pick = int(members[np.argmax(far)])
            centers[empty] = points[pick]
            labels[pick] = empty
            counts = np.bincount(labels, minlength=k)
        for j in range(k):
            centers[j] = points[labels == j].mean(axis=0)
        new_labels = _assign(points, centers)
        if (new_labels == labels).all():
            break
        labels = new_labels
    counts = np.bincount(labels, minlength=k)
    for empty in np.flatnonzero(counts == 0):
        big = int(np.argmax(counts))
        members = np.flatnonzero(labels == big)
        far = ((points[members] - centers[big]) ** 2).sum(axis=1)
        pick = int(members[np.argmax(far)])
        labels[pick] = empty
        counts = np.bincount(labels, minlength=k)
    wcss = 0.0
    for j in range(k):
        members = points[labels == j]
        wcss += float(((members - members.mean(axis=0)) ** 2).sum())
    return labels, wcss


def kmeans(points: Embedding | np.ndarray, k: int, seed: int = 0,
           max_iter: int = 300, restarts: int = KMEANS_RESTARTS) -> Partition:
    """k-means with k-means++ seeding, Lloyd iteration, and restarts.

    Runs ``restarts`` independent seedings and keeps the lowest
    within-cluster sum of squares; empty clusters are repaired by splitting
    the largest cluster at its farthest point. Deterministic given seed.
    """
    pts = points.points if isinstance(points, Embedding) else np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if k > n or k < 1:
        raise KTooLargeError(f"k={k} but only {n} points")
    rng = np.random.default_rng(seed)
    best_labels = None
    best_wcss = math.inf
    for _ in range(restarts):
        centers = _plusplus_init(pts, k, rng)
        labels, wcss = _lloyd(pts, centers.copy(), max_iter)
        if wcss < best_wcss - 1e-12 or best_labels is None:
            best_wcss = wcss
            best_labels = labels
    return Partition.from_labels(best_labels)


def spectral_clustering(g: Graph, k: int, seed: int = 0) -> Partition:
    """Bottom-k eigenvectors, unit-row embedding, then seeded k-means.

    Requires a connected graph and 2 <= k <= n. Returns k nonempty parts.
    """
    if k < 2 or k > g.n:
        raise KTooLargeError(f"k={k} not in [2, {g.n}]")
    require_connected(g, "spectral clustering")
    report = bottom_eigs(g, k, seed=seed)
    emb = spectral_embedding(report, k)
    return kmeans(emb, k, seed=seed)


def sweep_cut(g: Graph, report: SpectrumReport | None = None,
              seed: int = 0) -> tuple[np.ndarray, float]:
    """Best prefix cut of the second-eigenvector sweep order.

    Vertices are sorted by f_2(u) / sqrt(d_u); prefixes are scanned and the
    one minimizing conductance (of the side with at most half the volume) is
    returned as (vertex array, conductance).
    """
    require_connected(g, "sweep cut")
    if report is None or report.r < 2:
        report = bottom_eigs(g, 2, seed=seed)
    f2 = report.eigenvectors[:, 1]
    score = f2 / np.sqrt(g.degree)
    order = np.lexsort((np.arange(g.n), score))
    cut = 0.0
    vol = 0.0
    inside = np.zeros(g.n, dtype=bool)
    best_phi = math.inf
    best_i = 0
    for i, u in enumerate(order[:-1]):
        u = int(u)
        nbrs, ws = g.neighbors(u)
        boundary_delta = float(g.degree[u])
        for v, w in zip(nbrs, ws):
            if inside[int(v)]:
                boundary_delta -= 2.0 * float(w)
        cut += boundary_delta
        vol += float(g.degree[u])
        inside[u] = True
        minvol = min(vol, g.total_volume - vol)
        if minvol <= 0.0:
            continue
        phi = cut / minvol
        if phi < best_phi:
            best_phi = phi
            best_i = i
    side = np.sort(order[:best_i + 1]).astype(np.int64)
    if math.fsum(g.degree[side].tolist()) > g.total_volume / 2.0:
        side = np.setdiff1d(np.arange(g.n, dtype=np.int64), side)
    return side, conductance(g, side)
