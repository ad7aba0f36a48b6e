"""scikit-learn style estimators over affinity matrices.

These wrappers let the graph algorithms compose with the wider ecosystem:
``fit(X)`` takes a symmetric nonnegative affinity matrix (dense or scipy
sparse), builds the weighted graph, and exposes the results through the
usual fitted attributes. Parameters follow the sklearn get_params/set_params
protocol via ``BaseEstimator``.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin

from . import algorithms as alg
from .errors import GraphHCError
from .graph import Graph, build_graph
from .spectral import spectral_clustering
from .tree import flat_clusters


def check_affinity(X) -> np.ndarray:
    """Validate an affinity matrix: square, symmetric, nonnegative, finite.

    Accepts dense arrays, nested sequences, or scipy sparse matrices and
    returns a dense float64 array. The diagonal is ignored (self-affinities
    carry no information for these algorithms).
    """
    if sp.issparse(X):
        A = np.asarray(X.todense(), dtype=np.float64)
    else:
        A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise GraphHCError(f"affinity must be square, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise GraphHCError("affinity contains NaN or infinite entries")
    if (A < 0).any():
        raise GraphHCError("affinity entries must be nonnegative")
    if not np.allclose(A, A.T, rtol=1e-10, atol=1e-12):
        raise GraphHCError("affinity must be symmetric")
    return A


def graph_from_affinity(X) -> Graph:
    """Build a Graph from the strict upper triangle of an affinity matrix."""
    A = check_affinity(X)
    n = A.shape[0]
    iu, iv = np.triu_indices(n, 1)
    w = ((A[iu, iv] + A[iv, iu]) / 2.0)
    keep = w > 0.0
    return build_graph(zip(iu[keep].tolist(), iv[keep].tolist(), w[keep].tolist()),
                       n_vertices=n)


class SpectralGraphClustering(ClusterMixin, BaseEstimator):
    """Flat k-way spectral clustering of an affinity matrix.

    Parameters
    ----------
    n_clusters : number of clusters (>= 2).
    random_state : seed for the k-means stage.

    Attributes
    ----------
    labels_ : per-vertex cluster labels.
    """

    def __init__(self, n_clusters=2, random_state=0):
        self.n_clusters = n_clusters
        self.random_state = random_state

    def fit(self, X, y=None):
        g = graph_from_affinity(X)
        parts = spectral_clustering(g, self.n_clusters, seed=self.random_state)
        self.labels_ = parts.labels.copy()
        self.n_features_in_ = g.n
        return self


class HierarchicalGraphClustering(ClusterMixin, BaseEstimator):
    """Hierarchical clustering of an affinity matrix with Dasgupta-cost output.

    Parameters
    ----------
    algorithm : one of "specwrsc", "caterpillar", "avglink", "balanced".
    n_clusters : cluster count used by the spectral step and for ``labels_``.
    gamma : weight-spread exponent override (default: derived from the data).
    eta : degree-ratio bound for the caterpillar variant (default: sweep).
    k_sweep : when set, run k' = 1..k_sweep and keep the cheapest tree.
    random_state : seed for every randomized stage.

    Attributes
    ----------
    tree_ : the HC tree (an :class:`graphhc.tree.HCTree`).
    cost_ : its Dasgupta cost.
    labels_ : the tree cut into ``n_clusters`` flat clusters.
    depth_ : tree depth.
    """

    def __init__(self, algorithm="specwrsc", n_clusters=2, gamma=None, eta=None,
                 k_sweep=None, random_state=0):
        self.algorithm = algorithm
        self.n_clusters = n_clusters
        self.gamma = gamma
        self.eta = eta
        self.k_sweep = k_sweep
        self.random_state = random_state

    def fit(self, X, y=None):
        g = graph_from_affinity(X)
        if self.k_sweep is not None:
            tree, cost, k = alg.k_sweep(g, self.k_sweep, algorithm=self.algorithm,
                                        seed=self.random_state, gamma=self.gamma,
                                        eta=self.eta)
            self.k_ = k
        else:
            cfg = alg.AlgoConfig(k=self.n_clusters, gamma=self.gamma, eta=self.eta,
                                 seed=self.random_state, algorithm=self.algorithm)
            run = alg.run_algorithm(g, cfg)
            tree, cost = run.tree, run.cost
            self.k_ = self.n_clusters
        self.tree_ = tree
        self.cost_ = cost
        self.depth_ = tree.max_depth
        self.labels_ = flat_clusters(tree, min(self.n_clusters, g.n))
        self.n_features_in_ = g.n
        return self
