import numpy as np
import pytest

from graphhc.graph import build_graph
from graphhc.tree import TreeBuilder


def triangle(w_ab=1.0, w_ac=1.0, w_bc=1.0):
    return build_graph([(0, 1, w_ab), (0, 2, w_ac), (1, 2, w_bc)], n_vertices=3)


def path3():
    return build_graph([(0, 1, 1.0), (1, 2, 1.0)], n_vertices=3)


def two_triangles_bridged():
    edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
             (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0),
             (0, 3, 1.0)]
    return build_graph(edges, n_vertices=6)


def clique(n, weight=1.0, offset=0):
    return [(offset + i, offset + j, weight) for i in range(n) for j in range(i + 1, n)]


def two_k4_bridged(bridge=0.01):
    edges = clique(4) + clique(4, offset=4) + [(0, 4, bridge)]
    return build_graph(edges, n_vertices=8)


def random_connected_graph(rng, n, weighted=True, extra_frac=0.5):
    """Random spanning tree plus extra edges; deterministic given rng."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges[(u, v)] = True
    max_extra = n * (n - 1) // 2 - (n - 1)
    extra = int(rng.integers(0, int(max_extra * extra_frac) + 1))
    for _ in range(extra):
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        if a != b:
            edges[(min(a, b), max(a, b))] = True
    out = []
    for (u, v) in sorted(edges):
        w = float(np.round(0.25 + 2.0 * rng.random(), 4)) if weighted else 1.0
        out.append((u, v, w))
    return build_graph(out, n_vertices=n)


def random_binary_tree(rng, n):
    """Random leaf-labeled binary tree over vertices 0..n-1."""
    builder = TreeBuilder()
    nodes = [builder.leaf(v) for v in range(n)]
    while len(nodes) > 1:
        i = int(rng.integers(0, len(nodes)))
        a = nodes.pop(i)
        j = int(rng.integers(0, len(nodes)))
        b = nodes.pop(j)
        nodes.append(builder.internal(a, b))
    return builder.build(nodes[0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
