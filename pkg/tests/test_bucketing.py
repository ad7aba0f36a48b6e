import math

import numpy as np
import pytest

from graphhc.bucketing import (
    bucket_bounds,
    bucket_count_bound_check,
    bucket_from_max_volume,
    bucket_from_min_degree,
    derive_gamma,
)
from graphhc.errors import BadBetaError, EmptyClusterError
from graphhc.graph import build_graph

from conftest import clique, random_connected_graph


def star_graph(leaf_degrees):
    """Hub 0 with one spoke per entry; spoke weight = desired spoke degree."""
    edges = [(0, i + 1, float(d)) for i, d in enumerate(leaf_degrees)]
    return build_graph(edges, n_vertices=len(leaf_degrees) + 1)


def graph_with_degrees(degs):
    """Star where spoke i+1 gets degree degs[i]; hub degree is the sum."""
    return star_graph(degs)


class TestMinDegreeBucketing:
    def test_interval_membership(self):
        # spoke degrees 1, 3, 4, 20 with beta 4: B0={1,3}, B1={4}, B2={20}
        g = graph_with_degrees([1.0, 3.0, 4.0, 20.0])
        bg = bucket_from_min_degree(g, [1, 2, 3, 4], beta=4.0)
        assert bg.anchor == 1
        got = {b.exponent: sorted(b.vertices.tolist()) for b in bg.buckets}
        assert got == {0: [1, 2], 1: [3], 2: [4]}

    def test_all_degrees_equal(self):
        g = build_graph(clique(5))
        bg = bucket_from_min_degree(g, range(5), beta=2.0)
        assert bg.n_buckets == 1
        assert sorted(bg.buckets[0].vertices.tolist()) == [0, 1, 2, 3, 4]

    def test_huge_beta_single_bucket(self):
        g = graph_with_degrees([1.0, 3.0, 4.0, 20.0])
        beta = 2.0 ** (20 * (1 + 1))  # k=20, gamma=1
        bg = bucket_from_min_degree(g, [1, 2, 3, 4], beta=beta)
        assert bg.n_buckets == 1

    def test_infinite_beta(self):
        g = graph_with_degrees([1.0, 1000.0])
        bg = bucket_from_min_degree(g, [1, 2], beta=math.inf)
        assert bg.n_buckets == 1

    def test_nonnegative_exponents_only(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 12))
            g = random_connected_graph(rng, n)
            bg = bucket_from_min_degree(g, range(n), beta=1.5)
            assert all(b.exponent >= 0 for b in bg.buckets)

    def test_errors(self):
        g = graph_with_degrees([1.0, 2.0])
        with pytest.raises(EmptyClusterError):
            bucket_from_min_degree(g, [], beta=2.0)
        with pytest.raises(BadBetaError):
            bucket_from_min_degree(g, [0, 1], beta=1.0)

    def test_anchor_tie_smallest_id(self):
        g = build_graph(clique(4))
        bg = bucket_from_min_degree(g, [2, 1, 3], beta=2.0)
        assert bg.anchor == 1


class TestBucketInvariants:
    def test_union_disjoint_and_ratio(self, rng):
        for trial in range(30):
            n = int(rng.integers(2, 15))
            g = random_connected_graph(rng, n)
            beta = 1.3 + 2.0 * float(rng.random())
            variant = bucket_from_min_degree if trial % 2 else bucket_from_max_volume
            bg = variant(g, range(n), beta=beta)
            all_vs = np.concatenate([b.vertices for b in bg.buckets])
            assert sorted(all_vs.tolist()) == list(range(n))
            assert len(set(all_vs.tolist())) == n
            d0 = float(g.degree[bg.anchor])
            for b in bg.buckets:
                degs = g.degree[b.vertices]
                lo, hi = bucket_bounds(d0, beta, b.exponent)
                assert (degs >= lo).all() and (degs < hi).all()
                assert float(degs.max()) / float(degs.min()) < beta

    def test_determinism(self, rng):
        g = random_connected_graph(rng, 12)
        a = bucket_from_max_volume(g, range(12), beta=2.0)
        b = bucket_from_max_volume(g, range(12), beta=2.0)
        assert a.anchor == b.anchor
        assert [x.vertices.tolist() for x in a.buckets] == \
            [x.vertices.tolist() for x in b.buckets]


class TestMaxVolumeBucketing:
    def test_heavy_window_wins(self):
        # degrees 1,1,1 (light spokes) and a tight group of degree-10 vertices
        edges = []
        # 5-clique with weight 2.5 gives degree 10 inside the clique
        for i in range(5):
            for j in range(i + 1, 5):
                edges.append((i, j, 2.5))
        # three pendant vertices of degree 1 hanging off vertex 0
        edges += [(0, 5, 1.0), (0, 6, 1.0), (0, 7, 1.0)]
        g = build_graph(edges, n_vertices=8)
        bg = bucket_from_max_volume(g, range(8), beta=2.0)
        assert float(g.degree[bg.anchor]) >= 10.0
        heavy = [b for b in bg.buckets if bg.anchor in b.vertices.tolist()]
        assert heavy[0].exponent == 0

    def test_all_equal_degrees(self):
        g = build_graph(clique(6))
        bg = bucket_from_max_volume(g, range(6), beta=3.0)
        assert bg.n_buckets == 1

    def test_argmax_matches_quadratic_oracle(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 14))
            g = random_connected_graph(rng, n)
            beta = 1.2 + 3.0 * float(rng.random())
            bg = bucket_from_max_volume(g, range(n), beta=beta)
            vols = {}
            for u in range(n):
                du = float(g.degree[u])
                vols[u] = math.fsum(
                    float(g.degree[v]) for v in range(n)
                    if du <= float(g.degree[v]) < beta * du)
            best = max(vols.values())
            assert vols[bg.anchor] == best
            # tie rule: smallest degree, then smallest id
            winners = [u for u in range(n) if vols[u] == best]
            expect = min(winners, key=lambda u: (float(g.degree[u]), u))
            assert bg.anchor == expect

    def test_negative_exponents_allowed(self):
        g = graph_with_degrees([1.0, 8.0, 64.0])
        bg = bucket_from_max_volume(g, [1, 2, 3], beta=2.0)
        assert min(b.exponent for b in bg.buckets) < 0


class TestBucketCountBound:
    def test_sbm_with_auto_gamma(self):
        from graphhc.algorithms import AlgoConfig, spec_wrsc_full
        from graphhc.generators import gen_sbm
        g, _ = gen_sbm(5, 50, 0.3, 0.01, seed=2)
        run = spec_wrsc_full(g, AlgoConfig(k=5, seed=0))
        assert bucket_count_bound_check(run.bucketings, 5, g.n)

    def test_regular_graph_exactly_k_buckets(self):
        g = build_graph(clique(4) + clique(4, offset=4) + [(0, 4, 1.0), (3, 7, 1.0)],
                        n_vertices=8)
        # not perfectly regular, but degree spread < beta: one bucket per cluster
        gamma = derive_gamma(g)
        beta = 2.0 ** (2 * (gamma + 1))
        a = bucket_from_min_degree(g, [0, 1, 2, 3], beta=beta)
        b = bucket_from_min_degree(g, [4, 5, 6, 7], beta=beta)
        assert a.n_buckets == 1 and b.n_buckets == 1
        assert bucket_count_bound_check([a, b], 2, 8)

    def test_adversarial_geometric_degrees(self):
        # one cluster with degrees 1, beta, beta^2, ...: bound holds by
        # construction since gamma tracks the weight spread
        beta = 4.0
        degs = [beta ** i for i in range(5)]
        g = graph_with_degrees(degs)
        gamma = max(1.0, math.log(g.w_max / g.w_min) / math.log(g.n))
        b_eff = 2.0 ** (1 * (gamma + 1))
        bg = bucket_from_min_degree(g, range(1, 6), beta=b_eff)
        assert bucket_count_bound_check([bg], 1, g.n)


class TestDeriveGamma:
    def test_unit_weights(self):
        g = build_graph(clique(5))
        assert derive_gamma(g) == 1.0

    def test_wide_spread(self):
        g = build_graph([(0, 1, 1.0), (1, 2, 1000.0)])
        expect = math.log(1000.0) / math.log(3)
        assert derive_gamma(g) == pytest.approx(expect)

    def test_edgeless(self):
        g = build_graph([], n_vertices=3)
        assert derive_gamma(g) == 1.0
