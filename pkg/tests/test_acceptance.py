"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with the measured statistic (run with -s to see them all).

Numeric gates involving two float evaluations of mathematically equal
quantities carry a 1e-9 relative allowance for per-term rounding; every
other tolerance is stated inline.
"""

import math
import time

import numpy as np
import pytest

from graphhc.algorithms import (
    AlgoConfig,
    crossing_cost_identity,
    degree_sorted_balanced,
    spec_wrsc_full,
)
from graphhc.bucketing import bucket_count_bound_check
from graphhc.generators import gen_sbm
from graphhc.graph import graph_conductance_exact, is_connected
from graphhc.spectral import bottom_eigs, spectral_clustering
from graphhc.tree import (
    brute_force_opt,
    dasgupta_cost,
    dasgupta_cost_naive,
)
from graphhc.wrsc import min_sparsity_cut

from conftest import random_binary_tree, random_connected_graph
from test_spectral import best_permutation_agreement
from test_wrsc import random_contracted, sparsity_oracle


def report(name, detail):
    print(f"\nPASS {name}: {detail}")


def connected_sbm(k, n_k, p, q, seed):
    """Deterministic: bumps the seed by 100 until the sample is connected."""
    while True:
        g, parts = gen_sbm(k, n_k, p, q, seed=seed)
        if is_connected(g):
            return g, parts
        seed += 100


def test_criterion_1_oracle_optimality_gap():
    """spec_wrsc with a k-sweep to 4 stays within 3x of brute-force OPT
    (and never below it) on 200 random connected weighted graphs, n <= 8."""
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(rng, n)
        best = dasgupta_cost(g, degree_sorted_balanced(g))  # the k'=1 leg
        for k in range(2, min(4, n) + 1):
            run = spec_wrsc_full(g, AlgoConfig(k=k, seed=0))
            best = min(best, run.cost)
            # criterion 3 applies to every spec_wrsc run in the suite
            lhs, rhs = crossing_cost_identity(g, run)
            assert abs(lhs - rhs) <= 1e-9 * g.total_volume
        _, opt = brute_force_opt(g)
        assert best >= opt * (1 - 1e-9)
        ratio = best / opt if opt > 0 else 1.0
        worst = max(worst, ratio)
        assert ratio <= 3.0
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report("criterion-1 oracle-optimality-gap",
           f"worst ratio {worst:.3f} <= 3.0 over 200 graphs in {elapsed:.1f}s")


def test_criterion_2_exact_cost_engine():
    """O(m*depth) cost equals the naive ancestor-set oracle exactly on 500
    random (graph, tree) pairs with n <= 64."""
    rng = np.random.default_rng(7)
    for _ in range(500):
        n = int(rng.integers(2, 65))
        g = random_connected_graph(rng, n, extra_frac=0.15)
        t = random_binary_tree(rng, n)
        assert dasgupta_cost(g, t) == dasgupta_cost_naive(g, t)
    report("criterion-2 exact-cost-engine", "500/500 pairs bit-identical")


def test_criterion_3_crossing_cost_identity():
    """Sum of bucket-crossing edge costs equals the weighted cost of the
    contracted-graph tree, within 1e-9 * vol(G), on SBM and random runs."""
    worst = 0.0
    cases = [connected_sbm(3, 20, 0.5, 0.03, seed=s)[0] for s in range(3)]
    rng = np.random.default_rng(33)
    cases += [random_connected_graph(rng, int(rng.integers(6, 20)))
              for _ in range(10)]
    checked = 0
    for g in cases:
        if not is_connected(g):
            continue
        for k in (2, 3):
            run = spec_wrsc_full(g, AlgoConfig(k=k, seed=1))
            lhs, rhs = crossing_cost_identity(g, run)
            gap = abs(lhs - rhs) / g.total_volume
            worst = max(worst, gap)
            assert gap <= 1e-9
            checked += 1
    report("criterion-3 crossing-cost-identity",
           f"worst |lhs-rhs|/vol = {worst:.2e} over {checked} runs")


def test_criterion_4_wrsc_exactness():
    """Enumerated sparsest cut matches an independent double loop bit for
    bit on 200 contracted graphs with |V| <= 12."""
    rng = np.random.default_rng(4)
    for _ in range(200):
        k = int(rng.integers(2, 13))
        h = random_contracted(rng, k)
        _, sp = min_sparsity_cut(h)
        expect, _ = sparsity_oracle(h)
        assert sp == expect
    report("criterion-4 wrsc-exactness", "200/200 sparsity values bit-equal")


def test_criterion_5_cheeger_sandwich():
    """lambda_2/2 <= Phi_G <= sqrt(2 lambda_2) with exact Phi_G on 50 random
    connected graphs (n <= 16); all eigenvalues within [-1e-8, 2+1e-8]."""
    rng = np.random.default_rng(55)
    for _ in range(50):
        n = int(rng.integers(4, 17))
        g = random_connected_graph(rng, n)
        phi, _ = graph_conductance_exact(g)
        lam = bottom_eigs(g, n).eigenvalues
        assert (lam >= -1e-8).all() and (lam <= 2.0 + 1e-8).all()
        lam2 = float(lam[1])
        assert lam2 / 2.0 - 1e-9 <= phi <= math.sqrt(2.0 * lam2) + 1e-9
    report("criterion-5 cheeger-sandwich", "50/50 graphs inside the sandwich")


def test_criterion_6_sbm_cost_comparison():
    """Fig-2(b) shape at desk scale: SBM k=5, n_k=200, q=0.002,
    p in {0.06, 0.1, 0.2}, 5 seeds; mean spec_wrsc cost within 1.05x of mean
    average-linkage cost at every p."""
    from graphhc.tree import average_linkage
    start = time.perf_counter()
    ratios = {}
    for p in (0.06, 0.1, 0.2):
        cw, ca = [], []
        for seed in range(5):
            g, _ = connected_sbm(5, 200, p, 0.002, seed=seed)
            run = spec_wrsc_full(g, AlgoConfig(k=5, seed=seed))
            lhs, rhs = crossing_cost_identity(g, run)
            assert abs(lhs - rhs) <= 1e-9 * g.total_volume
            cw.append(run.cost)
            ca.append(dasgupta_cost(g, average_linkage(g)))
        ratios[p] = float(np.mean(cw) / np.mean(ca))
        assert ratios[p] <= 1.05, f"p={p}: ratio {ratios[p]:.4f}"
    elapsed = time.perf_counter() - start
    assert elapsed < 600.0
    report("criterion-6 sbm-cost-comparison",
           "ratios " + ", ".join(f"p={p}: {r:.3f}" for p, r in ratios.items())
           + f" (all <= 1.05) in {elapsed:.0f}s")


def test_criterion_7_nearly_linear_scaling():
    """Fig-2(a) shape: SBM n_k in {100,200,400,800}, p=0.1, q=0.002; the
    fitted log-log slope of spec_wrsc wall time against m stays <= 1.5."""
    pts = []
    for n_k in (100, 200, 400, 800):
        g, _ = connected_sbm(5, n_k, 0.1, 0.002, seed=0)
        t0 = time.perf_counter()
        spec_wrsc_full(g, AlgoConfig(k=5, seed=0))
        pts.append((g.m, time.perf_counter() - t0))
    x = np.log([m for m, _ in pts])
    y = np.log([t for _, t in pts])
    slope = float(np.polyfit(x, y, 1)[0])
    assert slope <= 1.5
    report("criterion-7 nearly-linear-scaling",
           f"slope {slope:.2f} <= 1.5 over m = {[m for m, _ in pts]}")


def test_criterion_8_bucket_bound():
    """With beta = 2^(k(gamma+1)) and auto gamma, the total bucket count
    stays within k + ceil(log2 n) on every suite graph."""
    cases = []
    for p in (0.06, 0.1, 0.2):
        cases.append((connected_sbm(5, 100, p, 0.002, seed=0)[0], 5))
    cases.append((connected_sbm(3, 50, 0.3, 0.01, seed=1)[0], 3))
    rng = np.random.default_rng(88)
    for _ in range(20):
        n = int(rng.integers(4, 31))
        g = random_connected_graph(rng, n)
        cases.append((g, int(rng.integers(2, min(5, n + 1)))))
    for g, k in cases:
        run = spec_wrsc_full(g, AlgoConfig(k=k, seed=0))
        assert bucket_count_bound_check(run.bucketings, k, g.n), \
            f"{run.n_buckets} buckets on n={g.n}, k={k}"
    report("criterion-8 bucket-bound",
           f"{len(cases)} graphs within k + ceil(log2 n)")


def test_criterion_9_planted_recovery():
    """Spectral clustering recovers >= 95% of planted labels on
    SBM(5, 100, 0.1, 0.002) for each of 5 seeds."""
    scores = []
    for seed in range(5):
        g, planted = connected_sbm(5, 100, 0.1, 0.002, seed=seed)
        parts = spectral_clustering(g, 5, seed=seed)
        agree = best_permutation_agreement(parts.labels, planted.labels)
        assert agree >= 0.95, f"seed {seed}: {agree:.3f}"
        scores.append(agree)
    report("criterion-9 planted-recovery",
           "agreements " + ", ".join(f"{s:.3f}" for s in scores))


def test_criterion_10_degree_lower_bound():
    """Brute-force OPT >= (2 Phi/9) * max(vol^2/maxdeg, mindeg * n^2) on 100
    random connected graphs (n <= 8), within 1e-9 relative tolerance."""
    rng = np.random.default_rng(10)
    for _ in range(100):
        n = int(rng.integers(3, 9))
        g = random_connected_graph(rng, n)
        _, opt = brute_force_opt(g)
        phi, _ = graph_conductance_exact(g)
        bound = (2.0 * phi / 9.0) * max(
            g.total_volume ** 2 / float(g.degree.max()),
            float(g.degree.min()) * n * n)
        assert opt >= bound * (1.0 - 1e-9)
    report("criterion-10 degree-lower-bound", "100/100 graphs respect the bound")
