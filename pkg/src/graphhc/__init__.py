"""Hierarchical clustering for well-clustered graphs.

Spectral clustering plus degree bucketing reduces a graph to a small
vertex-weighted contracted graph whose exact sparsest cuts drive the tree
merge; a caterpillar variant covers degree-balanced inputs. Exact
Dasgupta-cost evaluation, brute-force oracles, baselines, and block-model
generators round out the package.
"""

from .algorithms import (
    AlgoConfig,
    HCRun,
    balanced_random,
    crossing_cost_identity,
    decomposition_identity,
    eta_sweep,
    k_sweep,
    run_algorithm,
    spec_caterpillar,
    spec_caterpillar_full,
    spec_wrsc,
    spec_wrsc_full,
)
from .bucketing import (
    Bucket,
    Bucketing,
    bucket_count_bound_check,
    bucket_from_max_volume,
    bucket_from_min_degree,
    derive_gamma,
)
from .bench import RunRecord, bench_matrix, verify_suite
from .errors import GraphHCError
from .estimators import (
    HierarchicalGraphClustering,
    SpectralGraphClustering,
    check_affinity,
    graph_from_affinity,
)
from .generators import gaussian_kernel_graph, gen_hsbm, gen_sbm
from .graph import (
    ContractedGraph,
    Graph,
    Partition,
    build_graph,
    conductance,
    contract,
    cut_weight,
    graph_conductance_exact,
    induced_subgraph,
    is_connected,
    read_edge_list,
    weighted_sparsity,
    write_edge_list,
)
from .spectral import (
    Embedding,
    SpectrumReport,
    bottom_eigs,
    kmeans,
    spectral_clustering,
    spectral_embedding,
    sweep_cut,
)
from .tree import (
    HCTree,
    average_linkage,
    balanced_tree,
    brute_force_opt,
    brute_force_wopt,
    caterpillar_merge,
    dasgupta_cost,
    dasgupta_cost_naive,
    flat_clusters,
    lca,
    replace_leaf,
    tree_from_json,
    tree_to_json,
    weighted_dasgupta_cost,
)
from .wrsc import min_sparsity_cut, min_sparsity_cut_heuristic, wrsc_tree

__version__ = "0.1.0"
