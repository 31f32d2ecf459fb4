"""Adaptive weights community detection on undirected graphs."""
from ._accel import numba_enabled, use_numba
from .detect import (CIRCLE, DEBIASED, PLUS, AwcdConfig, BiasIndicator, CountPair, Variant,
                     VariantTag, bernoulli_kl, count_matrices, estimate_thetas, initial_test_matrix,
                     iterate_from, pair_counts, run, step, step_with_start, test_statistic, threshold)
from .evaluation import (exact_recovery, modularity, partition_from_weights, rand_index,
                         tune_lambda)
from .graph import (Graph, GraphFormatError, SelfLoopError, bounded_distances, format_edge_list,
                    k_ring, k_rings_all, load_edge_list, write_edge_list)
from .sbm import SbmSpec, derive_seed, oracle_start, oracle_starts, sample, true_weights
from .theory import ak_bk, consistency_polygon, expected_counts_k1

__version__ = "0.1.0"
