"""Composite community-aware diversified influence maximization."""
from .community import CommunityConfig, MetricPartition, f_min, hash_partition, load_communities
from .graph import DirectedGraph, assign_wc, load_edge_list
from .ghist import RunResult, g_hist, g_hist_no_sentinel, remaining_set, sentinel_set
from .oracle import brute_force_opt, exact_f, monte_carlo_f

__all__ = [
    "CommunityConfig", "DirectedGraph", "MetricPartition", "RunResult", "assign_wc",
    "brute_force_opt", "exact_f", "f_min", "g_hist", "g_hist_no_sentinel", "hash_partition",
    "load_communities", "load_edge_list", "monte_carlo_f", "remaining_set", "sentinel_set",
]
