"""Comparison seed-selection methods."""
from __future__ import annotations

import numpy as np

from .community import CommunityConfig, single_community_config
from .ghist import RunResult, g_hist_no_sentinel
from .graph import DirectedGraph
from .oracle import monte_carlo_f

GREEDY_SIM_MAX_NODES = 500
GREEDY_SIM_BUDGET = 2_000_000  # total cascades


def max_degree(graph: DirectedGraph, k: int) -> list[int]:
    """Top-``k`` nodes by out-degree, ties broken by node id."""
    order = np.lexsort((np.arange(graph.node_count), -graph.out_degree))
    return order[:k].tolist()


def random_seeds(graph: DirectedGraph, k: int, rng: np.random.Generator) -> list[int]:
    return sorted(rng.choice(graph.node_count, size=k, replace=False).tolist())


def greedy_sim(graph: DirectedGraph, config: CommunityConfig, k: int, sims: int,
               rng: np.random.Generator) -> list[int]:
    """Hill climbing on Monte Carlo estimates of f. Only for small graphs."""
    n = graph.node_count
    if n > GREEDY_SIM_MAX_NODES or n * k * sims > GREEDY_SIM_BUDGET:
        raise ValueError(f"greedy_sim budget exceeded (n={n}, k={k}, sims={sims})")
    chosen: list[int] = []
    current = 0.0
    for _ in range(k):
        best, best_gain = -1, -np.inf
        for v in range(n):
            if v in chosen:
                continue
            val = monte_carlo_f(graph, config, chosen + [v], sims, rng).f
            if val - current > best_gain:
                best, best_gain = v, val - current
        chosen.append(best)
        current += best_gain
    return chosen


def im_only(graph: DirectedGraph, k: int, eps: float, delta: float, rng,
            config: CommunityConfig | None = None) -> RunResult:
    """Influence-only sampling solver: no diversity term, no sentinel.

    With the default single-community config the samples are plain RR sets;
    passing a multi-metric ``config`` gives the stratified-root variant.
    """
    base = config if config is not None else single_community_config(graph.node_count)
    return g_hist_no_sentinel(graph, base.with_lambda(0.0), k, eps, delta, rng)
