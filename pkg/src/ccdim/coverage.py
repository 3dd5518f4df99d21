"""Weighted generalized coverage and the MaxCoverage greedy.

Coverage is tracked as integer counts of covered entries per community key and
only turned into a weighted sum on demand, so scores never accumulate
floating-point drift.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .sampling import GRRCollection

TIE_RTOL = 1e-12


@dataclass
class GreedyTrace:
    selected: list[int]
    prefix_coverage: list[float]
    upper_bound_coverage: float
    prefix_upper: list[float] = field(default_factory=list)
    initial_seeds: frozenset = frozenset()

    def prefix(self, a: int) -> list[int]:
        return self.selected[:a]


def covered_mask(seeds: Iterable[int], collection: GRRCollection) -> np.ndarray:
    """Entries covered by ``seeds``; COVERED placeholders always count."""
    covered = collection.covered.copy()
    ptr, ent = collection.index
    for s in seeds:
        _kernels.cover_entries_of(int(s), ptr, ent, covered)
    return covered


def omega(seeds: Iterable[int], collection: GRRCollection) -> float:
    counts = collection.covered_key_counts(covered_mask(seeds, collection))
    return collection.coverage_from_counts(counts)


def marginal_gain(node: int, seeds: Iterable[int], collection: GRRCollection) -> float:
    covered = covered_mask(seeds, collection)
    ptr, ent = collection.index
    mine = ent[ptr[node]:ptr[node + 1]]
    fresh = mine[~covered[mine]]
    counts = np.bincount(collection.entry_keys[fresh], minlength=collection.n_keys)
    return collection.coverage_from_counts(counts)


def pick_max(scores: np.ndarray, available: np.ndarray) -> int:
    """Index of the largest available score; near ties go to the smallest id."""
    masked = np.where(available, scores, -np.inf)
    best = masked.max()
    tol = TIE_RTOL * max(1.0, abs(best))
    return int(np.flatnonzero(masked >= best - tol)[0])


def _residual_counts(collection: GRRCollection, covered: np.ndarray) -> np.ndarray:
    """``counts[v, key]`` = number of uncovered entries of ``key`` containing ``v``."""
    n, n_keys = collection.node_count, collection.n_keys
    owner_key = np.repeat(collection.entry_keys, collection.lengths)
    live = np.repeat(~covered, collection.lengths)
    flat = collection.nodes[live] * n_keys + owner_key[live]
    return np.bincount(flat, minlength=n * n_keys).reshape(n, n_keys).astype(np.int64)


def max_coverage_greedy(collection: GRRCollection, k: int,
                        initial_seeds: Iterable[int] = ()) -> GreedyTrace:
    """Pick ``k`` nodes from outside ``initial_seeds`` greedily by marginal coverage.

    Also returns the running upper bound on the coverage of any size-``k`` set:
    the minimum over prefixes of ``Omega(prefix)`` plus the ``k`` largest
    residual marginal coverages.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    return greedy_with_bound(collection, k, initial_seeds, k)


def greedy_with_bound(collection: GRRCollection, picks: int, initial_seeds: Iterable[int],
                      bound_size: int) -> GreedyTrace:
    """Greedy with ``picks >= 0`` selections; the bound uses the top ``bound_size`` gains."""
    initial = frozenset(int(s) for s in initial_seeds)
    n = collection.node_count
    k = picks
    if k < 0 or len(initial) + k > n:
        raise ValueError("not enough candidate nodes")
    ptr, ent = collection.index
    ent_ptr = collection.entry_ptr
    n_keys = collection.n_keys
    w = collection.weights

    covered = collection.covered.copy()
    for s in initial:
        _kernels.cover_entries_of(s, ptr, ent, covered)
    counts = _residual_counts(collection, covered)
    key_cov = collection.covered_key_counts(covered)
    available = np.ones(n, dtype=bool)
    available[list(initial)] = False

    selected: list[int] = []
    prefix = [float(key_cov @ w)]
    prefix_upper: list[float] = []
    scores = _kernels.scores_from_counts(counts, w)
    mark = np.zeros(n, dtype=np.bool_)
    for a in range(k + 1):
        prefix_upper.append(prefix[-1] + _kernels.top_k_sum(scores, available, bound_size))
        if a == k:
            break
        v = _kernels.argmax_available(scores, available, TIE_RTOL)
        selected.append(v)
        available[v] = False
        gained = np.zeros(n_keys, dtype=np.int64)
        _kernels.cover_node(v, ptr, ent, covered, ent_ptr, collection.nodes, n_keys,
                            counts, gained, w, scores, mark)
        key_cov = key_cov + gained
        prefix.append(float(key_cov @ w))
    return GreedyTrace(selected, prefix, min(prefix_upper), prefix_upper, initial)
