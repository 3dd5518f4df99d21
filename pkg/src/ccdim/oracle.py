"""Ground-truth evaluation of the objective.

Forward Monte Carlo simulation of the IC process, and exact expectation by
enumerating all ``2**m`` live-edge realizations of a tiny graph.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .community import CommunityConfig
from .graph import DirectedGraph

ENUMERATION_CAP = 20
BRUTE_FORCE_BUDGET = 5 * 10**7  # subsets * realizations


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Realization:
    live_edge_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "live_edge_mask", np.asarray(self.live_edge_mask, dtype=bool))


@dataclass(frozen=True)
class ObjectiveValue:
    f: float
    sigma: float
    phi: float
    stderr: float = 0.0  # standard error of f; zero for exact values

    @classmethod
    def from_parts(cls, config: CommunityConfig, sigma: float, phi: float, stderr: float = 0.0):
        lam = config.lam
        f = (1.0 - lam) * sigma / config.node_count + lam * phi / config.phi_v
        return cls(float(f), float(sigma), float(phi), float(stderr))


def simulate_ic(graph: DirectedGraph, seeds: Iterable[int], rng: np.random.Generator) -> set[int]:
    """One IC cascade; edge coins are flipped lazily, at most once per edge."""
    graph.require_probabilities()
    ptr, dst, prob, _ = graph.out_csr
    active = set(int(s) for s in seeds)
    frontier = deque(active)
    while frontier:
        u = frontier.popleft()
        lo, hi = ptr[u], ptr[u + 1]
        if lo == hi:
            continue
        coins = rng.random(hi - lo)
        for v, p, c in zip(dst[lo:hi].tolist(), prob[lo:hi].tolist(), coins.tolist()):
            if v not in active and c < p:
                active.add(v)
                frontier.append(v)
    return active


def reachable_from(graph: DirectedGraph, realization: Realization, seeds: Iterable[int]) -> set[int]:
    mask = realization.live_edge_mask
    if len(mask) != graph.m:
        raise ValueError("realization mask length differs from edge count")
    ptr, dst, _, eid = graph.out_csr
    seen = set(int(s) for s in seeds)
    frontier = deque(seen)
    while frontier:
        u = frontier.popleft()
        for idx in range(ptr[u], ptr[u + 1]):
            v = int(dst[idx])
            if mask[eid[idx]] and v not in seen:
                seen.add(v)
                frontier.append(v)
    return seen


def monte_carlo_f(graph: DirectedGraph, config: CommunityConfig, seeds: Iterable[int],
                  num_simulations: int, rng: np.random.Generator) -> ObjectiveValue:
    if num_simulations < 1:
        raise ValueError("num_simulations must be positive")
    seeds = list(seeds)
    diversity = config.node_diversity
    value = config.node_value
    sig = np.empty(num_simulations)
    phi = np.empty(num_simulations)
    fs = np.empty(num_simulations)
    for i in range(num_simulations):
        act = np.fromiter(simulate_ic(graph, seeds, rng), dtype=np.int64)
        sig[i] = act.size
        phi[i] = diversity[act].sum()
        fs[i] = value[act].sum()
    stderr = float(fs.std(ddof=1) / math.sqrt(num_simulations)) if num_simulations > 1 else 0.0
    return ObjectiveValue.from_parts(config, sig.mean(), phi.mean(), stderr)


class RealizationTable:
    """All realizations of a tiny graph with per-node forward closures as bitsets.

    ``reach[g, s]`` has bit ``v`` set iff ``v`` is reachable from ``s`` using only
    live edges of realization ``g``; realization ``g`` keeps edge ``e`` live iff
    bit ``e`` of ``g`` is set.
    """

    def __init__(self, graph: DirectedGraph, cap: int = ENUMERATION_CAP):
        graph.require_probabilities()
        n, m = graph.node_count, graph.m
        if m > cap:
            raise EnumerationTooLarge(f"{m} edges exceed the enumeration cap of {cap}")
        if n > 63:
            raise EnumerationTooLarge("exact enumeration supports at most 63 nodes")
        self.graph = graph
        g = np.arange(1 << m, dtype=np.int64)
        live = ((g[:, None] >> np.arange(m)) & 1).astype(bool)
        prob = np.where(live, graph.prob, 1.0 - graph.prob).prod(axis=1) if m else np.ones(1)
        self.probabilities = prob
        self.live = live
        reach = np.broadcast_to(np.int64(1) << np.arange(n, dtype=np.int64), (1 << m, n)).copy()
        src, dst = graph.src, graph.dst
        changed = True
        while changed:
            changed = False
            for e in range(m):
                # every closure that contains src[e] also gets dst[e] when e is live
                hit = ((reach >> src[e]) & 1).astype(bool) & live[:, e:e + 1]
                upd = reach | (hit.astype(np.int64) << dst[e])
                if not changed and np.any(upd != reach):
                    changed = True
                reach = upd
        self.reach = reach

    def closure(self, seeds: Iterable[int]) -> np.ndarray:
        bits = np.zeros(len(self.probabilities), dtype=np.int64)
        for s in seeds:
            bits |= self.reach[:, int(s)]
        return bits

    def members(self, bits: np.ndarray) -> np.ndarray:
        n = self.graph.node_count
        return ((bits[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.float64)

    def objective(self, config: CommunityConfig, seeds: Iterable[int]) -> ObjectiveValue:
        mem = self.members(self.closure(seeds))
        sigma = float(self.probabilities @ mem.sum(axis=1))
        phi = float(self.probabilities @ (mem @ config.node_diversity))
        return ObjectiveValue.from_parts(config, sigma, phi)

    def f_values(self, config: CommunityConfig, seed_sets: list[tuple[int, ...]]) -> np.ndarray:
        value = config.node_value
        return np.array([self.probabilities @ (self.members(self.closure(s)) @ value)
                         for s in seed_sets])


def exact_f(graph: DirectedGraph, config: CommunityConfig, seeds: Iterable[int],
            cap: int = ENUMERATION_CAP, table: RealizationTable | None = None) -> ObjectiveValue:
    table = table or RealizationTable(graph, cap)
    return table.objective(config, seeds)


def brute_force_opt(graph: DirectedGraph, config: CommunityConfig, k: int,
                    cap: int = ENUMERATION_CAP, budget: int = BRUTE_FORCE_BUDGET,
                    table: RealizationTable | None = None):
    """Exhaustive best size-``k`` seed set; ties go to the lexicographically smallest set."""
    n = graph.node_count
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    if math.comb(n, k) * (1 << graph.m) > budget:
        raise EnumerationTooLarge("brute-force search exceeds the enumeration budget")
    table = table or RealizationTable(graph, cap)
    subsets = list(itertools.combinations(range(n), k))
    values = table.f_values(config, subsets)
    best = values.max()
    # lexicographic order of combinations() makes the first near-max the smallest set
    idx = int(np.flatnonzero(values >= best - 1e-12)[0])
    return frozenset(subsets[idx]), table.objective(config, subsets[idx])
