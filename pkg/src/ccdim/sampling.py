"""Generalized reverse-reachable (G-RR) set sampling.

A G-RR set holds one RR set per community of every metric, all traced on the
same realization. Under a sentinel set, traversals that touch a sentinel node
stop and store :data:`COVERED` instead of nodes.
"""
from __future__ import annotations

import os
from collections import deque
from functools import cached_property
from typing import Iterable, Mapping, Union

import numpy as np

from . import _kernels
from .community import CommunityConfig
from .graph import DirectedGraph

FORMAT_VERSION = 1


class _Covered:
    __slots__ = ()

    def __repr__(self):
        return "COVERED"

    def __reduce__(self):
        return "COVERED"


COVERED = _Covered()

RREntry = Union[_Covered, frozenset]
GRRSet = Mapping[tuple[str, int], RREntry]


def sample_grr(graph: DirectedGraph, config: CommunityConfig, sentinel: Iterable[int],
               rng: np.random.Generator, flips: dict[int, bool] | None = None) -> dict:
    """Sample one G-RR set (reference implementation, pure Python).

    ``flips``, if given, receives every memoized edge coin as ``edge id -> live``.
    """
    graph.require_probabilities()
    ptr, src, prob, eid = graph.in_csr
    block = set(int(s) for s in sentinel)
    memo = {} if flips is None else flips
    key_ptr, key_nodes = config.key_arrays
    out = {}
    for e, key in enumerate(config.keys):
        members = key_nodes[key_ptr[e]:key_ptr[e + 1]]
        root = int(members[rng.integers(len(members))])
        if root in block:
            out[key] = COVERED
            continue
        found = {root}
        queue = deque([root])
        hit = False
        while queue and not hit:
            u = queue.popleft()
            for idx in range(ptr[u], ptr[u + 1]):
                w = int(src[idx])
                if w in found:
                    continue
                ed = int(eid[idx])
                live = memo.get(ed)
                if live is None:
                    live = memo[ed] = bool(rng.random() < prob[idx])
                if not live:
                    continue
                if w in block:
                    hit = True
                    break
                found.add(w)
                queue.append(w)
        out[key] = COVERED if hit else frozenset(found)
    return out


class GRRCollection:
    """Growable collection of G-RR sets stored as flat arrays.

    Entry ``t`` belongs to G-RR set ``t // n_keys`` and community key
    ``keys[t % n_keys]``; its nodes are ``nodes[entry_ptr[t]:entry_ptr[t+1]]``.
    """

    def __init__(self, node_count: int, keys, weights, sentinel: Iterable[int] = ()):
        self.node_count = int(node_count)
        self.keys = [tuple(k) for k in keys]
        self.weights = np.asarray(weights, dtype=np.float64)
        self.sentinel = frozenset(int(s) for s in sentinel)
        self.lengths = np.zeros(0, dtype=np.int64)
        self.covered = np.zeros(0, dtype=bool)
        self.nodes = np.zeros(0, dtype=np.int64)

    @classmethod
    def empty(cls, config: CommunityConfig, sentinel: Iterable[int] = ()) -> "GRRCollection":
        return cls(config.node_count, config.keys, config.key_weights, sentinel)

    @property
    def n_keys(self) -> int:
        return len(self.keys)

    @property
    def theta(self) -> int:
        return len(self.lengths) // self.n_keys

    def __len__(self):
        return self.theta

    @cached_property
    def sentinel_mask(self) -> np.ndarray:
        mask = np.zeros(self.node_count, dtype=bool)
        mask[list(self.sentinel)] = True
        return mask

    def _invalidate(self):
        for name in ("entry_ptr", "index", "entry_keys"):
            self.__dict__.pop(name, None)

    def append_raw(self, lengths, covered, nodes):
        if len(lengths) % self.n_keys:
            raise ValueError("raw block is not a whole number of G-RR sets")
        self.lengths = np.concatenate([self.lengths, lengths])
        self.covered = np.concatenate([self.covered, covered])
        self.nodes = np.concatenate([self.nodes, nodes])
        self._invalidate()

    def append_sets(self, sets: Iterable[GRRSet]):
        lengths, covered, nodes = [], [], []
        for s in sets:
            for key in self.keys:
                entry = s[key]
                if entry is COVERED:
                    lengths.append(0)
                    covered.append(True)
                else:
                    members = sorted(entry)
                    lengths.append(len(members))
                    covered.append(False)
                    nodes.extend(members)
        self.append_raw(np.array(lengths, dtype=np.int64), np.array(covered, dtype=bool),
                        np.array(nodes, dtype=np.int64))

    @cached_property
    def entry_ptr(self) -> np.ndarray:
        ptr = np.zeros(len(self.lengths) + 1, dtype=np.int64)
        np.cumsum(self.lengths, out=ptr[1:])
        return ptr

    @cached_property
    def entry_keys(self) -> np.ndarray:
        return np.arange(len(self.lengths), dtype=np.int64) % self.n_keys

    @cached_property
    def index(self) -> tuple[np.ndarray, np.ndarray]:
        """Inverted index ``(ptr, entries)``: entries holding node ``v`` are
        ``entries[ptr[v]:ptr[v+1]]``, in increasing entry order."""
        owner = np.repeat(np.arange(len(self.lengths), dtype=np.int64), self.lengths)
        order = np.argsort(self.nodes, kind="stable")
        ptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.nodes, minlength=self.node_count), out=ptr[1:])
        return ptr, owner[order]

    def entry(self, i: int, e: int) -> RREntry:
        t = i * self.n_keys + e
        if self.covered[t]:
            return COVERED
        return frozenset(self.nodes[self.entry_ptr[t]:self.entry_ptr[t + 1]].tolist())

    def grr_set(self, i: int) -> dict:
        if not 0 <= i < self.theta:
            raise IndexError(i)
        return {key: self.entry(i, e) for e, key in enumerate(self.keys)}

    @property
    def sets(self) -> list[dict]:
        return [self.grr_set(i) for i in range(self.theta)]

    def occurrences(self, node: int) -> list[tuple[int, str, int]]:
        ptr, ent = self.index
        return [(int(t) // self.n_keys, *self.keys[int(t) % self.n_keys])
                for t in ent[ptr[node]:ptr[node + 1]]]

    def covered_key_counts(self, covered: np.ndarray) -> np.ndarray:
        return np.bincount(self.entry_keys[covered], minlength=self.n_keys)

    def coverage_from_counts(self, counts: np.ndarray) -> float:
        return float(counts @ self.weights)


def _sampler_arrays(graph: DirectedGraph):
    graph.require_probabilities()
    return graph.in_csr


def extend_collection(collection: GRRCollection, count: int, graph: DirectedGraph,
                      config: CommunityConfig, rng: np.random.Generator) -> GRRCollection:
    """Append ``count`` fresh G-RR sets sampled under the collection's sentinel."""
    if count <= 0:
        return collection
    if list(config.keys) != collection.keys:
        raise ValueError("collection was built for a different community config")
    ptr, src, prob, eid = _sampler_arrays(graph)
    key_ptr, key_nodes = config.key_arrays
    seed = int(rng.integers(0, 2**32 - 1))
    lengths, covered, nodes = _kernels.sample_grr_batch(
        ptr, src, prob, eid, key_ptr, key_nodes, collection.sentinel_mask,
        graph.m, int(count), seed)
    collection.append_raw(lengths, covered, nodes)
    return collection


def sample_collection(graph: DirectedGraph, config: CommunityConfig, theta: int,
                      rng: np.random.Generator, sentinel: Iterable[int] = ()) -> GRRCollection:
    coll = GRRCollection.empty(config, sentinel)
    return extend_collection(coll, theta, graph, config, rng)


def avg_entry_nodes(collection: GRRCollection) -> float:
    if collection.theta < 1:
        raise ValueError("empty collection")
    return float(collection.lengths.sum()) / collection.theta


def save_collection(collection: GRRCollection, path) -> None:
    """Binary dump (``.npz``) with a format version and one slot per community key."""
    np.savez_compressed(
        path,
        version=np.array([FORMAT_VERSION]),
        node_count=np.array([collection.node_count]),
        key_metrics=np.array([k[0] for k in collection.keys]),
        key_index=np.array([k[1] for k in collection.keys], dtype=np.int64),
        weights=collection.weights,
        sentinel=np.array(sorted(collection.sentinel), dtype=np.int64),
        lengths=collection.lengths,
        covered=collection.covered,
        nodes=collection.nodes,
    )


def load_collection(path) -> GRRCollection:
    if isinstance(path, (str, os.PathLike)) and not os.path.exists(path) \
            and os.path.exists(str(path) + ".npz"):
        path = str(path) + ".npz"
    with np.load(path, allow_pickle=False) as data:
        version = int(data["version"][0])
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported collection format version {version}")
        keys = list(zip(data["key_metrics"].tolist(), data["key_index"].tolist()))
        coll = GRRCollection(int(data["node_count"][0]), keys, data["weights"],
                             data["sentinel"].tolist())
        coll.append_raw(data["lengths"], data["covered"], data["nodes"])
    return coll
