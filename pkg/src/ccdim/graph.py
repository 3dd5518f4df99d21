"""Directed graphs with per-edge activation probabilities.

Edges keep the order in which they were read, so edge ``e`` has the same id
in the forward and the reverse CSR views.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np


class EdgeListError(ValueError):
    """Raised for malformed edge-list input."""


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    node_count: int
    src: np.ndarray
    dst: np.ndarray
    prob: np.ndarray
    labels: np.ndarray = field(default=None)  # dense id -> original id

    def __post_init__(self):
        if self.labels is None:
            object.__setattr__(self, "labels", np.arange(self.node_count, dtype=np.int64))
        for arr in (self.src, self.dst, self.prob, self.labels):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], labels=None) -> "DirectedGraph":
        """Build from ``(u, v)`` or ``(u, v, p)`` tuples over dense ids."""
        edges = list(edges)
        src = np.array([e[0] for e in edges], dtype=np.int64)
        dst = np.array([e[1] for e in edges], dtype=np.int64)
        prob = np.array([e[2] if len(e) > 2 else math.nan for e in edges], dtype=np.float64)
        if len(edges) and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")
        if np.any((prob < 0) | (prob > 1)):
            raise ValueError("edge probabilities must lie in [0, 1]")
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
        return cls(n, src, dst, prob, labels)

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def n(self) -> int:
        return self.node_count

    @property
    def m(self) -> int:
        return len(self.src)

    @property
    def has_probabilities(self) -> bool:
        return not np.isnan(self.prob).any()

    def require_probabilities(self):
        if not self.has_probabilities:
            raise ValueError("graph has edges without probabilities; run assign_wc first")

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.prob.tolist()))

    def _csr(self, key: np.ndarray, other: np.ndarray):
        order = np.argsort(key, kind="stable")
        ptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(key, minlength=self.node_count), out=ptr[1:])
        return ptr, other[order].copy(), self.prob[order].copy(), order.astype(np.int64)

    @cached_property
    def in_csr(self):
        """``(ptr, sources, probs, edge_ids)`` grouped by target node."""
        return self._csr(self.dst, self.src)

    @cached_property
    def out_csr(self):
        """``(ptr, targets, probs, edge_ids)`` grouped by source node."""
        return self._csr(self.src, self.dst)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.node_count)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.node_count)

    def _adjacency(self, csr) -> list[list[tuple[int, float]]]:
        ptr, nbr, p, _ = csr
        return [
            list(zip(nbr[ptr[v]:ptr[v + 1]].tolist(), p[ptr[v]:ptr[v + 1]].tolist()))
            for v in range(self.node_count)
        ]

    @property
    def out_adjacency(self) -> list[list[tuple[int, float]]]:
        return self._adjacency(self.out_csr)

    @property
    def in_adjacency(self) -> list[list[tuple[int, float]]]:
        return self._adjacency(self.in_csr)

    def with_probabilities(self, prob: np.ndarray) -> "DirectedGraph":
        prob = np.asarray(prob, dtype=np.float64)
        if prob.shape != self.prob.shape:
            raise ValueError("probability vector has the wrong length")
        if np.any((prob < 0) | (prob > 1)):
            raise ValueError("edge probabilities must lie in [0, 1]")
        return DirectedGraph(self.node_count, self.src, self.dst, prob, self.labels)

    def dense_id(self, label: int) -> int:
        idx = self._label_index.get(int(label))
        if idx is None:
            raise KeyError(label)
        return idx

    @cached_property
    def _label_index(self) -> dict[int, int]:
        return {int(lab): i for i, lab in enumerate(self.labels.tolist())}


def _open_text(source) -> TextIO:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8")
    return source


def parse_edge_list(text: str, directed: bool = True) -> DirectedGraph:
    return load_edge_list(io.StringIO(text), directed=directed)


def load_edge_list(source, directed: bool = True) -> DirectedGraph:
    """Read a whitespace separated edge list.

    Each non-comment line is ``u v [p]``. Node ids may be arbitrary integers and
    are re-mapped to ``0..n-1`` in ascending order of the original id. With
    ``directed=False`` every line yields both ``(u, v)`` and ``(v, u)``.
    """
    fh = _open_text(source)
    raw = []
    try:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise EdgeListError(f"line {lineno}: expected 'u v [p]', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                p = float(parts[2]) if len(parts) == 3 else math.nan
            except ValueError:
                raise EdgeListError(f"line {lineno}: cannot parse {line!r}") from None
            if u == v:
                raise EdgeListError(f"line {lineno}: self-loop on node {u}")
            if len(parts) == 3 and not 0.0 <= p <= 1.0:
                raise EdgeListError(f"line {lineno}: probability {p} outside [0, 1]")
            raw.append((u, v, p, lineno))
    finally:
        if fh is not source:
            fh.close()

    labels = sorted({u for u, _, _, _ in raw} | {v for _, v, _, _ in raw})
    index = {lab: i for i, lab in enumerate(labels)}
    seen: dict[tuple[int, int], int] = {}
    edges = []
    for u, v, p, lineno in raw:
        pairs = [(u, v)] if directed else [(u, v), (v, u)]
        for a, b in pairs:
            if (a, b) in seen:
                raise EdgeListError(
                    f"line {lineno}: duplicate edge {a}->{b} (first seen on line {seen[(a, b)]})"
                )
            seen[(a, b)] = lineno
            edges.append((index[a], index[b], p))
    return DirectedGraph.from_edges(len(labels), edges, labels=labels)


def write_edge_list(graph: DirectedGraph, dest) -> None:
    """Write ``graph`` in the format read by :func:`load_edge_list`, using original ids."""
    lines = []
    for u, v, p in zip(graph.labels[graph.src].tolist(), graph.labels[graph.dst].tolist(),
                       graph.prob.tolist()):
        lines.append(f"{u} {v}" if math.isnan(p) else f"{u} {v} {p!r}")
    text = "\n".join(lines) + ("\n" if lines else "")
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        dest.write(text)


def assign_wc(graph: DirectedGraph) -> DirectedGraph:
    """Weighted Cascade probabilities: ``p(u, v) = 1 / indegree(v)``."""
    indeg = graph.in_degree
    if graph.m == 0:
        return graph.with_probabilities(graph.prob.copy())
    return graph.with_probabilities(1.0 / indeg[graph.dst])


def random_powerlaw_graph(n: int, m: int, exponent: float = 2.1, seed: int = 0) -> DirectedGraph:
    """Directed Chung-Lu style graph with ``m`` distinct edges and heavy-tailed degrees.

    Endpoint weights follow ``i ** (-1 / (exponent - 1))``; out- and in-weights use
    independent node permutations. Probabilities are left unset.
    """
    if m > n * (n - 1):
        raise ValueError("too many edges for a simple directed graph")
    rng = np.random.default_rng(seed)
    w = np.arange(1, n + 1, dtype=np.float64) ** (-1.0 / (exponent - 1.0))
    w /= w.sum()
    w_out = w[rng.permutation(n)]
    w_in = w[rng.permutation(n)]
    chosen: set[tuple[int, int]] = set()
    edges = []
    while len(edges) < m:
        batch = max(1024, 2 * (m - len(edges)))
        us = rng.choice(n, size=batch, p=w_out)
        vs = rng.choice(n, size=batch, p=w_in)
        for u, v in zip(us.tolist(), vs.tolist()):
            if u != v and (u, v) not in chosen:
                chosen.add((u, v))
                edges.append((u, v))
                if len(edges) == m:
                    break
    return DirectedGraph.from_edges(n, edges)
