"""Multi-metric community structures and the objective's normalizing constants.

Community file format (whitespace separated, ``#`` starts a comment)::

    lambda 0.7
    metric q1 0.4 0.4 1.0 1.6     # metric id, weight, one coefficient per community
    metric q2 0.6 0.4 0.8 1.2 1.6
    node 17 0 3                   # original node id, community index per metric
    node 18 2 1

``node`` lines list community indices in the order the metrics were declared.
Every graph node needs exactly one ``node`` line.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .graph import DirectedGraph

WEIGHT_TOL = 1e-9


class CommunityError(ValueError):
    """Raised when a community configuration is invalid."""


@dataclass(frozen=True, eq=False)
class MetricPartition:
    metric_id: str
    assignment: np.ndarray  # node -> community index
    weight: float
    coefficients: np.ndarray  # one a_{q,j} per community

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.int64)
        coefficients = np.asarray(self.coefficients, dtype=np.float64)
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "coefficients", coefficients)
        r = len(coefficients)
        if r == 0:
            raise CommunityError(f"metric {self.metric_id}: no communities")
        if np.any(coefficients <= 0) or not np.all(np.isfinite(coefficients)):
            raise CommunityError(f"metric {self.metric_id}: coefficients must be positive")
        if not 0 < self.weight <= 1:
            raise CommunityError(f"metric {self.metric_id}: weight {self.weight} outside (0, 1]")
        if assignment.size and (assignment.min() < 0 or assignment.max() >= r):
            raise CommunityError(f"metric {self.metric_id}: community index outside 0..{r - 1}")
        sizes = np.bincount(assignment, minlength=r)
        empty = np.flatnonzero(sizes == 0)
        if empty.size:
            raise CommunityError(f"metric {self.metric_id}: community {int(empty[0])} is empty")
        assignment.setflags(write=False)
        coefficients.setflags(write=False)

    @property
    def community_count(self) -> int:
        return len(self.coefficients)

    @cached_property
    def community_sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.community_count)

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == j)


@dataclass(frozen=True, eq=False)
class CommunityConfig:
    partitions: tuple[MetricPartition, ...]
    lam: float

    def __post_init__(self):
        parts = tuple(self.partitions)
        object.__setattr__(self, "partitions", parts)
        if not parts:
            raise CommunityError("at least one metric is required")
        if not 0 <= self.lam <= 1:
            raise CommunityError(f"lambda {self.lam} outside [0, 1]")
        ids = [p.metric_id for p in parts]
        if len(set(ids)) != len(ids):
            raise CommunityError("metric ids must be unique")
        sizes = {len(p.assignment) for p in parts}
        if len(sizes) != 1:
            raise CommunityError("partitions cover different node counts")
        total = sum(p.weight for p in parts)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise CommunityError(f"metric weights sum to {total!r}, expected 1")
        if total != 1.0:
            # renormalize so the weight-sum identity holds to rounding
            parts = tuple(
                MetricPartition(p.metric_id, p.assignment, p.weight / total, p.coefficients)
                for p in parts
            )
            object.__setattr__(self, "partitions", parts)

    @property
    def node_count(self) -> int:
        return len(self.partitions[0].assignment)

    @property
    def metric_count(self) -> int:
        return len(self.partitions)

    @cached_property
    def keys(self) -> list[tuple[str, int]]:
        """Community keys ``(metric_id, j)`` in canonical order."""
        return [(p.metric_id, j) for p in self.partitions for j in range(p.community_count)]

    @cached_property
    def key_sizes(self) -> np.ndarray:
        return np.concatenate([p.community_sizes for p in self.partitions]).astype(np.int64)

    @cached_property
    def key_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(ptr, nodes)``: members of key ``e`` are ``nodes[ptr[e]:ptr[e+1]]``."""
        chunks = [p.members(j) for p in self.partitions for j in range(p.community_count)]
        ptr = np.zeros(len(chunks) + 1, dtype=np.int64)
        np.cumsum([len(c) for c in chunks], out=ptr[1:])
        return ptr, np.concatenate(chunks).astype(np.int64)

    @cached_property
    def phi_v(self) -> float:
        return phi_V(self)

    @cached_property
    def key_weights(self) -> np.ndarray:
        return np.array(
            [entry_weight(self, None, q, j) for q, j in self.keys], dtype=np.float64
        )

    @cached_property
    def node_diversity(self) -> np.ndarray:
        """Per node ``sum_q w_q * a_{q, c_q(v)}``; summing over ``I_g(S)`` gives phi_g(S)."""
        out = np.zeros(self.node_count)
        for p in self.partitions:
            out += p.weight * p.coefficients[p.assignment]
        return out

    @cached_property
    def node_value(self) -> np.ndarray:
        """Per node contribution to f when activated."""
        n = self.node_count
        return (1.0 - self.lam) / n + self.lam * self.node_diversity / self.phi_v

    def partition(self, metric_id: str) -> MetricPartition:
        for p in self.partitions:
            if p.metric_id == metric_id:
                return p
        raise KeyError(metric_id)

    def with_lambda(self, lam: float) -> "CommunityConfig":
        return CommunityConfig(self.partitions, lam)


def single_community_config(n: int, lam: float = 0.0) -> CommunityConfig:
    """One metric, one community holding every node, coefficient 1.

    Under this config a G-RR set is a plain RR set.
    """
    return CommunityConfig((MetricPartition("all", np.zeros(n, dtype=np.int64), 1.0, [1.0]),), lam)


def phi_V(config: CommunityConfig) -> float:
    return float(sum(p.weight * float(np.dot(p.coefficients, p.community_sizes))
                     for p in config.partitions))


def entry_weight(config: CommunityConfig, graph: DirectedGraph | None, q: str, j: int) -> float:
    """Weight ``c_{q,j}`` of the RR entry rooted in community ``j`` of metric ``q``.

    ``graph`` is accepted for interface symmetry; only its node count matters and
    that is already fixed by ``config``.
    """
    n = config.node_count
    if graph is not None and graph.node_count != n:
        raise CommunityError("config and graph disagree on node count")
    part = config.partition(q)
    size = part.community_sizes[j]
    lam = config.lam
    return float(((1.0 - lam) / (n * config.metric_count)
                  + lam * part.weight * part.coefficients[j] / config.phi_v) * size)


def f_min(config: CommunityConfig, graph: DirectedGraph | None, k: int) -> float:
    n = config.node_count
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    a_min = min(float(p.coefficients.min()) for p in config.partitions)
    lam = config.lam
    return (1.0 - lam) * k / n + lam * a_min * k / config.phi_v


def hash_partition(graph: DirectedGraph | int, r: int, salt: int = 0,
                   metric_id: str | None = None, weight: float = 1.0,
                   coefficients: Sequence[float] | None = None) -> MetricPartition:
    """Deterministic pseudo-random partition of the nodes into ``r`` non-empty communities.

    Empty communities are filled round-robin, each taking one node from the
    currently largest community.
    """
    n = graph if isinstance(graph, int) else graph.node_count
    if r < 1:
        raise CommunityError("r must be at least 1")
    if r > n:
        raise CommunityError(f"cannot split {n} nodes into {r} non-empty communities")
    rng = np.random.default_rng([int(salt) & 0xFFFFFFFF, r, n])
    assignment = rng.integers(0, r, size=n)
    sizes = np.bincount(assignment, minlength=r)
    for j in np.flatnonzero(sizes == 0).tolist():
        donor = int(np.argmax(sizes))
        node = int(np.flatnonzero(assignment == donor)[-1])
        assignment[node] = j
        sizes[donor] -= 1
        sizes[j] += 1
    coeffs = np.ones(r) if coefficients is None else np.asarray(coefficients, dtype=np.float64)
    if len(coeffs) != r:
        raise CommunityError(f"expected {r} coefficients, got {len(coeffs)}")
    return MetricPartition(metric_id or f"q{r}", assignment, weight, coeffs)


# Weight / coefficient presets of the experimental protocol, keyed by setting.
PRESET_COEFFICIENTS = {
    1: [[0.4, 1.0, 1.6], [0.4, 0.8, 1.2, 1.6], [0.2, 0.6, 1.0, 1.4, 1.8]],
    2: [[0.1, 0.1, 2.8], [0.1, 0.1, 0.8, 3.0], [0.1, 0.1, 0.1, 1.7, 3.0]],
}
PRESET_WEIGHTS = {
    1: {1: [1.0], 2: [0.4, 0.6], 3: [0.3, 0.3, 0.4]},
    2: {1: [1.0], 2: [0.1, 0.9], 3: [0.1, 0.1, 0.8]},
}
PRESET_RS = (3, 4, 5)


def synthetic_config(graph: DirectedGraph | int, rs: Sequence[int], setting: int | None = None,
                     lam: float = 0.7, salt: int = 0) -> CommunityConfig:
    """Hash partitions with ``r`` values ``rs``.

    With ``setting`` in {1, 2}, ``rs`` must be a prefix of (3, 4, 5) and the preset
    weights and coefficients are used. Without a setting, weights are uniform and
    all coefficients are 1.
    """
    rs = [int(r) for r in rs]
    if not rs:
        raise CommunityError("need at least one metric")
    if setting is None:
        weights = [1.0 / len(rs)] * len(rs)
        coeffs = [None] * len(rs)
    else:
        if setting not in PRESET_WEIGHTS:
            raise CommunityError(f"unknown parameter setting {setting!r}; expected 1 or 2")
        if tuple(rs) != PRESET_RS[:len(rs)]:
            raise CommunityError(f"presets are defined for r-lists {PRESET_RS[:1]}, "
                                 f"{PRESET_RS[:2]}, {PRESET_RS}; got {tuple(rs)}")
        weights = PRESET_WEIGHTS[setting][len(rs)]
        coeffs = PRESET_COEFFICIENTS[setting][:len(rs)]
    parts = [
        hash_partition(graph, r, salt=salt * 1000 + i, metric_id=f"q{i + 1}",
                       weight=w, coefficients=c)
        for i, (r, w, c) in enumerate(zip(rs, weights, coeffs))
    ]
    return CommunityConfig(tuple(parts), lam)


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8")
    return source


def parse_communities(text: str, graph: DirectedGraph) -> CommunityConfig:
    return load_communities(io.StringIO(text), graph)


def load_communities(source, graph: DirectedGraph) -> CommunityConfig:
    fh = _open_text(source)
    lam = None
    metrics: list[tuple[str, float, list[float]]] = []
    rows: dict[int, list[int]] = {}
    try:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, *rest = line.split()
            try:
                if key == "lambda":
                    if len(rest) != 1:
                        raise CommunityError(f"line {lineno}: 'lambda' takes one value")
                    lam = float(rest[0])
                elif key == "metric":
                    if rows:
                        raise CommunityError(f"line {lineno}: metrics must precede node lines")
                    if len(rest) < 3:
                        raise CommunityError(
                            f"line {lineno}: 'metric <id> <weight> <a_1> ...' needs a coefficient")
                    metrics.append((rest[0], float(rest[1]), [float(x) for x in rest[2:]]))
                elif key == "node":
                    if len(rest) != len(metrics) + 1:
                        raise CommunityError(
                            f"line {lineno}: expected node id and {len(metrics)} community indices")
                    label = int(rest[0])
                    try:
                        v = graph.dense_id(label)
                    except KeyError:
                        raise CommunityError(f"line {lineno}: unknown node id {label}") from None
                    if v in rows:
                        raise CommunityError(f"line {lineno}: node {label} assigned twice")
                    rows[v] = [int(x) for x in rest[1:]]
                else:
                    raise CommunityError(f"line {lineno}: unknown key {key!r}")
            except ValueError as exc:
                if isinstance(exc, CommunityError):
                    raise
                raise CommunityError(f"line {lineno}: cannot parse {line!r}") from None
    finally:
        if fh is not source:
            fh.close()

    if lam is None:
        raise CommunityError("missing 'lambda' line")
    if not metrics:
        raise CommunityError("no metrics declared")
    missing = [int(graph.labels[v]) for v in range(graph.node_count) if v not in rows]
    if missing:
        raise CommunityError(f"node {missing[0]} has no community assignment "
                             f"({len(missing)} nodes missing)")
    table = np.array([rows[v] for v in range(graph.node_count)], dtype=np.int64)
    parts = tuple(
        MetricPartition(mid, table[:, i], w, coeffs)
        for i, (mid, w, coeffs) in enumerate(metrics)
    )
    return CommunityConfig(parts, lam)


def format_communities(config: CommunityConfig, graph: DirectedGraph) -> str:
    lines = [f"lambda {config.lam!r}"]
    for p in config.partitions:
        coeffs = " ".join(repr(float(a)) for a in p.coefficients)
        lines.append(f"metric {p.metric_id} {p.weight!r} {coeffs}")
    for v in range(graph.node_count):
        idx = " ".join(str(int(p.assignment[v])) for p in config.partitions)
        lines.append(f"node {int(graph.labels[v])} {idx}")
    return "\n".join(lines) + "\n"


def write_communities(config: CommunityConfig, graph: DirectedGraph, dest) -> None:
    text = format_communities(config, graph)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        dest.write(text)

