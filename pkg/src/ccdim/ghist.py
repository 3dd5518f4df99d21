"""Two-stage G-HIST: sentinel set selection, then remaining set selection.

Both stages grow their G-RR collections geometrically and stop as soon as the
lower/upper confidence bounds certify the stage's approximation target.
"""
from __future__ import annotations

import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .bounds import (doubling_rounds, greedy_fraction, lower_bound_f, theta_initial,
                     theta_max_stage1, theta_max_stage2, upper_bound_f)
from .community import CommunityConfig, f_min
from .coverage import greedy_with_bound, omega
from .graph import DirectedGraph
from .sampling import avg_entry_nodes, extend_collection, sample_collection

APPROX = 1.0 - 1.0 / math.e


def substream(seed, name: str) -> np.random.Generator:
    """Named, reproducible RNG stream derived from ``seed``.

    ``seed`` may be an int or a Generator; a Generator contributes one 64-bit draw.
    """
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(0, 2**63 - 1))
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(zlib.crc32(name.encode()),))
    return np.random.default_rng(ss)


@dataclass
class IterationRecord:
    iteration: int
    theta_r1: int
    theta_r2: int
    lower: float
    upper: float
    ratio: float
    target: float
    b: int | None = None


@dataclass
class StageReport:
    stage: int
    theta_init: int
    theta_max: int
    i_max: int
    iterations: int = 0
    records: list[IterationRecord] = field(default_factory=list)
    b: int | None = None
    certified: bool = False
    timings: dict[str, float] = field(default_factory=dict)
    avg_entry_nodes: dict[str, float] = field(default_factory=dict)
    sets_sampled: int = 0

    @property
    def theta_history_r1(self) -> list[int]:
        return [r.theta_r1 for r in self.records]

    @property
    def theta_history_r2(self) -> list[int]:
        return [r.theta_r2 for r in self.records]

    @property
    def final_theta_r1(self) -> int:
        return self.records[-1].theta_r1 if self.records else 0

    @property
    def final_theta_r2(self) -> int:
        return self.records[-1].theta_r2 if self.records else 0

    def add_time(self, phase: str, seconds: float):
        self.timings[phase] = self.timings.get(phase, 0.0) + seconds


@dataclass
class RunResult:
    seeds: list[int]
    sentinel: list[int]
    remaining: list[int]
    stage1: StageReport | None
    stage2: StageReport
    ratio: float
    certified: bool
    params: dict

    @property
    def seed_set(self) -> frozenset:
        return frozenset(self.seeds)

    def to_dict(self) -> dict:
        return asdict(self)


class _Clock:
    def __init__(self, report: StageReport, phase: str):
        self.report, self.phase = report, phase

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.add_time(self.phase, time.perf_counter() - self.t0)


def _ratio(lower: float, upper: float) -> float:
    return lower / upper if upper > 0 else 0.0


def sentinel_set(graph: DirectedGraph, config: CommunityConfig, k: int, eps1: float,
                 delta1: float, rng) -> tuple[list[int], StageReport]:
    n = graph.node_count
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    rng_r1, rng_r2 = substream(rng, "stage1/R1"), substream(rng, "stage1/R2")
    theta0 = theta_initial(delta1)
    tmax = theta_max_stage1(n, k, eps1, delta1, f_min(config, graph, k))
    i_max = doubling_rounds(tmax, theta0)
    report = StageReport(1, theta0, tmax, i_max)
    delta_u = delta1 / (3 * i_max)
    delta_l = delta1 / (6 * i_max)

    with _Clock(report, "sample"):
        r1 = sample_collection(graph, config, theta0, rng_r1)
    report.sets_sampled += theta0
    chosen: list[int] = []
    r2 = None
    for i in range(1, i_max + 1):
        report.iterations = i
        theta = r1.theta
        with _Clock(report, "greedy"):
            trace = greedy_with_bound(r1, k, (), k)
        upper = upper_bound_f(trace.upper_bound_coverage, theta, delta_u)
        b = 0
        for a in range(1, k + 1):
            rough = lower_bound_f(trace.prefix_coverage[a], theta, delta_l)
            if _ratio(rough, upper) >= greedy_fraction(k, a) - eps1:
                b = a
        chosen = trace.selected[:b]
        target = greedy_fraction(k, b) - eps1

        with _Clock(report, "sample"):
            r2 = sample_collection(graph, config, theta, rng_r2, sentinel=chosen)
        report.sets_sampled += theta
        lower = lower_bound_f(omega(chosen, r2), r2.theta, delta_l)
        report.records.append(IterationRecord(i, theta, r2.theta, lower, upper,
                                              _ratio(lower, upper), target, b))
        if _ratio(lower, upper) >= target:
            report.certified = True
            break

        with _Clock(report, "sample"):
            extend_collection(r2, 4 * theta - r2.theta, graph, config, rng_r2)
        report.sets_sampled += 3 * theta
        lower = lower_bound_f(omega(chosen, r2), r2.theta, delta_l)
        report.records.append(IterationRecord(i, theta, r2.theta, lower, upper,
                                              _ratio(lower, upper), target, b))
        if _ratio(lower, upper) >= target:
            report.certified = True
            break
        if i < i_max:
            # doubling after the last round could not change the returned set
            with _Clock(report, "sample"):
                extend_collection(r1, theta, graph, config, rng_r1)
            report.sets_sampled += theta

    report.b = len(chosen)
    report.avg_entry_nodes = {"r1": avg_entry_nodes(r1), "r2": avg_entry_nodes(r2)}
    return chosen, report


def remaining_set(graph: DirectedGraph, config: CommunityConfig, k: int,
                  sentinel: Iterable[int], eps: float, eps2: float, delta2: float,
                  rng) -> tuple[list[int], StageReport]:
    n = graph.node_count
    sentinel = [int(s) for s in sentinel]
    b = len(set(sentinel))
    if not 1 <= k <= n or b > k:
        raise ValueError("need 1 <= k <= n and |sentinel| <= k")
    rng_r1, rng_r2 = substream(rng, "stage2/R1"), substream(rng, "stage2/R2")
    theta0 = theta_initial(delta2)
    tmax = theta_max_stage2(n, k, b, eps2, delta2, f_min(config, graph, k))
    i_max = doubling_rounds(tmax, theta0)
    report = StageReport(2, theta0, tmax, i_max, b=b)
    delta_u = delta_l = delta2 / (3 * i_max)
    target = APPROX - eps

    with _Clock(report, "sample"):
        r1 = sample_collection(graph, config, theta0, rng_r1, sentinel=sentinel)
        r2 = sample_collection(graph, config, theta0, rng_r2, sentinel=sentinel)
    report.sets_sampled += 2 * theta0
    picked: list[int] = []
    for i in range(1, i_max + 1):
        report.iterations = i
        theta = r1.theta
        with _Clock(report, "greedy"):
            trace = greedy_with_bound(r1, k - b, sentinel, k)
        picked = trace.selected
        upper = upper_bound_f(trace.upper_bound_coverage, theta, delta_u)
        lower = lower_bound_f(omega(sentinel + picked, r2), r2.theta, delta_l)
        report.records.append(IterationRecord(i, theta, r2.theta, lower, upper,
                                              _ratio(lower, upper), target))
        if _ratio(lower, upper) >= target:
            report.certified = True
            break
        if b == k or i == i_max:
            break
        report.sets_sampled += theta + r2.theta
        with _Clock(report, "sample"):
            extend_collection(r1, theta, graph, config, rng_r1)
            extend_collection(r2, r2.theta, graph, config, rng_r2)

    report.avg_entry_nodes = {"r1": avg_entry_nodes(r1), "r2": avg_entry_nodes(r2)}
    return picked, report


def _check_params(graph: DirectedGraph, k: int, eps: float, delta: float):
    n = graph.node_count
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    if not 0 < eps < APPROX:
        raise ValueError(f"epsilon={eps} outside (0, 1 - 1/e)")
    if not 0 < delta < 1:
        raise ValueError(f"delta={delta} outside (0, 1)")


def g_hist(graph: DirectedGraph, config: CommunityConfig, k: int, eps: float, delta: float,
           rng) -> RunResult:
    _check_params(graph, k, eps, delta)
    eps1 = eps2 = eps / 2.0
    delta1 = delta2 = delta / 2.0
    chosen, rep1 = sentinel_set(graph, config, k, eps1, delta1, rng)
    rest, rep2 = remaining_set(graph, config, k, chosen, eps, eps2, delta2, rng)
    last = rep2.records[-1]
    return RunResult(chosen + rest, chosen, rest, rep1, rep2, last.ratio, rep2.certified,
                     {"k": k, "epsilon": eps, "delta": delta, "lambda": config.lam})


def g_hist_no_sentinel(graph: DirectedGraph, config: CommunityConfig, k: int, eps: float,
                       delta: float, rng) -> RunResult:
    """Single-stage variant: remaining-set selection from an empty sentinel."""
    _check_params(graph, k, eps, delta)
    rest, rep2 = remaining_set(graph, config, k, [], eps, eps, delta, rng)
    last = rep2.records[-1]
    return RunResult(rest, [], rest, None, rep2, last.ratio, rep2.certified,
                     {"k": k, "epsilon": eps, "delta": delta, "lambda": config.lam})
