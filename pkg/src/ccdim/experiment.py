"""Experiment orchestration: run algorithms over budgets and write CSV / JSON results."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

import numpy as np
import yaml

from .baselines import greedy_sim, im_only, max_degree, random_seeds
from .community import (CommunityConfig, load_communities, single_community_config,
                        synthetic_config)
from .ghist import RunResult, g_hist, g_hist_no_sentinel, substream
from .graph import DirectedGraph, assign_wc, load_edge_list
from .oracle import monte_carlo_f

CSV_COLUMNS = ["algorithm", "k", "rep", "f_estimate", "sigma", "phi", "runtime_ms",
               "theta_stage1", "theta_stage2", "b", "avg_entry_nodes"]


class SpecError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    graph: str = ""
    undirected: bool = False
    probabilities: str = "wc"  # "wc" or "file"
    communities: str | None = None
    synthetic: list[int] | None = None
    setting: int | None = None
    salt: int = 0
    lam: float | None = None  # overrides the community file when set
    k: list[int] = field(default_factory=lambda: [10])
    algorithms: list[str] = field(default_factory=lambda: ["g-hist"])
    eps: float = 0.1
    delta: float = 0.1
    sims: int = 1000
    reps: int = 3
    seed: int = 0
    out: str = "results"
    timings: bool = False

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        aliases = {"lambda": "lam", "algo": "algorithms", "algorithm": "algorithms",
                   "epsilon": "eps"}
        clean = {}
        for key, value in data.items():
            key = aliases.get(key, key)
            if key not in known:
                raise SpecError(f"unknown spec key {key!r}")
            clean[key] = value
        spec = cls(**clean)
        if isinstance(spec.k, int):
            spec.k = [spec.k]
        if isinstance(spec.algorithms, str):
            spec.algorithms = [spec.algorithms]
        if isinstance(spec.synthetic, (int, str)):
            spec.synthetic = parse_int_list(str(spec.synthetic))
        return spec

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise SpecError(f"{path}: expected a mapping at top level")
        return cls.from_mapping(data)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise SpecError(f"expected a comma separated list of integers, got {text!r}") from None


def load_graph(path: str, undirected: bool, probabilities: str = "wc") -> DirectedGraph:
    graph = load_edge_list(path, directed=not undirected)
    if probabilities == "wc":
        return assign_wc(graph)
    if probabilities == "file":
        graph.require_probabilities()
        return graph
    raise SpecError(f"unknown probability mode {probabilities!r}; expected 'wc' or 'file'")


def load_config(spec: ExperimentSpec, graph: DirectedGraph) -> CommunityConfig:
    if spec.communities and spec.synthetic:
        raise SpecError("give either a community file or a synthetic r-list, not both")
    if spec.communities:
        config = load_communities(spec.communities, graph)
        return config if spec.lam is None else config.with_lambda(spec.lam)
    lam = 0.7 if spec.lam is None else spec.lam
    if spec.synthetic:
        return synthetic_config(graph, spec.synthetic, setting=spec.setting, lam=lam,
                                salt=spec.salt)
    raise SpecError("no community source: pass --communities or --synthetic")


@dataclass
class AlgoOutcome:
    seeds: list[int]
    run: RunResult | None = None


def _run_algorithm(name: str, graph: DirectedGraph, config: CommunityConfig, k: int,
                   spec: ExperimentSpec, rng) -> AlgoOutcome:
    if name == "g-hist":
        run = g_hist(graph, config, k, spec.eps, spec.delta, rng)
        return AlgoOutcome(run.seeds, run)
    if name == "g-hist-no-sentinel":
        run = g_hist_no_sentinel(graph, config, k, spec.eps, spec.delta, rng)
        return AlgoOutcome(run.seeds, run)
    if name == "imm":
        run = im_only(graph, k, spec.eps, spec.delta, rng)
        return AlgoOutcome(run.seeds, run)
    if name == "greedy":
        return AlgoOutcome(greedy_sim(graph, config, k, spec.sims, rng))
    if name == "greedy-im":
        base = single_community_config(graph.node_count)
        return AlgoOutcome(greedy_sim(graph, base, k, spec.sims, rng))
    if name == "max-degree":
        return AlgoOutcome(max_degree(graph, k))
    if name == "random":
        return AlgoOutcome(random_seeds(graph, k, rng))
    raise SpecError(f"unknown algorithm {name!r}")


ALGORITHMS = ("g-hist", "g-hist-no-sentinel", "imm", "greedy", "greedy-im", "max-degree",
              "random")


def validate(spec: ExperimentSpec, graph: DirectedGraph):
    if not spec.algorithms:
        raise SpecError("algorithm list is empty")
    unknown = [a for a in spec.algorithms if a not in ALGORITHMS]
    if unknown:
        raise SpecError(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
    if not spec.k:
        raise SpecError("k list is empty")
    bad = [k for k in spec.k if not 1 <= k <= graph.node_count]
    if bad:
        raise SpecError(f"k values {bad} outside 1..{graph.node_count}")
    if spec.reps < 1 or spec.sims < 1:
        raise SpecError("reps and sims must be positive")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(round(x, 12))
    return str(x)


def run_experiment(spec: ExperimentSpec, graph: DirectedGraph | None = None,
                   config: CommunityConfig | None = None,
                   log: Callable[[str], None] | None = None) -> dict:
    """Run every (algorithm, k, repetition) cell; return rows and a JSON-ready report."""
    graph = graph or load_graph(spec.graph, spec.undirected, spec.probabilities)
    config = config or load_config(spec, graph)
    validate(spec, graph)
    rows, runs = [], []
    for algo in spec.algorithms:
        for k in spec.k:
            cell = []
            for rep in range(spec.reps):
                rng = substream(spec.seed, f"{algo}/{k}/{rep}")
                t0 = time.perf_counter()
                out = _run_algorithm(algo, graph, config, k, spec, rng)
                runtime_ms = 1000.0 * (time.perf_counter() - t0)
                val = monte_carlo_f(graph, config, out.seeds, spec.sims,
                                    substream(spec.seed, f"eval/{algo}/{k}/{rep}"))
                run = out.run
                row = {
                    "algorithm": algo, "k": k, "rep": rep, "f_estimate": val.f,
                    "sigma": val.sigma, "phi": val.phi, "runtime_ms": runtime_ms,
                    "theta_stage1": run.stage1.final_theta_r1 if run and run.stage1 else None,
                    "theta_stage2": run.stage2.final_theta_r1 if run else None,
                    "b": len(run.sentinel) if run else None,
                    "avg_entry_nodes": run.stage2.avg_entry_nodes["r1"] if run else None,
                }
                cell.append(row)
                runs.append({"algorithm": algo, "k": k, "rep": rep, "seeds": out.seeds,
                             "objective": asdict(val),
                             "run": run.to_dict() if run else None,
                             "runtime_ms": runtime_ms})
                if log:
                    log(f"{algo} k={k} rep={rep} f={val.f:.4f} ({runtime_ms:.0f} ms)")
            rows.extend(cell)
            rows.append(_aggregate(cell))
    return {"rows": rows, "runs": runs, "spec": asdict(spec),
            "graph": {"n": graph.node_count, "m": graph.m},
            "metrics": [p.metric_id for p in config.partitions], "lambda": config.lam}


def _aggregate(cell: list[dict]) -> dict:
    agg = {"algorithm": cell[0]["algorithm"], "k": cell[0]["k"], "rep": "mean"}
    for col in CSV_COLUMNS[3:]:
        vals = [r[col] for r in cell if r[col] is not None]
        agg[col] = float(np.mean(vals)) if vals else None
    return agg


def format_csv(rows: list[dict], timings: bool = False) -> str:
    cols = CSV_COLUMNS if timings else [c for c in CSV_COLUMNS if c != "runtime_ms"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def write_results(result: dict, out_dir: str, timings: bool = False) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "results.csv")
    json_path = os.path.join(out_dir, "report.json")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(result["rows"], timings))
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, default=_json_default)
    return csv_path, json_path


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and math.isinf(obj):
        return None
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
