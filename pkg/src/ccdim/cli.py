"""ccdim command line: run, oracle-check, gen-communities, wc-assign, evaluate."""
from __future__ import annotations

import argparse
import sys

from .baselines import im_only, max_degree
from .community import CommunityError, write_communities
from .experiment import (ExperimentSpec, SpecError, load_config, load_graph, parse_int_list,
                         run_experiment, write_results)
from .ghist import APPROX, g_hist, g_hist_no_sentinel, substream
from .graph import EdgeListError, write_edge_list
from .oracle import (EnumerationTooLarge, RealizationTable, brute_force_opt, exact_f,
                     monte_carlo_f)


def _add_graph_args(p: argparse.ArgumentParser):
    p.add_argument("--graph", help="edge list: one 'u v [p]' per line")
    p.add_argument("--undirected", action="store_true", default=None,
                   help="treat every edge as two directed edges")
    p.add_argument("--probabilities", choices=["wc", "file"], default=None,
                   help="'wc' assigns 1/indeg(v) (default); 'file' keeps the third column")


def _add_community_args(p: argparse.ArgumentParser):
    p.add_argument("--communities", help="community file")
    p.add_argument("--synthetic", help="comma separated community counts, e.g. 3,4,5")
    p.add_argument("--setting", type=int, choices=[1, 2], default=None,
                   help="weight/coefficient preset for synthetic partitions")
    p.add_argument("--salt", type=int, default=None, help="salt for synthetic partitions")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="influence/diversity trade-off (default 0.7)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccdim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment grid and write results.csv/report.json")
    run.add_argument("--config", help="YAML or JSON experiment spec; flags override it")
    _add_graph_args(run)
    _add_community_args(run)
    run.add_argument("--k", help="comma separated budgets")
    run.add_argument("--algo", help="comma separated algorithms")
    run.add_argument("--eps", type=float, default=None)
    run.add_argument("--delta", type=float, default=None)
    run.add_argument("--reps", type=int, default=None)
    run.add_argument("--sims", type=int, default=None, help="Monte Carlo cascades per evaluation")
    run.add_argument("--seed", type=int, default=None, help="master seed")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--timings", action="store_true", default=None,
                     help="include the runtime_ms column in the CSV (breaks byte-identity)")
    run.add_argument("--quiet", action="store_true")

    orc = sub.add_parser("oracle-check", help="compare solvers with exact enumeration")
    _add_graph_args(orc)
    _add_community_args(orc)
    orc.add_argument("--k", type=int, required=True)
    orc.add_argument("--eps", type=float, default=0.1)
    orc.add_argument("--delta", type=float, default=0.1)
    orc.add_argument("--sims", type=int, default=10000)
    orc.add_argument("--seed", type=int, default=0)

    gen = sub.add_parser("gen-communities", help="write a synthetic community file")
    _add_graph_args(gen)
    _add_community_args(gen)
    gen.add_argument("--out", required=True)

    wc = sub.add_parser("wc-assign", help="write the edge list with 1/indeg(v) probabilities")
    _add_graph_args(wc)
    wc.add_argument("--out", required=True)

    ev = sub.add_parser("evaluate", help="Monte Carlo estimate of f for a given seed set")
    _add_graph_args(ev)
    _add_community_args(ev)
    ev.add_argument("--seeds", required=True, help="comma separated node labels")
    ev.add_argument("--sims", type=int, default=10000)
    ev.add_argument("--seed", type=int, default=0)
    return parser


def _spec_from_args(args) -> ExperimentSpec:
    opt = lambda name: getattr(args, name, None)
    spec = ExperimentSpec.from_file(args.config) if opt("config") else ExperimentSpec()
    overrides = {name: opt(name) for name in (
        "graph", "undirected", "probabilities", "communities", "setting", "salt", "lam",
        "eps", "delta", "reps", "sims", "seed", "out", "timings")}
    if opt("synthetic"):
        overrides["synthetic"] = parse_int_list(args.synthetic)
    if isinstance(opt("k"), str):
        overrides["k"] = parse_int_list(args.k)
    if opt("algo") is not None:
        overrides["algorithms"] = [a.strip() for a in args.algo.split(",") if a.strip()]
    for key, value in overrides.items():
        if value is not None:
            setattr(spec, key, value)
    if opt("communities") and not opt("synthetic"):
        spec.synthetic = None
    if not spec.graph:
        raise SpecError("no graph given: pass --graph or set 'graph' in the config file")
    return spec


def cmd_run(args) -> int:
    spec = _spec_from_args(args)
    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    result = run_experiment(spec, log=log)
    csv_path, json_path = write_results(result, spec.out, spec.timings)
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _graph_and_config(args):
    spec = _spec_from_args(args)
    graph = load_graph(spec.graph, spec.undirected, spec.probabilities)
    return graph, load_config(spec, graph)


def cmd_oracle_check(args) -> int:
    graph, config = _graph_and_config(args)
    k = args.k
    if not 0 <= k <= graph.node_count:
        raise SpecError(f"k={k} outside 0..{graph.node_count}")
    table = RealizationTable(graph)
    opt_set, opt = brute_force_opt(graph, config, k, table=table) if k else (frozenset(), None)
    opt_f = opt.f if opt else 0.0
    rng = substream(args.seed, "oracle-check")
    methods = {
        "g-hist": lambda: g_hist(graph, config, k, args.eps, args.delta, rng).seeds,
        "g-hist-no-sentinel": lambda: g_hist_no_sentinel(graph, config, k, args.eps, args.delta,
                                                         rng).seeds,
        "imm": lambda: im_only(graph, k, args.eps, args.delta, rng).seeds,
        "max-degree": lambda: max_degree(graph, k),
    }
    labels = graph.labels
    print(f"n={graph.node_count} m={graph.m} k={k} lambda={config.lam} "
          f"opt={opt_f:.6f} opt_set={sorted(_label(labels, v) for v in opt_set)}")
    floor = APPROX - args.eps
    for name, solve in methods.items():
        seeds = solve() if k else []
        exact = exact_f(graph, config, seeds, table=table).f
        est = monte_carlo_f(graph, config, seeds, args.sims, substream(args.seed, name))
        ratio = exact / opt_f if opt_f > 0 else 1.0
        flag = "ok" if ratio >= floor - 1e-12 else "below"
        print(f"{name:20s} exact={exact:.6f} estimate={est.f:.6f}+-{est.stderr:.6f} "
              f"ratio={ratio:.4f} [{flag} vs {floor:.4f}] "
              f"seeds={[_label(labels, v) for v in seeds]}")
    return 0


def _label(labels, v):
    return int(labels[v]) if labels is not None else int(v)


def cmd_gen(args) -> int:
    if not args.synthetic:
        raise SpecError("gen-communities needs --synthetic r1,r2,...")
    graph, config = _graph_and_config(args)
    write_communities(config, graph, args.out)
    print(f"wrote {args.out} ({config.metric_count} metrics, lambda={config.lam})")
    return 0


def cmd_wc(args) -> int:
    spec = _spec_from_args(args)
    graph = load_graph(spec.graph, spec.undirected, "wc")
    write_edge_list(graph, args.out)
    print(f"wrote {args.out} ({graph.m} edges)")
    return 0


def cmd_evaluate(args) -> int:
    graph, config = _graph_and_config(args)
    seeds = [graph.dense_id(int(s)) for s in parse_int_list(args.seeds)]
    val = monte_carlo_f(graph, config, seeds, args.sims, substream(args.seed, "evaluate"))
    print(f"f={val.f:.6f} stderr={val.stderr:.6f} sigma={val.sigma:.4f} phi={val.phi:.4f}")
    return 0


COMMANDS = {"run": cmd_run, "oracle-check": cmd_oracle_check, "gen-communities": cmd_gen,
            "wc-assign": cmd_wc, "evaluate": cmd_evaluate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SpecError, EdgeListError, CommunityError, EnumerationTooLarge, ValueError,
            OSError) as exc:
        print(f"ccdim {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
