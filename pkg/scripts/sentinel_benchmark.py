"""Compare G-HIST with and without the sentinel stage on a synthetic power-law graph.

    python3 scripts/sentinel_benchmark.py --nodes 5000 --edges 50000 --k 10,25,50
"""
import argparse
import time

import numpy as np

from ccdim.community import synthetic_config
from ccdim.ghist import g_hist, g_hist_no_sentinel
from ccdim.graph import assign_wc, random_powerlaw_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=5000)
    ap.add_argument("--edges", type=int, default=50000)
    ap.add_argument("--k", default="10,25,50")
    ap.add_argument("--setting", type=int, choices=[1, 2], default=1)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = assign_wc(random_powerlaw_graph(args.nodes, args.edges, seed=args.seed))
    cfg = synthetic_config(g, [3, 4, 5], setting=args.setting, lam=0.7, salt=args.seed)
    g_hist(g, cfg, 2, args.eps, args.delta, 0)  # compile kernels outside the timings

    print("k,b,entry_nodes_sentinel,entry_nodes_plain,ratio,seconds_sentinel,seconds_plain")
    for k in (int(x) for x in args.k.split(",")):
        rows = []
        for rep in range(args.reps):
            t0 = time.perf_counter()
            run = g_hist(g, cfg, k, args.eps, args.delta, args.seed * 1000 + rep)
            t1 = time.perf_counter()
            plain = g_hist_no_sentinel(g, cfg, k, args.eps, args.delta, args.seed * 1000 + rep)
            t2 = time.perf_counter()
            rows.append((len(run.sentinel), run.stage2.avg_entry_nodes["r1"],
                         plain.stage2.avg_entry_nodes["r1"], t1 - t0, t2 - t1))
        b, es, ep, ts, tp = np.mean(rows, axis=0)
        print(f"{k},{b:.1f},{es:.2f},{ep:.2f},{es / ep:.3f},{ts:.3f},{tp:.3f}")


if __name__ == "__main__":
    main()
