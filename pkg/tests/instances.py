"""Fixed tiny instances shared by the unit and acceptance suites (n <= 8, m <= 12)."""
from __future__ import annotations

import itertools

import numpy as np

from ccdim.community import CommunityConfig, MetricPartition
from ccdim.graph import DirectedGraph, assign_wc


def _cfg(n, parts, lam=0.7):
    return CommunityConfig([MetricPartition(mid, np.asarray(assign), w, list(a))
                            for mid, assign, w, a in parts], lam)


def path4():
    g = DirectedGraph.from_edges(4, [(0, 1, 0.5), (1, 2, 0.6), (2, 3, 0.7)])
    return "path4", g, _cfg(4, [("q1", [0, 0, 1, 1], 1.0, [1.0, 2.0])])


def star5():
    g = DirectedGraph.from_edges(5, [(0, 1, 0.4), (0, 2, 0.4), (0, 3, 0.4), (0, 4, 0.4),
                                     (2, 3, 0.5)])
    return "star5", g, _cfg(5, [("q1", [0, 1, 1, 0, 1], 0.4, [0.4, 1.6]),
                                ("q2", [0, 1, 2, 2, 1], 0.6, [1.0, 0.5, 1.5])])


def wc_cycle6():
    edges = [(i, (i + 1) % 6) for i in range(6)] + [(0, 3), (1, 4), (5, 2)]
    g = assign_wc(DirectedGraph.from_edges(6, edges))
    return "wc_cycle6", g, _cfg(6, [("q1", [0, 0, 1, 1, 2, 2], 0.3, [0.4, 1.0, 1.6]),
                                    ("q2", [0, 1, 0, 1, 0, 1], 0.3, [1.0, 1.0]),
                                    ("q3", [0, 1, 2, 3, 0, 1], 0.4, [0.2, 0.6, 1.0, 1.4])],
                                lam=0.5)


def dag7():
    edges = [(0, 1, 0.3), (0, 2, 0.8), (1, 3, 0.5), (2, 3, 0.2), (2, 4, 0.6), (3, 5, 0.9),
             (4, 5, 0.4), (4, 6, 0.7), (5, 6, 0.1), (1, 4, 0.35)]
    g = DirectedGraph.from_edges(7, edges)
    return "dag7", g, _cfg(7, [("deg", [0, 1, 1, 0, 1, 0, 1], 0.1, [0.1, 2.8]),
                               ("loc", [0, 0, 1, 1, 2, 2, 2], 0.9, [0.1, 0.8, 3.0])])


def split8():
    # two weakly linked components
    edges = [(0, 1, 0.6), (1, 2, 0.6), (2, 0, 0.6), (2, 3, 0.2), (4, 5, 0.5), (5, 6, 0.5),
             (6, 7, 0.5), (7, 4, 0.5), (3, 4, 0.1)]
    g = DirectedGraph.from_edges(8, edges)
    return "split8", g, _cfg(8, [("a", [0, 0, 0, 0, 1, 1, 1, 1], 0.3, [1.0, 1.0]),
                                 ("b", [0, 1, 2, 0, 1, 2, 0, 1], 0.3, [0.4, 1.0, 1.6]),
                                 ("c", [0, 0, 1, 1, 2, 2, 3, 3], 0.4, [3.0, 0.1, 0.1, 1.7])],
                             lam=0.9)


def bidir5():
    pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]
    edges = [e for u, v in pairs for e in ((u, v), (v, u))]
    g = assign_wc(DirectedGraph.from_edges(5, edges))
    return "bidir5", g, _cfg(5, [("q1", [0, 1, 2, 0, 1], 1.0, [0.2, 1.0, 1.8])], lam=0.3)


ALL = [path4, star5, wc_cycle6, dag7, split8, bidir5]
SMALL = [path4, star5, bidir5]  # n <= 5, used by exhaustive set-pair checks


def all_instances():
    return [make() for make in ALL]


def subsets(n, max_size=None):
    top = n if max_size is None else max_size
    for r in range(top + 1):
        yield from itertools.combinations(range(n), r)


def random_collection(rng, n, n_keys, theta, covered_rate=0.0, max_len=None):
    """Random G-RR collection over ``n`` nodes with Dirichlet key weights."""
    from ccdim.sampling import COVERED, GRRCollection

    keys = [("k", e) for e in range(n_keys)]
    weights = rng.dirichlet(np.ones(n_keys))
    coll = GRRCollection(n, keys, weights, sentinel=[0] if covered_rate else ())
    pool = np.arange(1, n) if covered_rate else np.arange(n)  # sentinel node stays out
    top = min(max_len or n, len(pool))
    sets = []
    for _ in range(theta):
        s = {}
        for key in keys:
            if covered_rate and rng.random() < covered_rate:
                s[key] = COVERED
            else:
                size = int(rng.integers(1, top + 1))
                s[key] = frozenset(rng.choice(pool, size=size, replace=False).tolist())
        sets.append(s)
    coll.append_sets(sets)
    return coll
