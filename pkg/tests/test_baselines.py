import numpy as np
import pytest

from ccdim.baselines import greedy_sim, im_only, max_degree, random_seeds
from ccdim.ghist import g_hist
from ccdim.graph import DirectedGraph, assign_wc, random_powerlaw_graph
from ccdim.community import single_community_config
from ccdim.oracle import RealizationTable

from instances import all_instances


def test_max_degree_star_centre_first():
    g = DirectedGraph.from_edges(5, [(3, v, 0.5) for v in (0, 1, 2, 4)] + [(0, 1, 0.5)])
    assert max_degree(g, 2) == [3, 0]


def test_max_degree_ties_by_id():
    g = DirectedGraph.from_edges(4, [(2, 0, 1.0), (1, 0, 1.0), (3, 0, 1.0)])
    assert max_degree(g, 3) == [1, 2, 3]


def test_random_is_reproducible():
    g = random_powerlaw_graph(50, 100, seed=0)
    a = random_seeds(g, 5, np.random.default_rng(3))
    b = random_seeds(g, 5, np.random.default_rng(3))
    assert a == b and len(set(a)) == 5


def test_greedy_sim_budget_guard():
    g = assign_wc(random_powerlaw_graph(600, 1200, seed=0))
    with pytest.raises(ValueError, match="budget"):
        greedy_sim(g, single_community_config(600), 2, 10, np.random.default_rng(0))


@pytest.mark.parametrize("inst", all_instances(), ids=lambda t: t[0])
def test_greedy_sim_close_to_g_hist(inst):
    _, g, cfg = inst
    table = RealizationTable(g)
    for k in (1, 2):
        a = table.objective(cfg, greedy_sim(g, cfg, k, 2000, np.random.default_rng(k))).f
        b = table.objective(cfg, g_hist(g, cfg, k, 0.1, 0.1, k).seeds).f
        assert abs(a - b) <= 0.05 * max(a, b)


def test_im_only_ignores_diversity():
    _, g, cfg = all_instances()[3]
    run = im_only(g, 2, 0.1, 0.1, 0, config=cfg)
    assert run.params["lambda"] == 0.0 and run.sentinel == []
    assert len(im_only(g, 2, 0.1, 0.1, 0).seeds) == 2
