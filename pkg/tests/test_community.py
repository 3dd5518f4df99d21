import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccdim.community import (CommunityConfig, CommunityError, MetricPartition, entry_weight,
                             f_min, format_communities, hash_partition, parse_communities,
                             phi_V, single_community_config, synthetic_config,
                             write_communities, load_communities)
from ccdim.graph import parse_edge_list, random_powerlaw_graph
from ccdim.oracle import RealizationTable

from instances import all_instances, subsets


def part(mid, assign, w, a):
    return MetricPartition(mid, np.array(assign), w, a)


def test_single_community_is_valid():
    cfg = single_community_config(6, lam=0.5)
    assert cfg.partitions[0].community_count == 1
    assert cfg.key_sizes.tolist() == [6]


def test_two_metric_weights():
    cfg = CommunityConfig([part("a", [0, 1, 0], 0.4, [1, 2]), part("b", [0, 0, 0], 0.6, [1])],
                          0.7)
    assert [p.weight for p in cfg.partitions] == [0.4, 0.6]


def test_weights_must_sum_to_one():
    with pytest.raises(CommunityError, match="sum"):
        CommunityConfig([part("a", [0, 1], 0.5, [1, 1]), part("b", [0, 0], 0.6, [1])], 0.7)


@pytest.mark.parametrize("kwargs,fragment", [
    (dict(assign=[0, 0], a=[1, 1]), "empty"),
    (dict(assign=[0, 2], a=[1, 1]), "outside"),
    (dict(assign=[0, 1], a=[1, 0]), "positive"),
])
def test_partition_validation(kwargs, fragment):
    with pytest.raises(CommunityError, match=fragment):
        part("q", kwargs["assign"], 1.0, kwargs["a"])


def test_lambda_range():
    with pytest.raises(CommunityError, match="lambda"):
        single_community_config(3, lam=1.5)


def test_duplicate_metric_ids():
    with pytest.raises(CommunityError, match="unique"):
        CommunityConfig([part("a", [0], 0.5, [1]), part("a", [0], 0.5, [1])], 0.1)


def test_hash_partition_r1():
    p = hash_partition(10, 1)
    assert p.assignment.tolist() == [0] * 10


def test_hash_partition_r3_non_empty():
    p = hash_partition(400, 3)
    assert p.community_count == 3 and np.all(p.community_sizes > 0)


def test_hash_partition_deterministic():
    a = hash_partition(50, 4, salt=9).assignment
    b = hash_partition(50, 4, salt=9).assignment
    c = hash_partition(50, 4, salt=10).assignment
    assert a.tolist() == b.tolist()
    assert a.tolist() != c.tolist()


def test_hash_partition_repairs_empty_communities():
    # with r == n, some draw is always missing a community before repair
    p = hash_partition(6, 6, salt=1)
    assert sorted(p.assignment.tolist()) == list(range(6))


def test_hash_partition_too_many_communities():
    with pytest.raises(CommunityError):
        hash_partition(3, 4)


def test_phi_direct_sum():
    cfg = CommunityConfig([part("q", [0, 0, 1, 1, 1], 1.0, [1, 2])], 0.5)
    assert phi_V(cfg) == 8.0


def test_phi_all_ones_is_n():
    n = 12
    cfg = CommunityConfig([hash_partition(n, 3, coefficients=[1, 1, 1]),
                           ], 0.5)
    assert phi_V(cfg) == n


def test_phi_two_metrics_all_twos():
    n = 10
    cfg = CommunityConfig([hash_partition(n, 2, metric_id="a", weight=0.5, coefficients=[2, 2]),
                           hash_partition(n, 3, metric_id="b", weight=0.5,
                                          coefficients=[2, 2, 2])], 0.5)
    assert phi_V(cfg) == 2 * n


def test_entry_weight_influence_only():
    cfg = CommunityConfig([part("q", [0] * 5 + [1] * 5, 1.0, [1, 3])], 0.0)
    assert entry_weight(cfg, None, "q", 0) == 0.5


def test_entry_weight_diversity_only():
    cfg = single_community_config(7, lam=1.0)
    assert entry_weight(cfg, None, "all", 0) == 1.0


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 30), st.lists(st.integers(1, 4), min_size=1, max_size=3),
       st.floats(0, 1), st.integers(0, 1000))
def test_entry_weights_sum_to_one(n, rs, lam, salt):
    rs = [min(r, n) for r in rs]
    rng = np.random.default_rng(salt)
    w = rng.dirichlet(np.ones(len(rs)))
    parts = [hash_partition(n, r, salt=salt + i, metric_id=f"m{i}", weight=float(w[i]),
                            coefficients=rng.uniform(0.1, 3.0, size=r))
             for i, r in enumerate(rs)]
    cfg = CommunityConfig(parts, lam)
    assert abs(cfg.key_weights.sum() - 1.0) <= 1e-9


def test_f_min_influence_only():
    cfg = single_community_config(10, lam=0.0)
    assert f_min(cfg, None, 1) == pytest.approx(0.1, abs=1e-15)


def test_f_min_diversity_only():
    cfg = single_community_config(10, lam=1.0)
    assert f_min(cfg, None, 4) == pytest.approx(0.4, abs=1e-15)


def test_f_min_rejects_bad_k():
    with pytest.raises(ValueError):
        f_min(single_community_config(4), None, 0)


@pytest.mark.parametrize("inst", all_instances(), ids=lambda t: t[0])
def test_f_min_below_every_size_k_set(inst):
    _, g, cfg = inst
    table = RealizationTable(g)
    for k in range(1, g.n + 1):
        sets = [s for s in subsets(g.n) if len(s) == k]
        lowest = table.f_values(cfg, sets).min()
        assert f_min(cfg, g, k) <= lowest + 1e-12


def test_presets():
    g = random_powerlaw_graph(100, 300, seed=0)
    q2 = synthetic_config(g, [3, 4], setting=1)
    assert [p.weight for p in q2.partitions] == [0.4, 0.6]
    q3 = synthetic_config(g, [3, 4, 5], setting=2)
    assert [p.weight for p in q3.partitions] == [0.1, 0.1, 0.8]
    assert q3.partitions[0].coefficients.tolist() == [0.1, 0.1, 2.8]
    for setting in (1, 2):
        assert [p.weight for p in synthetic_config(g, [3], setting=setting).partitions] == [1.0]
    assert synthetic_config(g, [3], setting=1).partitions[0].coefficients.tolist() == [0.4, 1.0,
                                                                                        1.6]


def test_unknown_setting():
    with pytest.raises(CommunityError, match="setting"):
        synthetic_config(20, [3], setting=3)


def test_file_round_trip():
    g = parse_edge_list("10 20\n20 30\n30 40\n40 10\n")
    cfg = synthetic_config(g, [3, 4], setting=2, lam=0.25)
    buf = io.StringIO()
    write_communities(cfg, g, buf)
    back = parse_communities(buf.getvalue(), g)
    assert back.lam == 0.25
    for a, b in zip(cfg.partitions, back.partitions):
        assert a.metric_id == b.metric_id and a.weight == b.weight
        assert a.assignment.tolist() == b.assignment.tolist()
        assert a.coefficients.tolist() == b.coefficients.tolist()
    assert format_communities(back, g) == buf.getvalue()


def test_file_uses_original_ids(tmp_path):
    g = parse_edge_list("5 9\n")
    path = tmp_path / "c.txt"
    path.write_text("lambda 1\nmetric m 1 1 2\nnode 9 1\nnode 5 0\n")
    cfg = load_communities(path, g)
    assert cfg.partitions[0].assignment.tolist() == [0, 1]


@pytest.mark.parametrize("text,fragment", [
    ("metric m 1 1\nnode 0 0\nnode 1 0\n", "lambda"),
    ("lambda 0.5\n", "no metrics"),
    ("lambda 0.5\nmetric m 1 1\nnode 0 0\nnode 7 0\n", "unknown node"),
    ("lambda 0.5\nmetric m 1 1\nnode 0 0\nnode 0 0\n", "twice"),
    ("lambda 0.5\nmetric m 1 1\nnode 0 0\n", "no community assignment"),
    ("lambda 0.5\nmetric m 0.5 1\nmetric n 0.6 1\nnode 0 0 0\nnode 1 0 0\n", "sum"),
    ("lambda 0.5\nmetric m 1 1\nnode 0 0 0\n", "expected"),
    ("lambda 0.5\ncolour m\n", "unknown key"),
])
def test_file_errors(text, fragment):
    g = parse_edge_list("0 1\n")
    with pytest.raises(CommunityError, match=fragment):
        parse_communities(text, g)
