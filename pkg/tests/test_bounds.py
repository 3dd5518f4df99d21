import math

import pytest
from hypothesis import given, settings, strategies as st

from ccdim.bounds import (BoundParams, doubling_rounds, greedy_fraction, lnchoose,
                          lower_bound_f, theta_initial, theta_max_stage1, theta_max_stage2,
                          upper_bound_f)
from ccdim.community import f_min, single_community_config

# pinned from an exact-integer evaluation with math.comb (n=400, k=10, eps=delta=0.05,
# fmin = 10/400 for a single community)
GOLDEN_STAGE1 = 2721770
GOLDEN_STAGE2_B0 = 1994356
GOLDEN_STAGE2_B3 = 1664490


def test_lower_bound_zero_coverage():
    assert lower_bound_f(0.0, 50, 0.1) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e4), st.floats(0, 1e4), st.integers(1, 10**5), st.floats(1e-6, 0.9))
def test_lower_bound_monotone_in_coverage(a, b, theta, delta):
    lo, hi = sorted((a, b))
    assert lower_bound_f(lo, theta, delta) <= lower_bound_f(hi, theta, delta) + 1e-15


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e4), st.integers(1, 10**5), st.floats(1e-6, 0.9))
def test_bounds_bracket_the_point_estimate(omega, theta, delta):
    omega = min(omega, theta)
    est = omega / theta
    assert lower_bound_f(omega, theta, delta) <= est + 1e-12
    assert upper_bound_f(omega, theta, delta) >= min(est, 1.0) - 1e-12


def test_upper_bound_zero_coverage():
    eta = math.log(1 / 0.05)
    assert upper_bound_f(0.0, 1000, 0.05) == pytest.approx(2 * eta / 1000, rel=1e-12)


def test_upper_bound_full_coverage_limit():
    assert upper_bound_f(500.0, 500, 1 - 1e-12) == pytest.approx(1.0, abs=1e-6)


def test_bounds_reject_bad_input():
    with pytest.raises(ValueError):
        lower_bound_f(-1, 10, 0.1)
    with pytest.raises(ValueError):
        upper_bound_f(1, 0, 0.1)


def test_theta_initial():
    assert theta_initial(0.05) == 9
    assert theta_initial(math.exp(-3)) == 9
    assert theta_initial(1 - 1e-9) == 1
    with pytest.raises(ValueError):
        theta_initial(0)


def test_lnchoose_small():
    assert lnchoose(5, 2) == pytest.approx(math.log(10), abs=1e-12)
    assert lnchoose(7, 0) == 0.0


def test_stage1_golden():
    cfg = single_community_config(400, lam=0.7)
    assert theta_max_stage1(400, 10, 0.05, 0.05, f_min(cfg, None, 10)) == GOLDEN_STAGE1


def test_stage2_golden():
    fm = f_min(single_community_config(400, lam=0.7), None, 10)
    assert theta_max_stage2(400, 10, 0, 0.05, 0.05, fm) == GOLDEN_STAGE2_B0
    assert theta_max_stage2(400, 10, 3, 0.05, 0.05, fm) == GOLDEN_STAGE2_B3


def test_stage1_monotone():
    base = theta_max_stage1(400, 10, 0.1, 0.1, 0.02)
    assert theta_max_stage1(800, 10, 0.1, 0.1, 0.02) > base
    assert theta_max_stage1(400, 10, 0.2, 0.1, 0.02) < base


def test_stage2_b_equals_k():
    val = theta_max_stage2(100, 5, 5, 0.1, 0.1, 0.05)
    a = math.log(90)
    assert val == math.ceil(2 * (math.sqrt(a) + math.sqrt((1 - 1 / math.e) * a)) ** 2
                            / (0.01 * 0.05))
    assert val > 0


@pytest.mark.parametrize("n,k", [(50, 3), (400, 10), (5000, 50)])
@pytest.mark.parametrize("eps,delta", [(0.05, 0.05), (0.1, 0.1), (0.3, 0.01)])
def test_stage2_never_exceeds_stage1(n, k, eps, delta):
    fm = k / n
    s1 = theta_max_stage1(n, k, eps, delta, fm)
    for b in range(0, k + 1):
        assert theta_max_stage2(n, k, b, eps, delta, fm) <= s1


def test_doubling_rounds():
    assert doubling_rounds(9, 9) == 1
    assert doubling_rounds(10, 9) == 1
    assert doubling_rounds(1000, 9) == math.ceil(math.log2(1000 / 9))


def test_greedy_fraction_threshold():
    assert greedy_fraction(10, 3) == pytest.approx(0.271, abs=1e-12)
    eps1 = 0.05
    assert greedy_fraction(10, 3) - eps1 == pytest.approx(0.221, abs=1e-12)
    assert greedy_fraction(10, 0) == 0.0


def test_bound_params():
    assert BoundParams(0.1, 0.05).eta == pytest.approx(math.log(20))
    with pytest.raises(ValueError):
        BoundParams(0.1, 1.0)
