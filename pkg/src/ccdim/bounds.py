"""Martingale confidence bounds on f and the sample-size schedules."""
from __future__ import annotations

import math
from dataclasses import dataclass

_INV_E = 1.0 - 1.0 / math.e


@dataclass(frozen=True)
class BoundParams:
    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")

    @property
    def eta(self) -> float:
        return math.log(1.0 / self.delta)


def lnchoose(n: int, k: int) -> float:
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def lower_bound_f(omega_value: float, theta: int, delta_l: float) -> float:
    """Lower confidence bound on f(S) from coverage ``omega_value`` over ``theta`` sets.

    Holds with probability at least ``1 - delta_l`` when the collection is
    independent of S.
    """
    if omega_value < 0 or theta < 1:
        raise ValueError("need omega >= 0 and theta >= 1")
    eta = math.log(1.0 / delta_l)
    val = (math.sqrt(omega_value + 2.0 * eta / 9.0) - math.sqrt(eta / 2.0)) ** 2 - eta / 18.0
    # the unclamped expression dips below zero for 0 < omega < 5*eta/18
    return min(max(val / theta, 0.0), 1.0)


def upper_bound_f(omega_upper: float, theta: int, delta_u: float) -> float:
    if omega_upper < 0 or theta < 1:
        raise ValueError("need omega >= 0 and theta >= 1")
    eta = math.log(1.0 / delta_u)
    val = (math.sqrt(omega_upper + eta / 2.0) + math.sqrt(eta / 2.0)) ** 2
    return min(val / theta, 1.0)


def theta_initial(delta_part: float) -> int:
    if not 0 < delta_part < 1:
        raise ValueError("delta must lie in (0, 1)")
    x = 3.0 * math.log(1.0 / delta_part)
    # tolerate rounding so that e.g. delta = e**-3 gives exactly 9
    return max(1, math.ceil(x - 1e-9))


def theta_max_stage1(n: int, k: int, eps1: float, delta1: float, fmin: float) -> int:
    if not (1 <= k <= n and eps1 > 0 and 0 < delta1 < 1 and fmin > 0):
        raise ValueError("invalid stage-1 schedule parameters")
    a = math.log(6.0 / delta1)
    val = 2.0 * (math.sqrt(a) + math.sqrt(lnchoose(n, k) + a)) ** 2 / (eps1 ** 2 * fmin)
    return math.ceil(val)


def theta_max_stage2(n: int, k: int, b: int, eps2: float, delta2: float, fmin: float) -> int:
    if not (0 <= b <= k <= n and k >= 1 and eps2 > 0 and 0 < delta2 < 1 and fmin > 0):
        raise ValueError("invalid stage-2 schedule parameters")
    a = math.log(9.0 / delta2)
    inner = _INV_E * (lnchoose(n - b, k - b) + a)
    val = 2.0 * (math.sqrt(a) + math.sqrt(inner)) ** 2 / (eps2 ** 2 * fmin)
    return math.ceil(val)


def doubling_rounds(theta_max: int, theta_init: int) -> int:
    """Number of doubling iterations, at least one."""
    return max(1, math.ceil(math.log2(theta_max / theta_init))) if theta_max > theta_init else 1


def greedy_fraction(k: int, a: int) -> float:
    """``1 - (1 - 1/k)**a``, the greedy guarantee after ``a`` of ``k`` picks."""
    return 1.0 - (1.0 - 1.0 / k) ** a
