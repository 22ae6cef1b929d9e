"""Closed-form per-block reward statistics for a solo miner, Bitcoin vs. weak-header rewarding.

All functions accept ints, floats or Fractions; with Fractions the variances
are exact.  Rewards are in whatever unit ``R`` is given in.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .core.params import scaling_constant

__all__ = (
    "Protocol", "RewardModelInputs", "ZeroMean", "NoSolution", "scaling_constant",
    "variance_of_random_sum", "bitcoin_reward_variance", "weak_count_variance",
    "strongchain_reward_variance", "variance_minimizing_gamma", "reward_variance", "mean_reward", "coefficient_of_variation",
    "equivalent_pool_share", "time_window_variance", "POOLS", "pool_table", "cov_curve",
)


class Protocol(Enum):
    BITCOIN = "bitcoin"
    STRONGCHAIN = "strongchain"


class ZeroMean(ValueError):
    pass


class NoSolution(ValueError):
    pass


@dataclass(frozen=True)
class RewardModelInputs:
    alpha: float
    ratio: float = 1024
    gamma: float = 10
    R: float = 12.5
    fee_mean: float = 0
    fee_var: float = 0

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if self.ratio < 1 or self.gamma < 0 or self.fee_var < 0:
            raise ValueError("need ratio >= 1, gamma >= 0, fee_var >= 0")


def variance_of_random_sum(E_N, Var_N, E_X, Var_X):
    """Variance of a sum of N i.i.d. copies of X, with N independent of the X_i."""
    return E_N * Var_X + Var_N * E_X ** 2


def _fee_term(x: RewardModelInputs):
    # Var(I * F) with I ~ Bernoulli(alpha)
    a = x.alpha
    return variance_of_random_sum(a, a * (1 - a), x.fee_mean, x.fee_var)


def bitcoin_reward_variance(x: RewardModelInputs):
    # Var(I * (R + F)); the last term is the block-reward/fee covariance
    a = x.alpha
    return _fee_term(x) + a * (1 - a) * (x.R ** 2 + 2 * x.R * x.fee_mean)


def weak_count_variance(alpha, ratio):
    """Mean and variance of the miner's weak headers per block (binomially thinned geometric)."""
    E_L = ratio - 1
    Var_L = ratio ** 2 - ratio
    return alpha * E_L, variance_of_random_sum(E_L, Var_L, alpha, alpha * (1 - alpha))


def strongchain_reward_variance(x: RewardModelInputs):
    a = x.alpha
    c = scaling_constant(Fraction(x.ratio), Fraction(x.gamma))
    if not isinstance(x.R, (int, Fraction)):
        c = float(c)
    _, var_n = weak_count_variance(a, x.ratio)
    strong = (c * x.R) ** 2 * a * (1 - a) + 2 * c * x.R * x.fee_mean * a * (1 - a)
    return strong + _fee_term(x) + (c * x.gamma * x.R / x.ratio) ** 2 * var_n


def variance_minimizing_gamma(alpha, ratio):
    """The gamma at which the weak-header reward variance is smallest.

    The CoV falls as gamma grows up to this point and rises after it, since
    weak-count variance then dominates.
    """
    _, var_n = weak_count_variance(alpha, ratio)
    if var_n == 0:
        return math.inf
    return (ratio - 1) / ratio * alpha * (1 - alpha) * ratio ** 2 / var_n


def reward_variance(x: RewardModelInputs, protocol: Protocol):
    if protocol is Protocol.BITCOIN:
        return bitcoin_reward_variance(x)
    return strongchain_reward_variance(x)


def mean_reward(x: RewardModelInputs):
    # c-scaling keeps the expected issuance per block at R for both protocols
    return x.alpha * (x.R + x.fee_mean)


def coefficient_of_variation(x: RewardModelInputs, protocol: Protocol = Protocol.STRONGCHAIN) -> float:
    mean = mean_reward(x)
    if mean == 0:
        raise ZeroMean("alpha = 0 gives a zero mean reward")
    return math.sqrt(reward_variance(x, protocol)) / float(mean)


def equivalent_pool_share(bitcoin_share: float, ratio=1024, gamma=10, R=12.5,
                          rtol: float = 1e-9) -> float:
    """Smallest-share miner whose reward CoV under weak-header rewarding equals the Bitcoin CoV
    of a ``bitcoin_share`` miner.  Solved by bisection on ``(0, bitcoin_share]``."""
    target = coefficient_of_variation(RewardModelInputs(bitcoin_share, 1, 0, R), Protocol.BITCOIN)

    def cov(a):
        return coefficient_of_variation(RewardModelInputs(a, ratio, gamma, R))

    hi = float(bitcoin_share)
    if cov(hi) > target * (1 + 1e-12):
        raise NoSolution(f"CoV at alpha={hi} already exceeds the Bitcoin target")
    if cov(hi) >= target * (1 - 1e-12):
        return hi
    lo = hi
    while cov(lo) < target:
        lo /= 2
    while hi - lo > rtol * hi:
        mid = (lo + hi) / 2
        if cov(mid) > target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def time_window_variance(alpha, R, t, interval=600):
    """Bitcoin solo-miner reward variance over ``t`` seconds (Poisson number of blocks)."""
    n = t / interval
    # Lemma applied with N ~ Poisson(n) blocks, X = per-block reward I*R
    return variance_of_random_sum(n, n, alpha * R, alpha * (1 - alpha) * R ** 2)


POOLS = (
    ("BTC.com", 0.181, 0.00245, 74),
    ("F2Pool", 0.141, 0.00172, 82),
    ("AntPool", 0.117, 0.00135, 87),
    ("SlushPool", 0.091, 0.00099, 92),
    ("ViaBTC", 0.075, 0.00079, 95),
    ("BTC.TOP", 0.071, 0.00074, 96),
    ("BitClub", 0.031, 0.00030, 103),
    ("DPOOL", 0.026, 0.00025, 104),
    ("Bitcoin.com", 0.019, 0.00018, 106),
    ("BitFury", 0.017, 0.00016, 106),
)


def pool_table(ratio=1024, gamma=10):
    """Rows ``(name, bitcoin_share, equivalent_share, reduction)``."""
    rows = []
    for name, share, _, _ in POOLS:
        eq = equivalent_pool_share(share, ratio, gamma)
        rows.append((name, share, eq, share / eq))
    return rows


def cov_curve(alphas, ratio, gamma=None, R=12.5):
    """CoV over ``alphas``; ``gamma`` defaults to log2(ratio) and ratio 1 means Bitcoin."""
    if gamma is None:
        gamma = math.log2(ratio)
    proto = Protocol.BITCOIN if ratio == 1 else Protocol.STRONGCHAIN
    return [coefficient_of_variation(RewardModelInputs(a, ratio, gamma, R), proto) for a in alphas]
