import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strongchain.analytics import (POOLS, NoSolution, Protocol, RewardModelInputs, ZeroMean,
                                   bitcoin_reward_variance, coefficient_of_variation, cov_curve,
                                   equivalent_pool_share, pool_table, scaling_constant,
                                   strongchain_reward_variance, time_window_variance,
                                   variance_minimizing_gamma,
                                   variance_of_random_sum, weak_count_variance)

RNG_N = 10 ** 6


def test_scaling_constant_values():
    c = scaling_constant(1024, 10)
    assert float(c) == pytest.approx(0.0909898, abs=1e-7)
    assert 0.0082 <= c * c <= 0.0084
    assert scaling_constant(1024, 0) == 1
    assert float(scaling_constant(2 ** 30, 1)) == pytest.approx(0.5, abs=1e-8)


def test_random_sum_trivial_cases():
    assert variance_of_random_sum(7, 0, 3.0, 2.0) == 14.0
    a, F = 0.3, 5.0
    assert variance_of_random_sum(a, a * (1 - a), F, 0) == pytest.approx(a * (1 - a) * F ** 2)


def test_random_sum_geometric_bernoulli_monte_carlo():
    rng = np.random.default_rng(1)
    p, a = 0.05, 0.3
    L = rng.geometric(p, RNG_N)
    S = rng.binomial(L, a)
    E_N, Var_N = 1 / p, (1 - p) / p ** 2
    assert variance_of_random_sum(E_N, Var_N, a, a * (1 - a)) == pytest.approx(S.var(), rel=0.01)


def test_bitcoin_variance_values():
    assert bitcoin_reward_variance(RewardModelInputs(0.5, R=1)) == 0.25
    v = bitcoin_reward_variance(RewardModelInputs(0.09, R=12.5))
    assert v == pytest.approx(12.796875)
    rng = np.random.default_rng(2)
    assert (12.5 * (rng.random(RNG_N) < 0.09)).var() == pytest.approx(v, rel=0.01)


@given(st.floats(0, 1), st.floats(0.1, 100))
def test_bitcoin_variance_homogeneous(a, k):
    base = bitcoin_reward_variance(RewardModelInputs(a, R=1.0))
    assert bitcoin_reward_variance(RewardModelInputs(a, R=k)) == pytest.approx(k * k * base)


def test_weak_count_variance_cases():
    assert weak_count_variance(1, 64) == (63, 64 * 64 - 64)
    assert weak_count_variance(0, 64) == (0, 0)
    rng = np.random.default_rng(3)
    N = rng.binomial(rng.geometric(1 / 64, RNG_N) - 1, 0.1)
    E, V = weak_count_variance(0.1, 64)
    assert N.mean() == pytest.approx(E, rel=0.01)
    assert N.var() == pytest.approx(V, rel=0.01)


def test_gamma_zero_is_bitcoin_exactly():
    for a in (Fraction(1, 1000), Fraction(1, 10), Fraction(1, 2)):
        for ratio in (1, 2, 1024):
            x = RewardModelInputs(a, ratio, 0, Fraction(25, 2), Fraction(1, 3), Fraction(2))
            assert strongchain_reward_variance(x) == bitcoin_reward_variance(x)
    assert equivalent_pool_share(0.181, 1024, 0) == 0.181


def test_fig2_anchor():
    sc = coefficient_of_variation(RewardModelInputs(0.001, 1024, 10))
    btc = coefficient_of_variation(RewardModelInputs(0.09), Protocol.BITCOIN)
    assert sc == pytest.approx(btc, rel=0.03)


def test_zero_alpha_raises():
    with pytest.raises(ZeroMean):
        coefficient_of_variation(RewardModelInputs(0))


def test_fee_terms_match_sampling():
    a = 0.2
    x = RewardModelInputs(a, 1, 0, 10, fee_mean=2, fee_var=3)
    rng = np.random.default_rng(4)
    I = rng.random(RNG_N) < a
    F = rng.normal(2, math.sqrt(3), RNG_N)
    assert (I * (10 + F)).var() == pytest.approx(bitcoin_reward_variance(x), rel=0.01)
    y = RewardModelInputs(a, 64, 6, 10, fee_mean=2, fee_var=3)
    c = float(scaling_constant(64, 6))
    N = rng.binomial(rng.geometric(1 / 64, RNG_N) - 1, a)
    reward = I * (c * 10 + F) + c * 6 * 10 / 64 * N
    assert reward.var() == pytest.approx(strongchain_reward_variance(y), rel=0.01)
    assert reward.mean() == pytest.approx(a * 12, rel=0.01)


def test_cov_decreasing_in_gamma_below_the_minimizer():
    for a in (0.001, 0.05, 0.3):
        for ratio in (2, 64, 1024):
            g_star = variance_minimizing_gamma(a, ratio)
            below = np.linspace(0, g_star, 12)
            covs = [coefficient_of_variation(RewardModelInputs(a, ratio, g)) for g in below]
            assert all(x > y for x, y in zip(covs, covs[1:]))
            above = g_star * np.array([1.0, 1.5, 3, 10])
            covs = [coefficient_of_variation(RewardModelInputs(a, ratio, g)) for g in above]
            assert all(x < y for x, y in zip(covs, covs[1:]))


def test_gamma_ten_is_below_minimizer_for_small_miners():
    # the regime that motivates weak rewards: small alpha, large ratio
    for a in (0.001, 0.01, 0.05):
        assert variance_minimizing_gamma(a, 1024) > 10


@pytest.mark.parametrize("a", [0.01, 0.1, 0.5])
@pytest.mark.parametrize("ratio", [2, 64, 1024])
@pytest.mark.parametrize("gamma", [1, 10])
def test_strongchain_variance_monte_carlo(a, ratio, gamma):
    rng = np.random.default_rng(hash((a, ratio, gamma)) % 2 ** 32)
    c = float(scaling_constant(ratio, gamma))
    R = 12.5
    I = rng.random(RNG_N) < a
    N = rng.binomial(rng.geometric(1 / ratio, RNG_N) - 1, a)
    reward = c * R * I + c * gamma * R / ratio * N
    dev2 = (reward - reward.mean()) ** 2
    se = dev2.std() / math.sqrt(RNG_N)
    v = strongchain_reward_variance(RewardModelInputs(a, ratio, gamma, R))
    assert abs(reward.var() - v) < 3 * se
    assert reward.mean() == pytest.approx(a * R, rel=0.01)


@pytest.mark.parametrize("name,share,paper_eq,paper_red", POOLS)
def test_pool_rows_two_significant_figures(name, share, paper_eq, paper_red):
    eq = equivalent_pool_share(share, 1024, 10)
    assert eq == pytest.approx(paper_eq, abs=0.5 * 10 ** (math.floor(math.log10(paper_eq)) - 1))
    red = share / eq
    assert red == pytest.approx(paper_red, abs=0.5 * 10 ** (math.floor(math.log10(paper_red)) - 1))


def test_pool_share_monotone_and_solution_is_root():
    shares = np.linspace(0.005, 0.5, 25)
    eqs = [equivalent_pool_share(s) for s in shares]
    assert all(x < y for x, y in zip(eqs, eqs[1:]))
    s = 0.181
    eq = equivalent_pool_share(s)
    target = coefficient_of_variation(RewardModelInputs(s), Protocol.BITCOIN)
    assert coefficient_of_variation(RewardModelInputs(eq)) == pytest.approx(target, rel=1e-8)
    assert len(pool_table()) == 10


def test_no_solution_when_weak_rewards_raise_cov():
    # a share of 1 has zero Bitcoin variance; weak-header rewards add variance
    with pytest.raises(NoSolution):
        equivalent_pool_share(1.0)


def test_time_window_variance():
    a, R, t = 0.1, 12.5, 86_400
    assert time_window_variance(a, R, t) == pytest.approx(a * R * R * t / 600)
    rng = np.random.default_rng(5)
    blocks = rng.binomial(rng.poisson(t / 600, RNG_N), a)
    assert (R * blocks).var() == pytest.approx(time_window_variance(a, R, t), rel=0.01)


def test_cov_curve_bitcoin_special_case():
    btc = cov_curve([0.1, 0.2], 1)
    assert btc[0] == pytest.approx(math.sqrt(0.9 / 0.1))
    sc = cov_curve([0.1], 1024)
    assert sc[0] < btc[0]
