"""Vectorized samplers for experiments that need many more blocks than the event engine can run.

Both treat the network as latency-free with a fixed difficulty, which is the
setting the corresponding experiments assume.  The event engine covers the
same per-block laws at smaller scale, see tests/test_sim_fast.py.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..core.params import ProtocolParams
from ..core.rewards import payout_amounts
from ..mining import stream
from .config import SIM_STRONG_TARGET, StrategyKind

CHUNK = 1 << 20


@dataclass(frozen=True)
class RewardStats:
    blocks: int
    mean: float
    var: float

    @property
    def cov(self) -> float:
        return math.sqrt(self.var) / self.mean


def block_reward_stats(alpha, ratio, gamma, blocks: int, seed: int = 0,
                       block_reward: int = 1_250_000_000) -> RewardStats:
    """Per-block reward of an ``alpha`` miner, sampled block by block.

    Each block: the miner found it with probability alpha; the number of weak
    headers before it is geometric with mean ``ratio - 1``, and each of those
    is the miner's with probability alpha.  Ratio 1 means plain Bitcoin.
    """
    params = ProtocolParams.from_ratio(SIM_STRONG_TARGET, ratio, gamma=gamma, block_reward=block_reward)
    strong, weak = payout_amounts(params)
    rng = stream(seed, 3)
    p = 1 / float(ratio)
    a = float(alpha)
    total = 0.0
    total_sq = 0.0
    left = blocks
    while left:
        k = min(left, CHUNK)
        left -= k
        r = strong * (rng.random(k) < a).astype(np.float64)
        if ratio != 1:
            n = rng.geometric(p, k) - 1
            r += weak * rng.binomial(n, a).astype(np.float64)
        r /= block_reward
        total += r.sum()
        total_sq += (r * r).sum()
    mean = total / blocks
    return RewardStats(blocks, mean, (total_sq / blocks - mean * mean) * blocks / (blocks - 1))


@dataclass
class TimestampRun:
    alpha: float
    kind: StrategyKind
    dev_strong: np.ndarray      # strong header timestamp minus true time, per adversary block
    dev_effective: np.ndarray   # weighted timestamp minus true time

    @property
    def reduction(self) -> float:
        """How much closer to true time the weighted timestamp is, on average (seconds)."""
        return float(np.abs(self.dev_strong).mean() - np.abs(self.dev_effective).mean())


def timestamp_experiment(alpha, kind: StrategyKind, runs: int = 10_000, ratio=1024,
                         seed: int = 0, burn_in: int = 200,
                         params: ProtocolParams | None = None) -> TimestampRun:
    """Grow one chain until the adversary has mined ``runs`` blocks and compare
    the strong-header timestamp of each such block with its weighted timestamp.

    The adversary (share ``alpha``) stamps every header it makes, strong or
    weak, by ``kind``; everyone else stamps honestly.  With ``alpha == 0``
    there is no adversary and every block is measured instead.
    """
    if kind not in (StrategyKind.TIMESTAMP_SLOW, StrategyKind.TIMESTAMP_FAST):
        raise ValueError("kind must be a timestamp strategy")
    p = params or ProtocolParams.from_ratio(SIM_STRONG_TARGET, ratio)
    g0, interval, drift = p.genesis_time, float(p.target_block_interval), p.max_future_drift
    rate = float(p.ratio) - 1
    w = 1 / float(p.ratio)
    a = float(alpha)
    slow = kind is StrategyKind.TIMESTAMP_SLOW
    rng = stream(seed, 4, int(round(a * 1e6)), 0 if slow else 1)
    window = [g0 + interval * i for i in range(-p.median_window + 1, 1)]
    t = 0.0
    dev_s, dev_e = [], []
    height = 0
    while len(dev_s) < runs:
        x = rng.exponential(interval)
        t_prev, t = t, t + x
        height += 1
        mtp = float(np.median(window[-p.median_window:]))
        now = g0 + math.floor(t)
        adv = rng.random() < a
        if not adv:
            ts = max(now, int(mtp) + 1)
        else:
            ts = int(mtp) + 1 if slow else now + drift
        window.append(ts)
        del window[:-p.median_window]
        if not (adv or a == 0) or height <= burn_in:
            continue
        n = rng.poisson(rate * x / interval)
        found = g0 + np.floor(t_prev + x * rng.random(n))
        mine = rng.random(n) < a
        honest_ts = np.maximum(found[~mine], int(mtp) + 1)
        adv_ts = np.full(int(mine.sum()), int(mtp) + 1.0) if slow else found[mine] + drift
        weak_sum = honest_ts.sum() + adv_ts.sum()
        eff = (ts + w * weak_sum) / (1 + w * n)
        true = g0 + t
        dev_s.append(ts - true)
        dev_e.append(eff - true)
    return TimestampRun(a, kind, np.array(dev_s), np.array(dev_e))
