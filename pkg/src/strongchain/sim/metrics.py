import csv
import io
from dataclasses import dataclass, field

import numpy as np

CSV_COLUMNS = (
    "scenario", "seed", "miners", "alphas", "strategies", "ratio", "gamma", "latency",
    "latency_mean", "latency_shape", "horizon", "duration_s", "main_chain_blocks", "strong_found",
    "strong_stale_rate", "weak_found", "weak_included", "weak_pending", "weak_stale_rate",
    "subject_alpha", "subject_strategy", "subject_strong_found", "subject_strong_stale_rate",
    "subject_reward_share", "subject_fairness", "subject_abs_payoff", "subject_reward_cov",
    "ts_dev_strong_mean", "ts_dev_effective_mean", "ts_dev_strong_mean_abs",
    "ts_dev_effective_mean_abs", "converged",
)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return "nan" if np.isnan(x) else f"{float(x):.10g}"
    return str(x)


@dataclass
class RunMetrics:
    """Outcome of one simulated run.  Miner 0 is the subject miner in the CSV summary."""

    name: str
    seed: int
    alphas: list
    strategies: list
    ratio: float
    gamma: float
    latency: str
    latency_mean: float
    latency_shape: float
    horizon: int
    block_reward: int
    duration: float
    strong_found_by: np.ndarray
    strong_main_by: np.ndarray
    weak_found_by: np.ndarray
    weak_included_by: np.ndarray
    weak_pending: int
    reward_by: np.ndarray
    block_rewards: np.ndarray = field(repr=False)  # (main chain blocks, miners), atomic units
    ts_dev_strong: np.ndarray = field(repr=False)
    ts_dev_effective: np.ndarray = field(repr=False)
    converged: bool = True

    @property
    def n_miners(self) -> int:
        return len(self.alphas)

    @property
    def strong_found(self) -> int:
        return int(self.strong_found_by.sum())

    @property
    def main_chain_blocks(self) -> int:
        return int(self.strong_main_by.sum())

    @property
    def strong_stale_rate(self) -> float:
        return 1 - self.main_chain_blocks / self.strong_found

    def strong_stale_rate_of(self, m: int) -> float:
        found = self.strong_found_by[m]
        return float(1 - self.strong_main_by[m] / found) if found else float("nan")

    @property
    def weak_found(self) -> int:
        return int(self.weak_found_by.sum())

    @property
    def weak_included(self) -> int:
        return int(self.weak_included_by.sum())

    @property
    def weak_stale(self) -> int:
        return self.weak_found - self.weak_included - self.weak_pending

    @property
    def weak_stale_rate(self) -> float:
        return self.weak_stale / self.weak_found if self.weak_found else 0.0

    def reward_share(self, m: int) -> float:
        total = self.reward_by.sum()
        return float(self.reward_by[m] / total) if total else float("nan")

    def fairness(self, m: int) -> float:
        return self.reward_share(m) / self.alphas[m]

    def abs_payoff(self, m: int) -> float:
        """Rewards in block-reward units per 600 s of simulated time."""
        return float(self.reward_by[m] / self.block_reward / (self.duration / 600.0))

    def reward_cov(self, m: int) -> float:
        r = self.block_rewards[:, m].astype(np.float64)
        mean = r.mean() if r.size else 0.0
        return float(r.std() / mean) if mean else float("nan")

    def row(self) -> dict:
        dev_s, dev_e = self.ts_dev_strong, self.ts_dev_effective
        nan = float("nan")
        return {
            "scenario": self.name, "seed": self.seed, "miners": self.n_miners,
            "alphas": ";".join(f"{a:g}" for a in self.alphas),
            "strategies": ";".join(self.strategies),
            "ratio": self.ratio, "gamma": self.gamma, "latency": self.latency,
            "latency_mean": self.latency_mean, "latency_shape": self.latency_shape,
            "horizon": self.horizon, "duration_s": self.duration,
            "main_chain_blocks": self.main_chain_blocks, "strong_found": self.strong_found,
            "strong_stale_rate": self.strong_stale_rate, "weak_found": self.weak_found,
            "weak_included": self.weak_included, "weak_pending": self.weak_pending,
            "weak_stale_rate": self.weak_stale_rate,
            "subject_alpha": self.alphas[0], "subject_strategy": self.strategies[0],
            "subject_strong_found": int(self.strong_found_by[0]),
            "subject_strong_stale_rate": self.strong_stale_rate_of(0),
            "subject_reward_share": self.reward_share(0), "subject_fairness": self.fairness(0),
            "subject_abs_payoff": self.abs_payoff(0), "subject_reward_cov": self.reward_cov(0),
            "ts_dev_strong_mean": dev_s.mean() if dev_s.size else nan,
            "ts_dev_effective_mean": dev_e.mean() if dev_e.size else nan,
            "ts_dev_strong_mean_abs": np.abs(dev_s).mean() if dev_s.size else nan,
            "ts_dev_effective_mean_abs": np.abs(dev_e).mean() if dev_e.size else nan,
            "converged": self.converged,
        }


def write_csv(rows, f) -> None:
    """Write metric rows (RunMetrics or dicts) with the fixed column set."""
    w = csv.writer(f, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        d = r.row() if isinstance(r, RunMetrics) else r
        w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])


def csv_text(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
