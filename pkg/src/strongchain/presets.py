"""Named experiment presets: a scenario grid, its data rows, and checks against reference values.

Every preset returns a :class:`PresetResult`; ``strongchain reproduce`` writes
its CSV files and report.  Each reference value carries the tolerance it is
checked at.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analytics
from .mining import MinerIdentity, hash_rate_for_interval, weak_count_tail, weak_counts_between_strong
from .mining import stream as rng_stream
from .core.params import ProtocolParams
from .sim import HIGH, LOW, MEDIUM, LatencyModel, MinerSpec, SimConfig, StrategyKind, StrategySpec, run_matrix
from .sim.config import SIM_STRONG_TARGET
from .sim.fast import block_reward_stats, timestamp_experiment


@dataclass
class Check:
    name: str
    value: float
    expected: str
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.value:.6g} (expected {self.expected})"


@dataclass
class PresetResult:
    name: str
    columns: tuple
    rows: list
    checks: list
    runs: list = field(default_factory=list)   # RunMetrics of simulation presets
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def report(self) -> str:
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({self.seconds:.1f} s)"
        return "\n".join([head] + [c.line() for c in self.checks]) + "\n"

    def merge(self, other: "PresetResult", name: str) -> "PresetResult":
        cols = tuple(dict.fromkeys(self.columns + other.columns))
        return PresetResult(name, cols, self.rows + other.rows, self.checks + other.checks,
                            self.runs + other.runs, self.seconds + other.seconds)


def _within(name, value, ref, tol, rel=False) -> Check:
    bound = tol * abs(ref) if rel else tol
    how = f"{ref:g} ± {tol:g}{' rel' if rel else ''}"
    return Check(name, value, how, abs(value - ref) <= bound)


def _two(miners_alpha, kind, ratio, gamma, latency, horizon, seeds, seed, name, **kw) -> SimConfig:
    a = Fraction(miners_alpha).limit_denominator(1000)
    return SimConfig(miners=(MinerSpec(a, StrategySpec(kind, **kw)), MinerSpec(1 - a)),
                     ratio=Fraction(ratio), gamma=Fraction(gamma), latency=LatencyModel(mean=latency),
                     horizon=horizon, seeds=seeds, seed=seed, name=name)


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__, wrapper.__doc__ = fn.__name__, fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# weak-count law and scaling constant


@_timed
def weakcount_distribution(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    ratio = 1024
    n_strong = 1_000_000 if full else 100_000
    params = ProtocolParams.from_ratio(SIM_STRONG_TARGET, ratio)
    miners = [MinerIdentity(b"\x01" * 20, Fraction(1))]
    counts = weak_counts_between_strong(rng_stream(seed, 5), miners, params,
                                        hash_rate_for_interval(params), n_strong)
    edges = np.arange(0, 8 * ratio + 1, ratio // 4)
    hist, _ = np.histogram(counts, bins=edges)
    q = 1 - 1 / ratio
    rows = [{"bin_lo": int(lo), "bin_hi": int(hi), "observed": int(h),
             "expected": n_strong * (q ** lo - q ** hi)}
            for lo, hi, h in zip(edges[:-1], edges[1:], hist)]
    mean = float(counts.mean())
    tail = weak_count_tail(ratio, 16_667)
    c2 = float(analytics.scaling_constant(ratio, 10) ** 2)
    checks = [
        _within(f"mean weak headers per block ({n_strong} strong blocks)", mean, ratio - 1, 0.02, rel=True),
        _within("P(more than 16667 weak headers)", tail, 8.4603e-8, 0.005, rel=True),
        Check("c^2 at ratio 1024, gamma 10", c2, "in [0.0082, 0.0084]", 0.0082 <= c2 <= 0.0084),
    ]
    return PresetResult("weakcount-distribution", ("bin_lo", "bin_hi", "observed", "expected"), rows, checks)


# ---------------------------------------------------------------------------
# reward variance


FIG2_GRID = [(a, r) for a in (0.001, 0.01, 0.1) for r in (2, 64, 1024)]


@_timed
def fig2_variance(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    blocks = 10 ** 8 if full else 10 ** 7
    rows = []
    for r in (1, 2, 64, 1024):
        for a in np.geomspace(0.001, 0.5, 25):
            g = 0 if r == 1 else math.log2(r)
            rows.append({"kind": "analytic", "alpha": float(a), "ratio": r, "gamma": g,
                         "cov": analytics.cov_curve([a], r, g)[0], "analytic_cov": "", "blocks": ""})
    checks = []
    for i, (a, r) in enumerate(FIG2_GRID):
        g = math.log2(r)
        st = block_reward_stats(a, r, g, blocks, seed=seed * 100 + i)
        ref = analytics.cov_curve([a], r, g)[0]
        rows.append({"kind": "simulated", "alpha": a, "ratio": r, "gamma": g, "cov": st.cov,
                     "analytic_cov": ref, "blocks": blocks})
        checks.append(_within(f"simulated CoV alpha={a} ratio={r}", st.cov, ref, 0.05, rel=True))
    sc = analytics.coefficient_of_variation(analytics.RewardModelInputs(0.001, 1024, 10))
    btc = analytics.coefficient_of_variation(analytics.RewardModelInputs(0.09, 1, 0), analytics.Protocol.BITCOIN)
    checks.insert(0, _within("CoV alpha=0.001 ratio=1024 vs Bitcoin alpha=0.09", sc, btc, 0.03, rel=True))
    return PresetResult("fig2-variance", ("kind", "alpha", "ratio", "gamma", "cov", "analytic_cov", "blocks"),
                        rows, checks)


# ---------------------------------------------------------------------------
# stale rate and fairness


LATENCIES = (("low", LOW), ("medium", MEDIUM), ("high", HIGH))
LATENCY_COLUMNS = ((1, 0), (2, 1), (64, 1), (64, 7), (64, 63), (1024, 1), (1024, 10), (1024, 1023))
# reference table, indexed [metric][latency] in LATENCY_COLUMNS order (None: not applicable)
LATENCY_TABLE = {
    "strong_stale_rate": {
        "low": (.0023, .0025, .0021, .0026, .0028, .0023, .0025, .0019),
        "medium": (.0073, .0082, .0087, .0077, .0078, .0084, .0067, .0081),
        "high": (.0243, .0297, .0242, .0263, .0247, .0274, .0249, .0263)},
    "weak_stale_rate": {
        "low": (None, .0043, .0047, .0049, .0046, .0049, .0047, .0047),
        "medium": (None, .0142, .0151, .0154, .0149, .0145, .0147, .0149),
        "high": (None, .0400, .0459, .0474, .0452, .0469, .0455, .0463)},
    "fairness": {
        "low": (.9966, .9814, .9749, .9747, .9838, .9645, .9809, .9812),
        "medium": (.9276, .9384, .9570, .9360, .9364, .9329, .9400, .9385),
        "high": (.7951, .7640, .7978, .7820, .7757, .7756, .7766, .7775)},
}


@_timed
def table_latencies(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    cols = LATENCY_COLUMNS if full else ((1, 0), (1024, 10))
    cfgs = []
    for lname, lat in LATENCIES:
        for r, g in cols:
            cfgs.append(_two(0.1, StrategyKind.HONEST, r, g, lat, 20_000, 10, seed,
                             f"latency-{lname}-r{r}-g{g}"))
    results = run_matrix(cfgs, workers)
    rows, checks, runs = [], [], []
    for cfg, res in zip(cfgs, results):
        runs += res
        lname = cfg.name.split("-")[1]
        k = LATENCY_COLUMNS.index((int(cfg.ratio), int(cfg.gamma)))
        got = {"strong_stale_rate": np.mean([m.strong_stale_rate for m in res]),
               "weak_stale_rate": np.mean([m.weak_stale_rate for m in res]),
               "fairness": np.mean([m.fairness(0) for m in res])}
        for metric, v in got.items():
            ref = LATENCY_TABLE[metric][lname][k]
            rows.append({"latency": lname, "ratio": int(cfg.ratio), "gamma": int(cfg.gamma),
                         "metric": metric, "value": float(v), "reference": "" if ref is None else ref,
                         "seeds": cfg.seeds, "horizon": cfg.horizon})
        if cfg.ratio == 1:
            ref = LATENCY_TABLE["strong_stale_rate"][lname][k]
            checks.append(_within(f"Bitcoin strong stale rate, {lname} latency", got["strong_stale_rate"], ref, 0.003))
        if (cfg.ratio, cfg.gamma, lname) == (1024, 10, "medium"):
            ref = LATENCY_TABLE["fairness"][lname][k]
            checks.append(_within("fairness, ratio 1024 gamma 10, medium latency", got["fairness"], ref, 0.03))
    return PresetResult("table-latencies", ("latency", "ratio", "gamma", "metric", "value", "reference",
                                            "seeds", "horizon"), rows, checks, runs)


# ---------------------------------------------------------------------------
# adversarial strategies


def _sweep_rows(cfgs, results, extra):
    rows = []
    for cfg, res in zip(cfgs, results):
        rows.append({"strategy": cfg.miners[0].strategy.kind.value, "alpha": float(cfg.miners[0].alpha),
                     "ratio": float(cfg.ratio), "gamma": float(cfg.gamma), "latency_mean": cfg.latency.mean,
                     "relative_payoff": float(np.mean([m.reward_share(0) for m in res])),
                     "absolute_payoff": float(np.mean([m.abs_payoff(0) for m in res])),
                     "seeds": cfg.seeds, "horizon": cfg.horizon, **extra})
    return rows


SWEEP_COLUMNS = ("strategy", "alpha", "ratio", "gamma", "latency_mean", "relative_payoff",
                 "absolute_payoff", "seeds", "horizon")


@_timed
def fig3_selfish(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    """Selfish payoff against alpha, Bitcoin against weak-header weighting."""
    alphas = [round(0.03 * k, 2) for k in range(1, 17 if full else 15)]
    modes = ((1, 0), (2, 1), (64, 6), (1024, 10)) if full else ((1, 0), (1024, 10))
    seeds, horizon = (20, 40_320) if full else (10, 20_000)
    cfgs = [_two(a, StrategyKind.SELFISH, r, g, LOW, horizon, seeds, seed, f"selfish-r{r}-a{a}")
            for r, g in modes for a in alphas]
    results = run_matrix(cfgs, workers)
    rows = _sweep_rows(cfgs, results, {})
    runs = [m for res in results for m in res]
    gain = {(row["ratio"], row["alpha"]): row["relative_payoff"] - row["alpha"] for row in rows}
    btc = [a for a in alphas if a <= 0.36 and gain[(1.0, a)] > 0]
    sc = [a for a in alphas if a <= 0.42 and gain[(1024.0, a)] > 0]
    checks = [
        Check("Bitcoin: selfish payoff > alpha for some alpha <= 0.36", min(btc) if btc else math.nan,
              "some alpha", bool(btc)),
        Check("ratio 1024: selfish payoff > alpha for no alpha <= 0.42", min(sc) if sc else math.nan,
              "none (nan)", not sc),
    ]
    return PresetResult("fig3-selfish", SWEEP_COLUMNS, rows, checks, runs)


@_timed
def fig3_others(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    """Reclusive and spiteful payoffs, with honest runs on the same seeds as the baseline."""
    alphas = [round(0.03 * k, 2) for k in range(1, 17)] if full else [0.05, 0.15, 0.25, 0.35, 0.45]
    seeds, horizon = (20, 40_320) if full else (10, 20_000)
    kinds = (StrategyKind.RECLUSIVE, StrategyKind.SPITEFUL, StrategyKind.HONEST)
    cfgs = [_two(a, k, 1024, 10, LOW, horizon, seeds, seed, f"{k.value}-a{a}") for k in kinds for a in alphas]
    results = run_matrix(cfgs, workers)
    rows = _sweep_rows(cfgs, results, {})
    runs = [m for res in results for m in res]
    by = {(row["strategy"], row["alpha"]): row for row in rows}
    checks = []
    worst = max(by[("reclusive", a)]["relative_payoff"] - a for a in alphas)
    checks.append(Check("reclusive: max(relative payoff - alpha) over alpha < 0.5", worst, "<= 0", worst <= 0))
    low = min(by[("spiteful", a)]["relative_payoff"] - a for a in alphas)
    checks.append(Check("spiteful: min(relative payoff - alpha), low latency", low, ">= 0", low >= 0))
    diff = max(by[("spiteful", a)]["absolute_payoff"] - by[("honest", a)]["absolute_payoff"] for a in alphas)
    checks.append(Check("spiteful: max(absolute payoff - honest baseline), paired seeds", diff, "<= 0",
                        diff <= 1e-12))
    return PresetResult("fig3-others", SWEEP_COLUMNS, rows, checks, runs)


@_timed
def fig3_strategies(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    a = fig3_selfish(seed, full, workers)
    b = fig3_others(seed, full, workers)
    return a.merge(b, "fig3-strategies")


# ---------------------------------------------------------------------------
# timestamps


@_timed
def fig4_timestamps(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    runs = 100_000 if full else 10_000
    rows, checks = [], []
    for kind in (StrategyKind.TIMESTAMP_SLOW, StrategyKind.TIMESTAMP_FAST):
        for a in (0.1, 0.2, 0.3):
            res = timestamp_experiment(a, kind, runs=runs, seed=seed)
            rows.append({"adversary": kind.value, "alpha": a, "runs": runs,
                         "dev_strong_mean": float(res.dev_strong.mean()),
                         "dev_effective_mean": float(res.dev_effective.mean()),
                         "reduction": res.reduction})
            if kind is StrategyKind.TIMESTAMP_SLOW:
                checks.append(_within(f"slow adversary alpha={a}: deviation reduction (s)",
                                      res.reduction, 2000, 0.2, rel=True))
            else:
                checks.append(Check(f"fast adversary alpha={a}: deviation reduction (s)", res.reduction,
                                    "in [2000, 3500]", 2000 <= res.reduction <= 3500))
    return PresetResult("fig4-timestamps", ("adversary", "alpha", "runs", "dev_strong_mean",
                                            "dev_effective_mean", "reduction"), rows, checks)


# ---------------------------------------------------------------------------
# pools


def agrees_to(value: float, ref: float, digits: int = 2) -> bool:
    """``value`` is within half a unit of the last of ``digits`` significant figures of ``ref``."""
    unit = 10.0 ** (math.floor(math.log10(abs(ref))) - digits + 1)
    return abs(value - ref) <= unit / 2


@_timed
def table_pools(seed: int = 0, full: bool = False, workers=None) -> PresetResult:
    rows, checks = [], []
    for (name, share, eq_ref, red_ref), (_, _, eq, red) in zip(analytics.POOLS, analytics.pool_table()):
        rows.append({"pool": name, "bitcoin_share": share, "equivalent_share": eq, "reduction": red,
                     "reference_share": eq_ref, "reference_reduction": red_ref})
        ok = agrees_to(eq, eq_ref) and agrees_to(red, red_ref)
        checks.append(Check(f"{name} {share:.1%}: equivalent share", eq,
                            f"{eq_ref:g} and {red_ref}x to 2 significant figures", ok))
    return PresetResult("table-pools", ("pool", "bitcoin_share", "equivalent_share", "reduction",
                                        "reference_share", "reference_reduction"), rows, checks)


PRESETS = {
    "fig2-variance": fig2_variance,
    "table-latencies": table_latencies,
    "fig3-strategies": fig3_strategies,
    "fig4-timestamps": fig4_timestamps,
    "table-pools": table_pools,
    "weakcount-distribution": weakcount_distribution,
}
