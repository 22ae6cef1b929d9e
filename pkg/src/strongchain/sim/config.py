"""Scenario configuration: dataclasses plus a small ``key = value`` file format.

See docs/config.md for the file schema.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

from ..core.params import ProtocolParams
from .latency import LatencyFamily, LatencyModel

SIM_STRONG_TARGET = 2 ** 200


class ConfigInvalid(ValueError):
    """Raised with one ``field: problem`` line per error found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


class StrategyKind(Enum):
    HONEST = "honest"
    SELFISH = "selfish"
    RECLUSIVE = "reclusive"
    SPITEFUL = "spiteful"
    TIMESTAMP_SLOW = "timestamp-slow"
    TIMESTAMP_FAST = "timestamp-fast"


class SelfishLead(Enum):
    """How a selfish miner measures its lead over the public chain."""
    CHAIN_POW = "chain-pow"     # accumulated weight of blocks, including their weak headers
    FORK_VALUE = "fork-value"   # fork-choice value, which adds weak headers still pending


@dataclass(frozen=True)
class StrategySpec:
    kind: StrategyKind = StrategyKind.HONEST
    # spiteful only: include foreign weak headers when they add more than this many
    # strong blocks of weight; <= 0 means never include them
    threshold: float = 1.0

    def __str__(self):
        if self.kind is StrategyKind.SPITEFUL:
            return f"{self.kind.value}(threshold={self.threshold:g})"
        return self.kind.value


@dataclass(frozen=True)
class MinerSpec:
    alpha: Fraction
    strategy: StrategySpec = StrategySpec()


@dataclass(frozen=True)
class SimConfig:
    miners: tuple
    ratio: Fraction = Fraction(1)
    gamma: Fraction = Fraction(0)
    latency: LatencyModel = LatencyModel()
    horizon: int = 20_160
    seed: int = 0
    seeds: int = 1
    retarget_window: int = 2016
    target_block_interval: int = 600
    block_reward: int = 1_250_000_000
    selfish_withhold_weak: bool = True
    selfish_lead: SelfishLead = SelfishLead.CHAIN_POW
    name: str = "scenario"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        errs = validate(self)
        if errs:
            raise ConfigInvalid(errs)

    @property
    def params(self) -> ProtocolParams:
        return ProtocolParams.from_ratio(
            SIM_STRONG_TARGET, self.ratio, gamma=self.gamma, block_reward=self.block_reward,
            retarget_window=self.retarget_window, target_block_interval=self.target_block_interval)

    @property
    def alphas(self) -> list[float]:
        return [float(m.alpha) for m in self.miners]

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)


def validate(cfg: SimConfig) -> list[str]:
    errs = []
    if not cfg.miners:
        errs.append("miner: at least one miner is required")
    total = sum((Fraction(m.alpha) for m in cfg.miners), Fraction(0))
    if cfg.miners and abs(total - 1) > Fraction(1, 10 ** 9):
        errs.append(f"miner: hash shares sum to {float(total):g}, expected 1")
    for i, m in enumerate(cfg.miners):
        if not 0 < m.alpha <= 1:
            errs.append(f"miner[{i}]: alpha {float(m.alpha):g} not in (0, 1]")
        if not math.isfinite(m.strategy.threshold):
            errs.append(f"miner[{i}]: threshold must be finite")
    if cfg.ratio < 1:
        errs.append("ratio: must be >= 1")
    if (SIM_STRONG_TARGET * Fraction(cfg.ratio)).denominator != 1:
        errs.append("ratio: must be an integer or a dyadic fraction")
    if cfg.gamma < 0:
        errs.append("gamma: must be >= 0")
    if cfg.horizon < 1:
        errs.append("horizon: must be >= 1")
    if cfg.seeds < 1:
        errs.append("seeds: must be >= 1")
    if cfg.retarget_window < 1:
        errs.append("retarget_window: must be >= 1")
    if cfg.target_block_interval <= 0:
        errs.append("target_block_interval: must be > 0")
    if cfg.block_reward < 0:
        errs.append("block_reward: must be >= 0")
    return errs


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}
_SCALARS = {
    "name": str, "ratio": Fraction, "gamma": Fraction, "horizon": int, "seed": int, "seeds": int,
    "retarget_window": int, "target_block_interval": int, "block_reward": int,
    "latency_mean": float, "latency_shape": float, "latency": str, "selfish_withhold_weak": str,
    "selfish_lead": str,
}


def _miner(value: str, where: str, errs: list) -> MinerSpec | None:
    # "<alpha> [strategy] [key=value ...]"
    parts = value.split()
    if not parts:
        errs.append(f"{where}: empty miner entry")
        return None
    try:
        alpha = Fraction(parts[0])
    except (ValueError, ZeroDivisionError):
        errs.append(f"{where}: alpha {parts[0]!r} is not a number")
        return None
    kind = StrategyKind.HONEST
    opts = {}
    for p in parts[1:]:
        if "=" in p:
            k, _, v = p.partition("=")
            opts[k] = v
            continue
        try:
            kind = StrategyKind(p.lower())
        except ValueError:
            names = ", ".join(k.value for k in StrategyKind)
            errs.append(f"{where}: unknown strategy {p!r} (one of {names})")
            return None
    threshold = 1.0
    for k, v in opts.items():
        if k != "threshold" or kind is not StrategyKind.SPITEFUL:
            errs.append(f"{where}: option {k!r} not valid for strategy {kind.value}")
            continue
        try:
            threshold = float(v)
        except ValueError:
            errs.append(f"{where}: threshold {v!r} is not a number")
    return MinerSpec(alpha, StrategySpec(kind, threshold))


def parse_config(text: str, source: str = "<config>") -> SimConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment and ``miner`` may repeat."""
    errs = []
    values = {}
    miners = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            errs.append(f"{where}: expected 'key = value', got {line!r}")
            continue
        key, _, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if key == "miner":
            m = _miner(value, f"{where}: miner", errs)
            if m is not None:
                miners.append(m)
            continue
        if key not in _SCALARS:
            errs.append(f"{where}: unknown key {key!r}")
            continue
        if key in values:
            errs.append(f"{where}: duplicate key {key!r}")
            continue
        try:
            values[key] = _SCALARS[key](value)
        except (ValueError, ZeroDivisionError):
            errs.append(f"{where}: {key} = {value!r} is not a valid {_SCALARS[key].__name__}")
    kw = {}
    lat = {}
    for key, v in values.items():
        if key == "latency":
            try:
                lat["family"] = LatencyFamily(v.lower())
            except ValueError:
                errs.append(f"latency: unknown family {v!r} (constant or weibull)")
        elif key == "latency_mean":
            lat["mean"] = v
        elif key == "latency_shape":
            lat["shape"] = v
        elif key == "selfish_withhold_weak":
            if v.lower() not in _BOOL:
                errs.append(f"selfish_withhold_weak: {v!r} is not a boolean")
            else:
                kw[key] = _BOOL[v.lower()]
        elif key == "selfish_lead":
            try:
                kw[key] = SelfishLead(v.lower())
            except ValueError:
                errs.append(f"selfish_lead: unknown measure {v!r} (chain-pow or fork-value)")
        else:
            kw[key] = v
    try:
        kw["latency"] = LatencyModel(**lat)
    except ValueError as e:
        errs.append(f"latency: {e}")
    if errs:
        raise ConfigInvalid(errs)
    return SimConfig(miners=tuple(miners), **kw)


def load_config(path) -> SimConfig:
    with open(path) as f:
        return parse_config(f.read(), str(path))


def format_config(cfg: SimConfig) -> str:
    lines = [
        f"name = {cfg.name}",
        f"ratio = {cfg.ratio}",
        f"gamma = {cfg.gamma}",
        f"latency = {cfg.latency.family.value}",
        f"latency_mean = {cfg.latency.mean:g}",
        f"latency_shape = {cfg.latency.shape:g}",
        f"horizon = {cfg.horizon}",
        f"seed = {cfg.seed}",
        f"seeds = {cfg.seeds}",
        f"retarget_window = {cfg.retarget_window}",
        f"target_block_interval = {cfg.target_block_interval}",
        f"block_reward = {cfg.block_reward}",
        f"selfish_withhold_weak = {str(cfg.selfish_withhold_weak).lower()}",
        f"selfish_lead = {cfg.selfish_lead.value}",
    ]
    for m in cfg.miners:
        s = m.strategy
        extra = f" threshold={s.threshold:g}" if s.kind is StrategyKind.SPITEFUL else ""
        lines.append(f"miner = {m.alpha} {s.kind.value}{extra}")
    return "\n".join(lines) + "\n"
