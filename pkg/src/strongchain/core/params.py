from dataclasses import dataclass, field, replace
from fractions import Fraction

from .encoding import bits_to_target, target_to_bits

COIN = 100_000_000
DEFAULT_MAX_TARGET = 2 ** 224
HASH_SPACE = 2 ** 256


class ParamsError(ValueError):
    pass


def scaling_constant(ratio, gamma) -> Fraction:
    """Exact reward scaling constant for a weak/strong target ratio and weak-reward weight."""
    ratio = Fraction(ratio)
    gamma = Fraction(gamma)
    if ratio < 1:
        raise ValueError("ratio must be >= 1")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    return 1 / (1 + gamma * (ratio - 1) / ratio)


@dataclass(frozen=True)
class ProtocolParams:
    """Consensus constants.

    ``strong_target`` and ``weak_target`` are the targets in force at genesis;
    later windows keep ``weak_target / strong_target`` fixed.  ``block_reward``
    is in atomic units (``COIN`` per unit).
    """

    strong_target: int
    weak_target: int
    max_target: int = DEFAULT_MAX_TARGET
    gamma: Fraction = Fraction(0)
    block_reward: int = 1_250_000_000
    target_block_interval: int = 600
    retarget_window: int = 2016
    max_future_drift: int = 7200
    median_window: int = 11
    version: int = 1
    retarget_clamp: int = 4
    genesis_time: int = 1_500_000_000
    ratio: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if not 0 < self.strong_target <= self.weak_target <= HASH_SPACE:
            raise ParamsError("need 0 < strong_target <= weak_target <= 2**256")
        if self.strong_target > self.max_target:
            raise ParamsError("strong_target exceeds max_target")
        if self.gamma < 0:
            raise ParamsError("gamma must be non-negative")
        if self.retarget_window < 1 or self.target_block_interval <= 0:
            raise ParamsError("retarget_window >= 1 and target_block_interval > 0 required")
        if self.median_window < 1 or self.block_reward < 0:
            raise ParamsError("median_window >= 1 and block_reward >= 0 required")
        if bits_to_target(target_to_bits(self.strong_target)) != self.strong_target:
            raise ParamsError("strong_target is not representable in compact form")
        object.__setattr__(self, "ratio", Fraction(self.weak_target, self.strong_target))

    @classmethod
    def from_ratio(cls, strong_target: int, ratio, **kw) -> "ProtocolParams":
        weak = strong_target * Fraction(ratio)
        if weak.denominator != 1:
            raise ParamsError("strong_target * ratio must be an integer")
        return cls(strong_target=strong_target, weak_target=int(weak), **kw)

    @property
    def strong_bits(self) -> int:
        return target_to_bits(self.strong_target)

    @property
    def c(self) -> Fraction:
        return scaling_constant(self.ratio, self.gamma)

    def weak_target_for(self, strong_target: int) -> int:
        """Weak target paired with a (possibly retargeted) strong target."""
        return int(strong_target * self.ratio)

    def targets_for_bits(self, bits: int) -> tuple[int, int]:
        ts = bits_to_target(bits)
        return ts, self.weak_target_for(ts)

    def with_(self, **changes) -> "ProtocolParams":
        return replace(self, **changes)
