import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class LatencyFamily(Enum):
    CONSTANT = "constant"
    WEIBULL = "weibull"


@dataclass(frozen=True)
class LatencyModel:
    """Per-recipient message delay.  Weibull delays are parametrized by their mean."""

    family: LatencyFamily = LatencyFamily.WEIBULL
    mean: float = 0.0
    shape: float = 0.6

    def __post_init__(self):
        if not (self.mean >= 0 and math.isfinite(self.mean)):
            raise ValueError("latency mean must be finite and >= 0")
        if self.family is LatencyFamily.WEIBULL and not self.shape > 0:
            raise ValueError("weibull shape must be > 0")

    @property
    def scale(self) -> float:
        if self.family is LatencyFamily.CONSTANT:
            return self.mean
        return self.mean / math.gamma(1 + 1 / self.shape)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.mean == 0:
            return np.zeros(size)
        if self.family is LatencyFamily.CONSTANT:
            return np.full(size, float(self.mean))
        # inverse-transform Weibull: E**(1/k) with E standard exponential
        return self.scale * rng.standard_exponential(size) ** (1 / self.shape)


# Mean delays of the low / medium / high network settings
LOW, MEDIUM, HIGH = 0.53, 5.3, 53.0
