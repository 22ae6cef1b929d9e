import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum

from .block import Block
from .params import ProtocolParams


class RewardKind(Enum):
    STRONG = "strong"
    WEAK = "weak"
    FEE = "fee"


@dataclass(frozen=True)
class Payout:
    address: bytes
    amount: int
    kind: RewardKind


def payout_amounts(params: ProtocolParams) -> tuple[int, int]:
    """(strong finder amount, per-weak-header amount) in atomic units, rounded down."""
    c = params.c
    strong = math.floor(c * params.block_reward)
    weak = math.floor(c * params.gamma * params.block_reward / params.ratio)
    return strong, weak


def compute_block_rewards(b: Block, fees: int, params: ProtocolParams) -> list[Payout]:
    strong, weak = payout_amounts(params)
    out = [Payout(b.header.coinbase, strong, RewardKind.STRONG)]
    if fees:
        out.append(Payout(b.header.coinbase, fees, RewardKind.FEE))
    out += [Payout(w.coinbase, weak, RewardKind.WEAK) for w in b.weak_headers]
    return out


@dataclass
class RewardLedger:
    totals: dict = field(default_factory=lambda: defaultdict(lambda: defaultdict(int)))
    records: list = field(default_factory=list)

    def credit(self, block_digest: bytes, payouts) -> None:
        payouts = list(payouts)
        for p in payouts:
            if p.amount < 0:
                raise ValueError("negative payout")
            self.totals[p.address][p.kind] += p.amount
        self.records.append((block_digest, payouts))

    def balance(self, address: bytes, kind: RewardKind | None = None) -> int:
        per_kind = self.totals.get(address, {})
        if kind is not None:
            return per_kind.get(kind, 0)
        return sum(per_kind.values())

    def minted(self) -> int:
        return sum(p.amount for _, ps in self.records for p in ps if p.kind is not RewardKind.FEE)
