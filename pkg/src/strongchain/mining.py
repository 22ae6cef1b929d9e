"""Block production: toy-difficulty hash grinding and the stochastic mining oracle."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .core.block import Block, HashClass, assemble_transactions, classify_hash, tx_root_for
from .core.header import BlockHeader
from .core.params import HASH_SPACE, ProtocolParams


@dataclass(frozen=True)
class MinerIdentity:
    address: bytes
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if len(self.address) != 20 or not 0 <= self.alpha <= 1:
            raise ValueError("address must be 20 bytes and alpha in [0, 1]")


class EventKind(Enum):
    STRONG = "strong"
    WEAK = "weak"


@dataclass(frozen=True)
class MiningEvent:
    time: float
    finder: MinerIdentity
    kind: EventKind
    parent: bytes | None = None


def check_shares(miners) -> None:
    if sum(m.alpha for m in miners) != 1:
        raise ValueError("hash shares must sum to 1")


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream identified by ``(seed, *key)``.

    Keys name the consumer (miner index, latency channel, ...), so adding a
    consumer does not shift any other stream.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *key])))


# ---------------------------------------------------------------------------
# hash grinding


class GrindStatus(Enum):
    STRONG = "strong"
    EXHAUSTED = "exhausted"


@dataclass
class BlockTemplate:
    prev_hash: bytes
    timestamp: int
    target_bits: int
    coinbase: bytes
    version: int = 1
    payload: tuple = ()
    weak_headers: list = field(default_factory=list)


@dataclass
class GrindResult:
    status: GrindStatus
    block: Block | None
    weak_found: list
    tried: int


def _header(t: BlockTemplate, tx_root: bytes, nonce: int, timestamp: int) -> BlockHeader:
    return BlockHeader(t.version, t.prev_hash, tx_root, timestamp, t.target_bits, nonce, t.coinbase)


def grind_block(template: BlockTemplate, params: ProtocolParams, nonce_budget: int,
                start_nonce: int = 0) -> GrindResult:
    """Try nonces until a strong header is found or ``nonce_budget`` is spent.

    Weak hits are compressed and appended to ``template.weak_headers``; the
    binding transaction and therefore the tx root are rebuilt after each one.
    When the 32-bit nonce wraps, the timestamp is bumped by one second.
    """
    ts, _ = params.targets_for_bits(template.target_bits)
    weak = template.weak_headers
    found = []
    timestamp = template.timestamp
    draft = _header(template, bytes(32), 0, timestamp)
    txs = assemble_transactions(weak, draft, template.payload)
    root = tx_root_for(txs)
    nonce = start_nonce
    for tried in range(1, nonce_budget + 1):
        hdr = _header(template, root, nonce, timestamp)
        cls = classify_hash(hdr.hash_int, params, ts)
        if cls is HashClass.STRONG:
            return GrindResult(GrindStatus.STRONG, Block(hdr, tuple(weak), txs), found, tried)
        if cls is HashClass.WEAK:
            w = hdr.compress()
            weak.append(w)
            found.append(w)
            txs = assemble_transactions(weak, draft, template.payload)
            root = tx_root_for(txs)
        nonce += 1
        if nonce > 0xFFFFFFFF:
            nonce = 0
            timestamp += 1
    return GrindResult(GrindStatus.EXHAUSTED, None, found, nonce_budget)


# ---------------------------------------------------------------------------
# stochastic oracle


def hash_rate_for_interval(params: ProtocolParams, interval: float | None = None) -> float:
    """Network hash rate eta giving one strong block per ``interval`` seconds on average."""
    interval = params.target_block_interval if interval is None else interval
    return HASH_SPACE / (params.strong_target * interval)


def next_event(rng: np.random.Generator, miners, params: ProtocolParams, eta: float,
               now: float = 0.0, parent: bytes | None = None) -> MiningEvent:
    """Next weak-or-better header found by the network after ``now``."""
    p_w = params.weak_target / HASH_SPACE
    rate = eta * p_w
    if rate <= 0:
        raise ValueError("eta * p_w must be positive")
    dt = rng.exponential(1.0 / rate)
    shares = np.array([float(m.alpha) for m in miners])
    finder = miners[int(rng.choice(len(miners), p=shares / shares.sum()))]
    strong = rng.random() < params.strong_target / params.weak_target
    return MiningEvent(now + dt, finder, EventKind.STRONG if strong else EventKind.WEAK, parent)


def event_stream(rng: np.random.Generator, miners, params: ProtocolParams, eta: float, n: int,
                 now: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``n`` consecutive :func:`next_event` draws as arrays ``(times, finder index, is_strong)``."""
    rate = eta * params.weak_target / HASH_SPACE
    if rate <= 0:
        raise ValueError("eta * p_w must be positive")
    times = now + np.cumsum(rng.exponential(1.0 / rate, size=n))
    shares = np.array([float(m.alpha) for m in miners])
    finders = rng.choice(len(miners), size=n, p=shares / shares.sum())
    strong = rng.random(n) < params.strong_target / params.weak_target
    return times, finders, strong


def weak_counts_between_strong(rng: np.random.Generator, miners, params: ProtocolParams,
                               eta: float, n_strong: int, batch: int = 1 << 22) -> np.ndarray:
    """Number of weak events preceding each of the next ``n_strong`` strong events."""
    out = []
    carry = 0
    have = 0
    while have < n_strong:
        _, _, strong = event_stream(rng, miners, params, eta, batch)
        pos = np.flatnonzero(strong)
        if pos.size == 0:
            carry += batch
            continue
        gaps = np.diff(pos, prepend=-1) - 1
        gaps[0] += carry
        out.append(gaps)
        have += pos.size
        carry = batch - 1 - pos[-1]
    return np.concatenate(out)[:n_strong]


def sample_weak_counts(rng: np.random.Generator, ratio, n: int) -> np.ndarray:
    """Geometric weak-per-strong counts drawn directly (mean ``ratio - 1``)."""
    return rng.geometric(1.0 / float(ratio), size=n) - 1


def weak_count_tail(ratio, n: int) -> float:
    """P(more than ``n`` weak headers precede a strong one), from the geometric law."""
    return (1 - 1 / float(ratio)) ** (n + 1)


# ---------------------------------------------------------------------------
# toy chains


class BudgetExhausted(RuntimeError):
    pass


def toy_params(strong_bits_of_work: int = 12, ratio=16, gamma=4, **kw) -> ProtocolParams:
    """Targets reachable by real grinding: about 2**strong_bits_of_work tries per block."""
    from .core.params import COIN
    kw.setdefault("retarget_window", 10_000)
    kw.setdefault("block_reward", 12 * COIN + COIN // 2)
    return ProtocolParams.from_ratio(2 ** (256 - strong_bits_of_work), ratio, max_target=HASH_SPACE,
                                     gamma=Fraction(gamma), **kw)


def mine_toy_chain(params: ProtocolParams, n: int, coinbase: bytes = b"\x11" * 20,
                   nonce_budget: int = 1 << 24, spacing: int = 600, start_nonce: int = 0):
    """Grind ``n`` blocks on top of genesis, adding each to a fresh ChainState.

    Returns ``(state, blocks)``; raises BudgetExhausted if a block needs more
    than ``nonce_budget`` tries.
    """
    from .core.chain import ChainState
    from .core.encoding import target_to_bits
    state = ChainState(params)
    blocks = []
    for i in range(n):
        tip = state.best_tip
        parent = state.entry(tip).block.header
        tmpl = BlockTemplate(tip, parent.timestamp + spacing, target_to_bits(state.expected_target(tip)),
                             coinbase)
        res = grind_block(tmpl, params, nonce_budget, start_nonce)
        if res.status is not GrindStatus.STRONG:
            raise BudgetExhausted(f"block {i + 1}: no strong header within {nonce_budget} nonces")
        verdict = state.add_block(res.block)
        if not verdict.ok:
            raise AssertionError(f"block {i + 1} failed validation: {verdict}")
        blocks.append(res.block)
    return state, blocks
