from dataclasses import dataclass
from fractions import Fraction

from .block import Block, HashClass, assemble_transactions, block_pow, classify_hash, tx_root_for
from .header import ZERO_HASH, BlockHeader
from .params import ProtocolParams
from .retarget import retarget
from .validation import Verdict, check_header_fields, median_time_past, validate_block

GENESIS_COINBASE = bytes(20)


def make_genesis(params: ProtocolParams) -> Block:
    """Fixed genesis: zero parent, configured target and timestamp, no weak headers."""
    draft = BlockHeader(params.version, ZERO_HASH, bytes(32), params.genesis_time,
                        params.strong_bits, 0, GENESIS_COINBASE)
    txs = assemble_transactions((), draft)
    header = BlockHeader(params.version, ZERO_HASH, tx_root_for(txs), params.genesis_time,
                         params.strong_bits, 0, GENESIS_COINBASE)
    return Block(header, (), txs)


@dataclass
class BlockEntry:
    block: Block
    height: int
    cumulative_pow: Fraction
    order: int
    strong_target: int


class ChainState:
    """Block tree of one node, with weak headers it has seen but not yet seen in a block.

    Not thread-safe; one writer at a time.
    """

    def __init__(self, params: ProtocolParams, genesis: Block | None = None):
        self.params = params
        genesis = genesis or make_genesis(params)
        self.genesis = genesis.digest
        self.blocks: dict[bytes, BlockEntry] = {
            genesis.digest: BlockEntry(genesis, 0, block_pow(genesis, params), 0, params.strong_target)
        }
        self.pending_weak: dict[bytes, dict[bytes, BlockHeader]] = {}
        self.included: set[bytes] = set()
        self.leaves: set[bytes] = {genesis.digest}
        self.best_tip = genesis.digest
        self._order = 1

    def __contains__(self, digest: bytes) -> bool:
        return digest in self.blocks

    def entry(self, digest: bytes) -> BlockEntry:
        return self.blocks[digest]

    def ancestors(self, digest: bytes):
        """Yield entries from ``digest`` back to genesis."""
        while True:
            e = self.blocks[digest]
            yield e
            if digest == self.genesis:
                return
            digest = e.block.header.prev_hash

    def chain(self, tip: bytes | None = None) -> list[Block]:
        return [e.block for e in reversed(list(self.ancestors(tip or self.best_tip)))]

    def recent_timestamps(self, digest: bytes) -> list[int]:
        out = []
        for e in self.ancestors(digest):
            out.append(e.block.header.timestamp)
            if len(out) == self.params.median_window:
                break
        return out[::-1]

    def expected_target(self, parent: bytes) -> int:
        """Strong target for a child of ``parent``."""
        p = self.params
        pe = self.blocks[parent]
        height = pe.height + 1
        if height % p.retarget_window:
            return pe.strong_target
        # window spans the retarget_window blocks ending at the parent
        first = pe
        for first in self.ancestors(parent):
            if first.height <= pe.height - p.retarget_window or first.height == 0:
                break
        old_ts = pe.strong_target
        new_ts, _ = retarget(first.block.header.timestamp, pe.block.header.timestamp,
                             old_ts, p.weak_target_for(old_ts), p)
        return new_ts

    def add_block(self, block: Block, now: int | None = None, validate: bool = True) -> Verdict:
        parent = block.header.prev_hash
        if parent not in self.blocks:
            return Verdict.BAD_LINK
        if block.digest in self.blocks:
            return Verdict.ACCEPT
        expected = self.expected_target(parent)
        if validate:
            v = validate_block(block, self.blocks[parent].block, self.params, now,
                               self.recent_timestamps(parent), expected)
            if not v.ok:
                return v
        pe = self.blocks[parent]
        self.blocks[block.digest] = BlockEntry(block, pe.height + 1,
                                               pe.cumulative_pow + block_pow(block, self.params),
                                               self._order, expected)
        self._order += 1
        self.leaves.discard(parent)
        self.leaves.add(block.digest)
        pend = self.pending_weak.get(parent, {})
        for w in block.decompressed_weak():
            self.included.add(w.digest)
            pend.pop(w.digest, None)
        self.best_tip = fork_choice(self, self.params)
        return Verdict.ACCEPT

    def add_weak_header(self, header: BlockHeader, now: int | None = None) -> bool:
        """Record a weak header received from the network; False if rejected or redundant."""
        parent = header.prev_hash
        if parent not in self.blocks or header.digest in self.included:
            return False
        expected = self.expected_target(parent)
        if classify_hash(header.hash_int, self.params, expected) is not HashClass.WEAK:
            return False
        mtp = median_time_past(self.recent_timestamps(parent), self.params)
        if not check_header_fields(header, self.params, expected, mtp, now).ok:
            return False
        pend = self.pending_weak.setdefault(parent, {})
        if header.digest in pend:
            return False
        pend[header.digest] = header
        self.best_tip = fork_choice(self, self.params)
        return True

    def pending_bonus(self, digest: bytes) -> Fraction:
        p = self.params
        return sum((Fraction(p.max_target, p.targets_for_bits(h.target_bits)[1])
                    for h in self.pending_weak.get(digest, {}).values()), Fraction(0))

    def weighted_pow(self, digest: bytes) -> Fraction:
        return self.blocks[digest].cumulative_pow + self.pending_bonus(digest)


def fork_choice(state: ChainState, params: ProtocolParams) -> bytes:
    """Best tip: maximum cumulative PoW plus pending weak-header bonus.

    The current best tip is retained on ties; otherwise the earliest-received
    block among the maxima wins.
    """
    # an interior block without pending headers is always outweighed by its child
    candidates = state.leaves | {d for d, pend in state.pending_weak.items() if pend}
    best, best_key = None, None
    for digest in candidates:
        key = (state.weighted_pow(digest), -state.blocks[digest].order)
        if best_key is None or key > best_key:
            best, best_key = digest, key
    current = state.best_tip
    if current in state.blocks and state.weighted_pow(current) == best_key[0]:
        return current
    return best
