from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .encoding import read_varint, sha256d, write_varint
from .header import HEADER_SIZE, WEAK_HEADER_SIZE, BlockHeader, CompressedWeakHeader
from .merkle import merkle_root
from .params import ProtocolParams

BINDING_MARKER = b"\x6a"  # OP_RETURN


class HashClass(Enum):
    STRONG = "strong"
    WEAK = "weak"
    NONE = "none"


class DecompressionMismatch(ValueError):
    """A weak header does not land in the weak band once decompressed."""


def classify_hash(h: int, params: ProtocolParams, strong_target: int | None = None) -> HashClass:
    ts = params.strong_target if strong_target is None else strong_target
    tw = params.weak_target_for(ts)
    if h < ts:
        return HashClass.STRONG
    if h < tw:
        return HashClass.WEAK
    return HashClass.NONE


def binding_commitment(weak_headers, strong_ctx: BlockHeader,
                       params: ProtocolParams | None = None) -> bytes:
    """Hash over the full decompressed weak headers, in list order.

    With ``params`` every header is also checked against the weak band of the
    strong header's window.
    """
    parts = []
    for w in weak_headers:
        full = w.decompress(strong_ctx)
        if params is not None:
            ts, _ = params.targets_for_bits(strong_ctx.target_bits)
            if classify_hash(full.hash_int, params, ts) is not HashClass.WEAK:
                raise DecompressionMismatch(f"weak header {full.digest[::-1].hex()} outside weak band")
        parts.append(full.serialize())
    return sha256d(b"".join(parts))


def binding_transaction(commitment: bytes) -> bytes:
    return BINDING_MARKER + commitment


def tx_hashes(transactions) -> list[bytes]:
    return [sha256d(tx) for tx in transactions]


@dataclass(frozen=True)
class Block:
    header: BlockHeader
    weak_headers: tuple[CompressedWeakHeader, ...] = ()
    transactions: tuple[bytes, ...] = field(default=())

    @property
    def digest(self) -> bytes:
        return self.header.digest

    def decompressed_weak(self) -> list[BlockHeader]:
        return [w.decompress(self.header) for w in self.weak_headers]

    def serialize(self) -> bytes:
        out = [self.header.serialize(), write_varint(len(self.weak_headers))]
        out += [w.serialize() for w in self.weak_headers]
        out.append(write_varint(len(self.transactions)))
        for tx in self.transactions:
            out.append(write_varint(len(tx)))
            out.append(tx)
        return b"".join(out)

    @classmethod
    def deserialize(cls, raw: bytes) -> "Block":
        header = BlockHeader.deserialize(raw[:HEADER_SIZE])
        n_weak, pos = read_varint(raw, HEADER_SIZE)
        weak = []
        for _ in range(n_weak):
            weak.append(CompressedWeakHeader.deserialize(raw[pos:pos + WEAK_HEADER_SIZE]))
            pos += WEAK_HEADER_SIZE
        n_tx, pos = read_varint(raw, pos)
        txs = []
        for _ in range(n_tx):
            size, pos = read_varint(raw, pos)
            if pos + size > len(raw):
                raise ValueError("truncated transaction")
            txs.append(raw[pos:pos + size])
            pos += size
        if pos != len(raw):
            raise ValueError("trailing bytes after block")
        return cls(header, tuple(weak), tuple(txs))


def assemble_transactions(weak_headers, strong_ctx: BlockHeader, payload=()) -> tuple[bytes, ...]:
    """Binding transaction first, then the opaque payload transactions."""
    return (binding_transaction(binding_commitment(weak_headers, strong_ctx)), *payload)


def block_pow(b: Block, params: ProtocolParams) -> Fraction:
    ts, tw = params.targets_for_bits(b.header.target_bits)
    return Fraction(params.max_target, ts) + len(b.weak_headers) * Fraction(params.max_target, tw)


def chain_pow(chain, params: ProtocolParams) -> Fraction:
    return sum((block_pow(b, params) for b in chain), Fraction(0))


def effective_timestamp(b: Block, params: ProtocolParams) -> Fraction:
    """Timestamp averaged over the strong header and its weak headers, weighted by PoW."""
    ts, tw = params.targets_for_bits(b.header.target_bits)
    w = Fraction(ts, tw)
    total = Fraction(b.header.timestamp) + w * sum(h.timestamp for h in b.weak_headers)
    return total / (1 + w * len(b.weak_headers))


def tx_root_for(transactions) -> bytes:
    return merkle_root(tx_hashes(transactions))
