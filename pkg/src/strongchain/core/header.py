import struct
from dataclasses import dataclass
from functools import cached_property

from .encoding import hash_to_int, sha256d

HEADER_SIZE = 100
WEAK_HEADER_SIZE = 60
ZERO_HASH = bytes(32)

_HEADER = struct.Struct("<I32s32sIII20s")
_WEAK = struct.Struct("<32sII20s")
assert _HEADER.size == HEADER_SIZE and _WEAK.size == WEAK_HEADER_SIZE


@dataclass(frozen=True)
class BlockHeader:
    """A 100-byte header: Bitcoin's 80-byte layout followed by a 20-byte coinbase."""

    version: int
    prev_hash: bytes
    tx_root: bytes
    timestamp: int
    target_bits: int
    nonce: int
    coinbase: bytes

    def __post_init__(self):
        if len(self.prev_hash) != 32 or len(self.tx_root) != 32:
            raise ValueError("prev_hash and tx_root must be 32 bytes")
        if len(self.coinbase) != 20:
            raise ValueError("coinbase must be 20 bytes")
        for name in ("version", "timestamp", "target_bits", "nonce"):
            if not 0 <= getattr(self, name) <= 0xFFFFFFFF:
                raise ValueError(f"{name} does not fit in 4 bytes")

    def serialize(self) -> bytes:
        return _HEADER.pack(self.version, self.prev_hash, self.tx_root, self.timestamp,
                            self.target_bits, self.nonce, self.coinbase)

    @classmethod
    def deserialize(cls, raw: bytes) -> "BlockHeader":
        if len(raw) != HEADER_SIZE:
            raise ValueError(f"header must be {HEADER_SIZE} bytes, got {len(raw)}")
        return cls(*_HEADER.unpack(raw))

    @cached_property
    def digest(self) -> bytes:
        return sha256d(self.serialize())

    @cached_property
    def hash_int(self) -> int:
        return hash_to_int(self.digest)

    def compress(self) -> "CompressedWeakHeader":
        return CompressedWeakHeader(self.tx_root, self.timestamp, self.nonce, self.coinbase)


@dataclass(frozen=True)
class CompressedWeakHeader:
    """A weak header stripped of the fields it shares with its block's strong header."""

    tx_root: bytes
    timestamp: int
    nonce: int
    coinbase: bytes

    def __post_init__(self):
        if len(self.tx_root) != 32 or len(self.coinbase) != 20:
            raise ValueError("tx_root must be 32 bytes and coinbase 20 bytes")
        if not (0 <= self.timestamp <= 0xFFFFFFFF and 0 <= self.nonce <= 0xFFFFFFFF):
            raise ValueError("timestamp and nonce must fit in 4 bytes")

    def serialize(self) -> bytes:
        return _WEAK.pack(self.tx_root, self.timestamp, self.nonce, self.coinbase)

    @classmethod
    def deserialize(cls, raw: bytes) -> "CompressedWeakHeader":
        if len(raw) != WEAK_HEADER_SIZE:
            raise ValueError(f"weak header must be {WEAK_HEADER_SIZE} bytes, got {len(raw)}")
        return cls(*_WEAK.unpack(raw))

    def decompress(self, strong: BlockHeader) -> BlockHeader:
        return BlockHeader(strong.version, strong.prev_hash, self.tx_root, self.timestamp,
                           strong.target_bits, self.nonce, self.coinbase)
