"""Hashing, compact target encoding and varints shared by the wire formats."""

import hashlib

__all__ = (
    "sha256d", "hash_to_int", "bits_to_target", "target_to_bits", "normalize_target",
    "write_varint", "read_varint",
)


def sha256d(data: bytes) -> bytes:
    return hashlib.sha256(hashlib.sha256(data).digest()).digest()


def hash_to_int(digest: bytes) -> int:
    # Bitcoin convention: the digest is a little-endian 256-bit number.
    return int.from_bytes(digest, "little")


def bits_to_target(bits: int) -> int:
    if not 0 <= bits <= 0xFFFFFFFF:
        raise ValueError(f"bits value 0x{bits:x} out of range")
    word = bits & 0x007FFFFF
    if bits & 0x00800000:
        raise ValueError(f"bits value 0x{bits:x} is negative")
    size = bits >> 24
    if size <= 3:
        return word >> (8 * (3 - size))
    return word << (8 * (size - 3))


def target_to_bits(target: int) -> int:
    """Encode ``target`` in compact form, truncating to three significant bytes."""
    if target < 0 or target.bit_length() > 264:
        raise ValueError(f"target 0x{target:x} out of range")
    size = (target.bit_length() + 7) // 8
    if size <= 3:
        word = target << (8 * (3 - size))
    else:
        word = target >> (8 * (size - 3))
    if word & 0x00800000:
        word >>= 8
        size += 1
    return (size << 24) | word


def normalize_target(target: int) -> int:
    """Round ``target`` down to the nearest compact-representable value."""
    return bits_to_target(target_to_bits(target))


def write_varint(n: int) -> bytes:
    if n < 0:
        raise ValueError("varint must be non-negative")
    if n < 0xFD:
        return bytes([n])
    if n <= 0xFFFF:
        return b"\xfd" + n.to_bytes(2, "little")
    if n <= 0xFFFFFFFF:
        return b"\xfe" + n.to_bytes(4, "little")
    return b"\xff" + n.to_bytes(8, "little")


def read_varint(buf: bytes, offset: int = 0) -> tuple[int, int]:
    """Return ``(value, new_offset)``."""
    first = buf[offset]
    if first < 0xFD:
        return first, offset + 1
    width = {0xFD: 2, 0xFE: 4, 0xFF: 8}[first]
    end = offset + 1 + width
    if end > len(buf):
        raise ValueError("truncated varint")
    return int.from_bytes(buf[offset + 1:end], "little"), end
