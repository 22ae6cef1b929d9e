import pytest
from hypothesis import given, strategies as st

from strongchain.core import (HEADER_SIZE, WEAK_HEADER_SIZE, Block, BlockHeader,
                              CompressedWeakHeader, bits_to_target, sha256d, target_to_bits)
from strongchain.core.encoding import normalize_target, read_varint, write_varint
from strongchain.core.merkle import MerkleProof, merkle_proof, merkle_root, root_from_proof

u32 = st.integers(0, 2 ** 32 - 1)
b32 = st.binary(min_size=32, max_size=32)
b20 = st.binary(min_size=20, max_size=20)
headers = st.builds(BlockHeader, u32, b32, b32, u32, u32, u32, b20)
weak_headers = st.builds(CompressedWeakHeader, b32, u32, u32, b20)


@given(headers)
def test_header_roundtrip(h):
    raw = h.serialize()
    assert len(raw) == HEADER_SIZE
    assert BlockHeader.deserialize(raw) == h


@given(weak_headers)
def test_weak_header_roundtrip(w):
    raw = w.serialize()
    assert len(raw) == WEAK_HEADER_SIZE
    assert CompressedWeakHeader.deserialize(raw) == w


@given(headers, weak_headers)
def test_decompress_inherits_strong_fields(h, w):
    full = w.decompress(h)
    assert (full.version, full.prev_hash, full.target_bits) == (h.version, h.prev_hash, h.target_bits)
    assert full.compress() == w


@given(headers, st.lists(weak_headers, max_size=5),
       st.lists(st.binary(max_size=300), max_size=5))
def test_block_roundtrip(h, weak, txs):
    b = Block(h, tuple(weak), tuple(txs))
    raw = b.serialize()
    assert Block.deserialize(raw) == b
    assert len(raw) >= HEADER_SIZE + WEAK_HEADER_SIZE * len(weak) + 2


def test_block_rejects_trailing_bytes():
    h = BlockHeader(1, bytes(32), bytes(32), 0, 0, 0, bytes(20))
    with pytest.raises(ValueError):
        Block.deserialize(Block(h).serialize() + b"\x00")


def test_header_field_order_matches_bitcoin_prefix():
    # the first 80 bytes are a plain Bitcoin header
    h = BlockHeader(2, b"\x11" * 32, b"\x22" * 32, 0x01020304, 0x1d00ffff, 7, b"\x33" * 20)
    raw = h.serialize()
    assert raw[:4] == (2).to_bytes(4, "little")
    assert raw[4:36] == b"\x11" * 32 and raw[36:68] == b"\x22" * 32
    assert raw[72:76] == bytes.fromhex("ffff001d")
    assert raw[80:] == b"\x33" * 20


def test_sha256d_known_vector():
    # Bitcoin genesis header hash
    raw = bytes.fromhex(
        "01000000" + "00" * 32
        + "3ba3edfd7a7b12b27ac72c3e67768f617fc81bc3888a51323a9fb8aa4b1e5e4a"
        + "29ab5f49" + "ffff001d" + "1dac2b7c")
    assert sha256d(raw)[::-1].hex() == "000000000019d6689c085ae165831e934ff763ae46a2a6c172b3f1b60a8ce26f"


@pytest.mark.parametrize("bits,target", [
    (0x1d00ffff, 0xffff * 2 ** 208),
    (0x1b0404cb, 0x0404cb * 2 ** (8 * (0x1b - 3))),
    (0x03123456, 0x123456),
    (0x01120000, 0x12),
])
def test_compact_bits(bits, target):
    assert bits_to_target(bits) == target
    assert target_to_bits(target) == bits


def test_compact_sign_bit_rejected():
    with pytest.raises(ValueError):
        bits_to_target(0x04923456)


@given(st.integers(1, 2 ** 256))
def test_normalize_target_rounds_down_and_is_fixed_point(t):
    n = normalize_target(t)
    assert n <= t and normalize_target(n) == n
    assert bits_to_target(target_to_bits(n)) == n


@given(st.integers(0, 2 ** 64 - 1))
def test_varint_roundtrip(n):
    raw = write_varint(n)
    assert read_varint(raw + b"xyz") == (n, len(raw))


def test_merkle_odd_level_duplicates_last():
    a, b, c = (sha256d(bytes([i])) for i in range(3))
    assert merkle_root([a, b, c]) == sha256d(sha256d(a + b) + sha256d(c + c))
    assert merkle_root([a]) == a
    assert merkle_root([]) == bytes(32)


@given(st.lists(st.binary(min_size=32, max_size=32), min_size=1, max_size=17), st.data())
def test_merkle_proof_roundtrip(leaves, data):
    i = data.draw(st.integers(0, len(leaves) - 1))
    proof = merkle_proof(leaves, i)
    assert root_from_proof(leaves[i], proof) == merkle_root(leaves)
    if len(leaves) > 1:
        wrong = MerkleProof(proof.index ^ 1, proof.siblings)
        if leaves[i] != leaves[i ^ 1 if (i ^ 1) < len(leaves) else i]:
            assert root_from_proof(leaves[i], wrong) != merkle_root(leaves)
