"""Golden vectors in testdata/, checked against hashlib/struct and exact arithmetic."""

import hashlib
import json
import struct
from fractions import Fraction
from pathlib import Path

import pytest

from strongchain.core import (BlockHeader, ChainState, ProtocolParams, SpvClient, bits_to_target, block_pow,
                              make_genesis, make_spv_update, payout_amounts, retarget, target_to_bits)
from strongchain.core.header import CompressedWeakHeader
from strongchain.core.jsonio import block_from_dict, block_to_dict
from strongchain.mining import toy_params

DATA = Path(__file__).resolve().parent.parent / "testdata"
VEC = json.loads((DATA / "vectors.json").read_text())
CHAIN = json.loads((DATA / "toy_chain.json").read_text())


@pytest.mark.parametrize("v", VEC["headers"], ids=lambda v: str(v["version"]))
def test_header_vector(v):
    raw = struct.pack("<I", v["version"]) + bytes.fromhex(v["prev_hash"]) + bytes.fromhex(v["tx_root"]) \
        + struct.pack("<III", v["timestamp"], v["target_bits"], v["nonce"]) + bytes.fromhex(v["coinbase"])
    assert raw.hex() == v["serialized"] and len(raw) == 100
    assert hashlib.sha256(hashlib.sha256(raw).digest()).hexdigest() == v["digest"]
    h = BlockHeader.deserialize(raw)
    assert h.serialize() == raw and h.digest.hex() == v["digest"]
    # weak form drops version, prev hash and bits
    weak = raw[36:68] + raw[68:72] + raw[76:80] + raw[80:]
    assert weak.hex() == v["weak"] and len(weak) == 60
    assert CompressedWeakHeader.deserialize(weak) == h.compress()


def _compact_oracle(bits):
    exp, mant = bits >> 24, bits & 0x7FFFFF
    return mant >> 8 * (3 - exp) if exp <= 3 else mant << 8 * (exp - 3)


@pytest.mark.parametrize("v", VEC["compact"], ids=lambda v: v["target"])
def test_compact_vector(v):
    t = int(v["target"], 16)
    assert target_to_bits(t) == v["bits"]
    back = _compact_oracle(v["bits"])
    assert bits_to_target(v["bits"]) == back <= t
    # rounded down to the 3-byte mantissa: nothing encodable lies in (back, t]
    assert t - back < 1 << max(0, 8 * ((v["bits"] >> 24) - 3))


@pytest.mark.parametrize("v", VEC["rewards"], ids=lambda v: f'{v["ratio"]}-{v["gamma"]}')
def test_reward_vector(v):
    r, g, R = v["ratio"], Fraction(v["gamma"]), v["block_reward"]
    c = 1 / (1 + g * Fraction(r - 1, r))
    assert (v["strong"], v["weak"]) == (int(c * R), int(c * g * R / r))
    p = ProtocolParams.from_ratio(0xFFFF << 208, r, gamma=g, block_reward=R)
    assert payout_amounts(p) == (v["strong"], v["weak"])
    # expected issuance per block is R up to rounding
    assert R - r <= v["strong"] + (r - 1) * v["weak"] <= R


def test_retarget_vectors():
    d = VEC["retarget"]
    p = ProtocolParams.from_ratio(int(d["old_strong_target"], 16), 1024)
    ts0, tw0 = int(d["old_strong_target"], 16), int(d["old_weak_target"], 16)
    span = d["window"] * d["interval"]
    for case in d["cases"]:
        ts, tw = retarget(0, case["elapsed"], ts0, tw0, p)
        assert (hex(ts), hex(tw)) == (case["strong_target"], case["weak_target"])
        k = min(max(Fraction(case["elapsed"], span), Fraction(1, 4)), Fraction(4))
        assert ts <= ts0 * k and ts >= ts0 * k * (1 - Fraction(1, 1 << 15))
        assert tw * ts0 == ts * tw0


def test_toy_chain_replays():
    p = toy_params(CHAIN["strong_bits_of_work"], CHAIN["ratio"], CHAIN["gamma"])
    blocks = [block_from_dict(d) for d in CHAIN["blocks"]]
    assert [block_to_dict(b) for b in blocks] == CHAIN["blocks"]
    state = ChainState(p)
    for b in blocks:
        assert state.add_block(b).ok
    assert state.best_tip == blocks[-1].digest
    spv = SpvClient(p, make_genesis(p).header)
    for b in blocks:
        assert spv.apply(make_spv_update(b)).ok
    assert spv.chain_pow == state.entry(state.best_tip).cumulative_pow
    assert spv.chain_pow - spv.pow[0] == sum(block_pow(b, p) for b in blocks)


def test_toy_chain_tamper_rejected():
    p = toy_params(CHAIN["strong_bits_of_work"], CHAIN["ratio"], CHAIN["gamma"])
    d = json.loads(json.dumps(CHAIN["blocks"][0]))
    d["header"]["nonce"] ^= 1
    state = ChainState(p)
    assert not state.add_block(block_from_dict(d)).ok
