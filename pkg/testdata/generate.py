"""Regenerate the golden vectors: python3 testdata/generate.py"""

import json
from fractions import Fraction
from pathlib import Path

from strongchain.core import BlockHeader, ProtocolParams, payout_amounts, retarget, target_to_bits
from strongchain.core.jsonio import block_to_dict
from strongchain.mining import mine_toy_chain, toy_params

HERE = Path(__file__).parent


def headers():
    out = []
    for i, (ts, bits, nonce) in enumerate([(1231006505, 0x1D00FFFF, 2083236893),
                                           (1500000000, 0x1B0404CB, 0),
                                           (0xFFFFFFFF, 0x207FFFFF, 0xFFFFFFFF)]):
        h = BlockHeader(1 + i, bytes([i]) * 32, bytes([0xA0 + i]) * 32, ts, bits, nonce, bytes([0x11 * (i + 1)]) * 20)
        out.append({"version": h.version, "prev_hash": h.prev_hash.hex(), "tx_root": h.tx_root.hex(),
                    "timestamp": ts, "target_bits": bits, "nonce": nonce, "coinbase": h.coinbase.hex(),
                    "serialized": h.serialize().hex(), "digest": h.digest.hex(),
                    "weak": h.compress().serialize().hex()})
    return out


def compact():
    targets = [1, 0x7F, 0x80, 0xFFFF << 208, (0xFFFF << 208) + 1, 2 ** 255, 2 ** 256 - 1, 12345678901234567890]
    return [{"target": hex(t), "bits": target_to_bits(t)} for t in targets]


def rewards():
    out = []
    for ratio, gamma in [(1, 0), (2, 1), (64, 6), (1024, 10), (1024, 1023)]:
        p = ProtocolParams.from_ratio(0xFFFF << 208, ratio, gamma=Fraction(gamma))
        s, w = payout_amounts(p)
        out.append({"ratio": ratio, "gamma": gamma, "block_reward": p.block_reward, "strong": s, "weak": w})
    return out


def retargets():
    p = ProtocolParams.from_ratio(0xFFFF << 196, 1024)
    span = p.retarget_window * p.target_block_interval
    out = []
    for elapsed in (span, span // 2, span * 2, span // 10, span * 10, 1):
        ts, tw = retarget(0, elapsed, p.strong_target, p.weak_target, p)
        out.append({"elapsed": elapsed, "strong_target": hex(ts), "weak_target": hex(tw)})
    return {"old_strong_target": hex(p.strong_target), "old_weak_target": hex(p.weak_target),
            "window": p.retarget_window, "interval": p.target_block_interval, "cases": out}


def main():
    (HERE / "vectors.json").write_text(json.dumps(
        {"headers": headers(), "compact": compact(), "rewards": rewards(), "retarget": retargets()}, indent=1) + "\n")
    params = toy_params(12, 16, 4)
    _, blocks = mine_toy_chain(params, 5)
    (HERE / "toy_chain.json").write_text(json.dumps(
        {"strong_bits_of_work": 12, "ratio": 16, "gamma": 4, "blocks": [block_to_dict(b) for b in blocks]},
        indent=1) + "\n")


if __name__ == "__main__":
    main()
