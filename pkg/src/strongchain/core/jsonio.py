"""JSON debug encoding: hex for byte fields, decimal integers elsewhere."""

import json

from .block import Block
from .header import BlockHeader, CompressedWeakHeader


def header_to_dict(h: BlockHeader) -> dict:
    return {
        "version": h.version, "prev_hash": h.prev_hash.hex(), "tx_root": h.tx_root.hex(),
        "timestamp": h.timestamp, "target_bits": h.target_bits, "nonce": h.nonce,
        "coinbase": h.coinbase.hex(),
    }


def header_from_dict(d: dict) -> BlockHeader:
    return BlockHeader(d["version"], bytes.fromhex(d["prev_hash"]), bytes.fromhex(d["tx_root"]),
                       d["timestamp"], d["target_bits"], d["nonce"], bytes.fromhex(d["coinbase"]))


def weak_to_dict(w: CompressedWeakHeader) -> dict:
    return {"tx_root": w.tx_root.hex(), "timestamp": w.timestamp, "nonce": w.nonce,
            "coinbase": w.coinbase.hex()}


def weak_from_dict(d: dict) -> CompressedWeakHeader:
    return CompressedWeakHeader(bytes.fromhex(d["tx_root"]), d["timestamp"], d["nonce"],
                                bytes.fromhex(d["coinbase"]))


def block_to_dict(b: Block) -> dict:
    return {
        "hash": b.digest.hex(),
        "header": header_to_dict(b.header),
        "weak_headers": [weak_to_dict(w) for w in b.weak_headers],
        "transactions": [tx.hex() for tx in b.transactions],
        "raw": b.serialize().hex(),
    }


def block_from_dict(d: dict) -> Block:
    return Block(header_from_dict(d["header"]),
                 tuple(weak_from_dict(w) for w in d["weak_headers"]),
                 tuple(bytes.fromhex(t) for t in d["transactions"]))


def dump_blocks(blocks, path) -> None:
    with open(path, "w") as f:
        json.dump([block_to_dict(b) for b in blocks], f, indent=1)
        f.write("\n")


def load_blocks(path) -> list[Block]:
    with open(path) as f:
        return [block_from_dict(d) for d in json.load(f)]
