"""Light-client update verification.

A client holding a header chain receives ``(strong header, weak headers,
binding-transaction inclusion proof)`` for each new block.  After
verification it keeps only the strong header and the block's aggregated PoW.
"""

from dataclasses import dataclass
from fractions import Fraction

from .block import BINDING_MARKER, binding_commitment, tx_hashes
from .header import BlockHeader
from .merkle import MerkleProof, merkle_proof, root_from_proof
from .params import ProtocolParams
from .validation import Verdict, check_header_fields, check_weak_headers, median_time_past


@dataclass(frozen=True)
class SpvUpdate:
    header: BlockHeader
    weak_headers: tuple
    proof: MerkleProof


def make_spv_update(block) -> SpvUpdate:
    return SpvUpdate(block.header, tuple(block.weak_headers),
                     merkle_proof(tx_hashes(block.transactions), 0))


def spv_verify_update(strong: BlockHeader, weak, bt_proof: MerkleProof, params: ProtocolParams,
                      parent_digest: bytes, now: int | None = None, recent_timestamps=(),
                      expected_target: int | None = None) -> tuple[Verdict, Fraction | None]:
    """Return ``(verdict, block_pow)``; ``block_pow`` is None unless accepted."""
    if expected_target is None:
        expected_target = params.strong_target
    ts, tw = params.targets_for_bits(strong.target_bits)
    if not strong.hash_int < ts:
        return Verdict.BAD_POW, None
    if strong.prev_hash != parent_digest:
        return Verdict.BAD_LINK, None
    mtp = median_time_past(recent_timestamps, params)
    v = check_header_fields(strong, params, expected_target, mtp, now)
    if not v.ok:
        return v, None
    if bt_proof.index != 0:
        return Verdict.PROOF_PATH_INVALID, None
    leaf = tx_hashes([BINDING_MARKER + binding_commitment(weak, strong)])[0]
    if root_from_proof(leaf, bt_proof) != strong.tx_root:
        return Verdict.BINDING_MISMATCH, None
    v = check_weak_headers(strong, weak, params, expected_target, mtp, now)
    if not v.ok:
        return v, None
    return Verdict.ACCEPT, Fraction(params.max_target, ts) + len(weak) * Fraction(params.max_target, tw)


class SpvClient:
    """Header-only chain keeping ``(header, block_pow)`` per accepted update."""

    def __init__(self, params: ProtocolParams, genesis: BlockHeader):
        self.params = params
        self.headers = [genesis]
        self.pow = [Fraction(params.max_target, params.strong_target)]

    @property
    def chain_pow(self) -> Fraction:
        return sum(self.pow, Fraction(0))

    def apply(self, update: SpvUpdate, now: int | None = None,
              expected_target: int | None = None) -> Verdict:
        recent = [h.timestamp for h in self.headers[-self.params.median_window:]]
        v, pow_ = spv_verify_update(update.header, update.weak_headers, update.proof, self.params,
                                    self.headers[-1].digest, now, recent, expected_target)
        if v.ok:
            self.headers.append(update.header)
            self.pow.append(pow_)
        return v
