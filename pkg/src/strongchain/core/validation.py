import statistics
from enum import Enum

from .block import (BINDING_MARKER, Block, DecompressionMismatch, HashClass, binding_commitment,
                    classify_hash, tx_root_for)
from .header import BlockHeader
from .params import ProtocolParams


class Verdict(Enum):
    ACCEPT = "accept"
    BAD_POW = "bad-pow"
    BAD_LINK = "bad-link"
    BAD_TARGET = "bad-target"
    BAD_VERSION = "bad-version"
    BAD_TIMESTAMP = "bad-timestamp"
    BINDING_MISMATCH = "binding-mismatch"
    MERKLE_MISMATCH = "merkle-mismatch"
    WEAK_HEADER_INVALID = "weak-header-invalid"
    DUPLICATE_WEAK = "duplicate-weak-header"
    PROOF_PATH_INVALID = "proof-path-invalid"

    @property
    def ok(self) -> bool:
        return self is Verdict.ACCEPT


def median_time_past(recent_timestamps, params: ProtocolParams) -> float | None:
    window = list(recent_timestamps)[-params.median_window:]
    if not window:
        return None
    return statistics.median(window)


def timestamp_ok(ts: int, mtp, now, params: ProtocolParams) -> bool:
    if mtp is not None and not ts > mtp:
        return False
    return now is None or ts <= now + params.max_future_drift


def check_header_fields(h: BlockHeader, params, expected_target, mtp, now) -> Verdict:
    """Version, target and timestamp checks shared by strong and weak headers."""
    if h.version != params.version:
        return Verdict.BAD_VERSION
    ts, _ = params.targets_for_bits(h.target_bits)
    if ts != expected_target:
        return Verdict.BAD_TARGET
    if not timestamp_ok(h.timestamp, mtp, now, params):
        return Verdict.BAD_TIMESTAMP
    return Verdict.ACCEPT


def check_weak_headers(strong: BlockHeader, weak_headers, params, expected_target, mtp, now) -> Verdict:
    seen = set()
    for w in weak_headers:
        full = w.decompress(strong)
        if classify_hash(full.hash_int, params, expected_target) is not HashClass.WEAK:
            return Verdict.WEAK_HEADER_INVALID
        if check_header_fields(full, params, expected_target, mtp, now) is not Verdict.ACCEPT:
            return Verdict.WEAK_HEADER_INVALID
        if full.digest in seen:
            return Verdict.DUPLICATE_WEAK
        seen.add(full.digest)
    return Verdict.ACCEPT


def validate_block(b: Block, parent: Block | BlockHeader | bytes, params: ProtocolParams,
                   now: int | None = None, recent_timestamps=(),
                   expected_target: int | None = None) -> Verdict:
    """Full-node validation of ``b`` on top of ``parent``.

    ``parent`` may be a block, a header or a raw digest.  ``recent_timestamps``
    are the strong-header timestamps of the chain ending at the parent;
    ``expected_target`` defaults to the genesis strong target.  The first
    failing check determines the verdict.
    """
    if expected_target is None:
        expected_target = params.strong_target
    h = b.header
    ts_hdr, _ = params.targets_for_bits(h.target_bits)
    if not h.hash_int < ts_hdr:
        return Verdict.BAD_POW
    parent_digest = parent if isinstance(parent, bytes) else parent.digest
    if h.prev_hash != parent_digest:
        return Verdict.BAD_LINK
    mtp = median_time_past(recent_timestamps, params)
    v = check_header_fields(h, params, expected_target, mtp, now)
    if not v.ok:
        return v
    if not b.transactions or b.transactions[0][:1] != BINDING_MARKER:
        return Verdict.BINDING_MISMATCH
    try:
        commitment = binding_commitment(b.weak_headers, h)
    except DecompressionMismatch:
        return Verdict.WEAK_HEADER_INVALID
    if b.transactions[0] != BINDING_MARKER + commitment:
        return Verdict.BINDING_MISMATCH
    if tx_root_for(b.transactions) != h.tx_root:
        return Verdict.MERKLE_MISMATCH
    return check_weak_headers(h, b.weak_headers, params, expected_target, mtp, now)
