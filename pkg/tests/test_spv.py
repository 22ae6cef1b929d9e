import pytest
from hypothesis import given, settings, strategies as st

from strongchain.core import (Block, ChainState, SpvClient, Verdict, block_pow, make_spv_update,
                              spv_verify_update, validate_block)
from strongchain.core.header import CompressedWeakHeader
from strongchain.core.merkle import MerkleProof

from conftest import mine_chain, toy_params


def _parts(state, b):
    parent = b.header.prev_hash
    return dict(parent_digest=parent, recent_timestamps=state.recent_timestamps(parent))


def test_honest_update_matches_full_node(toy_chain):
    p, state, blocks = toy_chain
    for b in blocks:
        u = make_spv_update(b)
        v, pw = spv_verify_update(u.header, u.weak_headers, u.proof, p, **_parts(state, b))
        assert v is Verdict.ACCEPT and pw == block_pow(b, p)


def test_dropped_weak_header_is_binding_mismatch(toy_chain):
    p, state, blocks = toy_chain
    b = next(b for b in blocks if b.weak_headers)
    u = make_spv_update(b)
    v, pw = spv_verify_update(u.header, u.weak_headers[1:], u.proof, p, **_parts(state, b))
    assert v is Verdict.BINDING_MISMATCH and pw is None


def test_non_first_leaf_proof_rejected(toy_chain):
    p, state, blocks = toy_chain
    b = blocks[0]
    u = make_spv_update(b)
    bad = MerkleProof(1, u.proof.siblings)
    assert spv_verify_update(u.header, u.weak_headers, bad, p, **_parts(state, b))[0] \
        is Verdict.PROOF_PATH_INVALID


def test_spv_client_tracks_chain_pow(toy_chain):
    p, state, blocks = toy_chain
    client = SpvClient(p, state.entry(state.genesis).block.header)
    for b in blocks:
        assert client.apply(make_spv_update(b)).ok
    assert client.chain_pow == state.entry(state.best_tip).cumulative_pow


@pytest.fixture(scope="module")
def payload_chain():
    return mine_chain(toy_params(), 8)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_spv_and_full_node_agree_under_mutation(payload_chain, data):
    state, blocks = payload_chain
    p = state.params
    b = data.draw(st.sampled_from(blocks))
    kind = data.draw(st.sampled_from(["none", "drop", "swap", "dup", "flip", "parent"]))
    weak = list(b.weak_headers)
    parent = b.header.prev_hash
    if kind == "drop" and weak:
        weak.pop(data.draw(st.integers(0, len(weak) - 1)))
    elif kind == "swap" and len(weak) > 1:
        weak[0], weak[1] = weak[1], weak[0]
    elif kind == "dup" and weak:
        weak.append(weak[0])
    elif kind == "flip" and weak:
        i = data.draw(st.integers(0, len(weak) - 1))
        raw = bytearray(weak[i].serialize())
        bit = data.draw(st.integers(0, 479))
        raw[bit // 8] ^= 1 << (bit % 8)
        weak[i] = CompressedWeakHeader.deserialize(bytes(raw))
    elif kind == "parent":
        parent = bytes(32)
    mutated = Block(b.header, tuple(weak), b.transactions)
    recent = state.recent_timestamps(b.header.prev_hash)
    full = validate_block(mutated, parent, p, None, recent)
    u = make_spv_update(b)
    v, pw = spv_verify_update(b.header, tuple(weak), u.proof, p, parent, None, recent)
    assert v.ok == full.ok
    if v.ok:
        assert pw == block_pow(mutated, p)
