from fractions import Fraction

import pytest

from strongchain.core import COIN, ChainState, ProtocolParams, make_genesis
from strongchain.core.encoding import target_to_bits
from strongchain.mining import BlockTemplate, GrindStatus, grind_block

ALICE = b"\xaa" * 20
BOB = b"\xbb" * 20


def toy_params(strong_bits_of_work=8, ratio=4, gamma=2, **kw) -> ProtocolParams:
    """Targets reachable by real grinding: about 2**strong_bits_of_work tries per block."""
    kw.setdefault("retarget_window", 10_000)
    return ProtocolParams.from_ratio(2 ** (256 - strong_bits_of_work), ratio, max_target=2 ** 256,
                                     gamma=Fraction(gamma), block_reward=12 * COIN + COIN // 2, **kw)


def mine_on(state: ChainState, parent: bytes, coinbase=ALICE, ts_offset=600, payload=(),
            start_nonce=0):
    p = state.params
    pe = state.entry(parent)
    tmpl = BlockTemplate(parent, pe.block.header.timestamp + ts_offset,
                         target_to_bits(state.expected_target(parent)), coinbase, payload=payload)
    res = grind_block(tmpl, p, 1 << 20, start_nonce)
    assert res.status is GrindStatus.STRONG
    return res.block


def mine_chain(params, n, coinbase=ALICE):
    state = ChainState(params)
    blocks = []
    for i in range(n):
        b = mine_on(state, state.best_tip, coinbase, start_nonce=1000 * i)
        assert state.add_block(b).ok
        blocks.append(b)
    return state, blocks


@pytest.fixture
def params():
    return toy_params()


@pytest.fixture(scope="session")
def toy_chain():
    p = toy_params()
    state, blocks = mine_chain(p, 6)
    return p, state, blocks


@pytest.fixture
def genesis(params):
    return make_genesis(params)
