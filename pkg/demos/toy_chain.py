"""Grind a few real blocks, validate them, dump JSON and follow them with a light client."""

import tempfile
from pathlib import Path

from strongchain.core import COIN, SpvClient, block_pow, compute_block_rewards, make_genesis, make_spv_update
from strongchain.core.jsonio import dump_blocks, load_blocks
from strongchain.mining import mine_toy_chain, toy_params

params = toy_params(strong_bits_of_work=12, ratio=16, gamma=4)
state, blocks = mine_toy_chain(params, 4)

for h, b in enumerate(blocks, 1):
    pays = compute_block_rewards(b, 0, params)
    print(f"height {h}: {len(b.weak_headers):2d} weak headers, pow {float(block_pow(b, params)):.3f}, "
          f"paid {sum(p.amount for p in pays) / COIN:.8f}")

# round trip through JSON
path = Path(tempfile.mkdtemp()) / "chain.json"
dump_blocks(blocks, path)
assert load_blocks(path) == blocks

# light client sees headers, weak headers and one inclusion proof per block
spv = SpvClient(params, make_genesis(params).header)
for b in blocks:
    assert spv.apply(make_spv_update(b)).ok
full = state.entry(state.best_tip).cumulative_pow
print(f"spv chain pow {float(spv.chain_pow):.3f}, full node {float(full):.3f}")
