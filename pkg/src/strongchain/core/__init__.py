"""Protocol rules: headers, blocks, validation, fork choice, rewards, timestamps, SPV."""

from .block import (Block, DecompressionMismatch, HashClass, assemble_transactions,
                    binding_commitment, binding_transaction, block_pow, chain_pow, classify_hash,
                    effective_timestamp, tx_root_for)
from .chain import ChainState, fork_choice, make_genesis
from .encoding import bits_to_target, hash_to_int, sha256d, target_to_bits
from .header import HEADER_SIZE, WEAK_HEADER_SIZE, BlockHeader, CompressedWeakHeader
from .merkle import MerkleProof, merkle_proof, merkle_root, root_from_proof
from .params import COIN, ParamsError, ProtocolParams, scaling_constant
from .retarget import NonPositiveElapsed, retarget
from .rewards import Payout, RewardKind, RewardLedger, compute_block_rewards, payout_amounts
from .spv import SpvClient, SpvUpdate, make_spv_update, spv_verify_update
from .validation import Verdict, validate_block
