"""Bitcoin-style Merkle tree over transaction hashes (odd levels duplicate the last node)."""

from dataclasses import dataclass

from .encoding import sha256d


@dataclass(frozen=True)
class MerkleProof:
    index: int
    siblings: tuple[bytes, ...]


def merkle_root(leaves: list[bytes]) -> bytes:
    if not leaves:
        return bytes(32)
    level = list(leaves)
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [sha256d(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def merkle_proof(leaves: list[bytes], index: int) -> MerkleProof:
    if not 0 <= index < len(leaves):
        raise IndexError("leaf index out of range")
    siblings = []
    level = list(leaves)
    i = index
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        siblings.append(level[i ^ 1])
        level = [sha256d(level[j] + level[j + 1]) for j in range(0, len(level), 2)]
        i //= 2
    return MerkleProof(index, tuple(siblings))


def root_from_proof(leaf: bytes, proof: MerkleProof) -> bytes:
    node = leaf
    i = proof.index
    for sib in proof.siblings:
        node = sha256d(sib + node) if i & 1 else sha256d(node + sib)
        i //= 2
    return node
