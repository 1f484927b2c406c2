"""Key layout: block/spacer architecture of the DNA keys.

A full double-stranded key carries ``2 * blocks_per_strand`` random
blocks (default 28 blocks of 5 nt), separated by fixed 6-nt spacers and
framed by fixed flanks.  Block numbering is 1-based over the full key:
the default layout reserves blocks 1-7 for error estimation, blocks
9-14 as the index (30 nt, indexing capacity 4^30) and blocks 15-28 as
the payload.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import seq


def _default_fixed_sequences():
    # Fixed constants of the artifact: spacers and flanks are arbitrary
    # but must be identical on both sides, so they are generated from a
    # pinned seed rather than hardcoded as 200 characters of literals.
    rng = np.random.default_rng(20240917)
    spacers = ["".join("ACGT"[b] for b in rng.integers(0, 4, 6)) for _ in range(27)]
    flank_f = "".join("ACGT"[b] for b in rng.integers(0, 4, 20))
    flank_r = "".join("ACGT"[b] for b in rng.integers(0, 4, 20))
    return spacers, (flank_f, flank_r)


_DEFAULT_SPACERS, _DEFAULT_FLANKS = _default_fixed_sequences()


@dataclass(frozen=True)
class KeyTemplate:
    blocks_per_strand: int = 14
    block_len: int = 5
    spacer_seqs: tuple = tuple(_DEFAULT_SPACERS)
    fixed_flanks: tuple = _DEFAULT_FLANKS
    # 1-based inclusive block ranges over the full 2*blocks_per_strand blocks
    index_block_range: tuple = (9, 14)
    payload_block_range: tuple = (15, 28)
    error_est_block_range: tuple = (1, 7)

    def __post_init__(self):
        if self.block_len < 1:
            raise ValueError("block_len must be >= 1")
        n = self.n_blocks
        if len(self.spacer_seqs) != n - 1:
            raise ValueError(f"need {n - 1} spacers, got {len(self.spacer_seqs)}")
        ranges = [self.index_block_range, self.payload_block_range, self.error_est_block_range]
        used = set()
        for lo, hi in ranges:
            if not (1 <= lo <= hi <= n):
                raise ValueError(f"block range ({lo},{hi}) outside 1..{n}")
            blocks = set(range(lo, hi + 1))
            if blocks & used:
                raise ValueError("index/payload/error block ranges overlap")
            used |= blocks

    @property
    def n_blocks(self) -> int:
        return 2 * self.blocks_per_strand

    @property
    def random_positions_per_key(self) -> int:
        return self.n_blocks * self.block_len

    @property
    def total_length(self) -> int:
        return (len(self.fixed_flanks[0]) + len(self.fixed_flanks[1])
                + self.n_blocks * self.block_len
                + sum(len(s) for s in self.spacer_seqs))

    def block_offsets(self) -> np.ndarray:
        """Start offset of each random block within the full key sequence."""
        offs = np.empty(self.n_blocks, dtype=np.int64)
        pos = len(self.fixed_flanks[0])
        for i in range(self.n_blocks):
            offs[i] = pos
            pos += self.block_len
            if i < self.n_blocks - 1:
                pos += len(self.spacer_seqs[i])
        return offs

    def reference(self) -> np.ndarray:
        """Full-length reference with N at the random positions."""
        out = np.empty(self.total_length, dtype=np.uint8)
        out[:] = seq.N
        f0 = seq.encode(self.fixed_flanks[0])
        out[:f0.size] = f0
        pos = f0.size
        for i in range(self.n_blocks):
            pos += self.block_len  # leave N block
            if i < self.n_blocks - 1:
                sp = seq.encode(self.spacer_seqs[i])
                out[pos:pos + sp.size] = sp
                pos += sp.size
        f1 = seq.encode(self.fixed_flanks[1])
        out[pos:pos + f1.size] = f1
        return out

    def blocks_in_range(self, block_range) -> np.ndarray:
        """0-based block indices for a 1-based inclusive range."""
        lo, hi = block_range
        return np.arange(lo - 1, hi)

    def random_slice_of_blocks(self, block_range) -> np.ndarray:
        """Positions within the concatenated random region (block-major)."""
        idx = self.blocks_in_range(block_range)
        return (idx[:, None] * self.block_len + np.arange(self.block_len)[None, :]).ravel()

    def content_positions(self) -> np.ndarray:
        """Positions of the random content within the full key sequence."""
        offs = self.block_offsets()
        return (offs[:, None] + np.arange(self.block_len)[None, :]).ravel()

    def assemble(self, content: np.ndarray) -> np.ndarray:
        """Full key sequences (rows) from random-content rows."""
        content = np.atleast_2d(np.asarray(content, dtype=np.uint8))
        if content.shape[1] != self.random_positions_per_key:
            raise ValueError("content width does not match the template")
        out = np.tile(self.reference(), (content.shape[0], 1))
        out[:, self.content_positions()] = content
        return out

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.blocks_per_strand, self.block_len, self.spacer_seqs,
                       self.fixed_flanks, self.index_block_range,
                       self.payload_block_range, self.error_est_block_range)).encode())
        return h.hexdigest()


DEFAULT_TEMPLATE = KeyTemplate()
