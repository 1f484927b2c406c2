"""Pool synthesis, key assembly and bottleneck sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bias import SynthesisBias
from .pad import DIRECT, REVCOMP, PadInventory, empty_pad


@dataclass
class StrandPool:
    """Synthesized single strands: random content only, one row each."""
    content: np.ndarray          # (count, L) uint8

    @property
    def size(self) -> int:
        return self.content.shape[0]


@dataclass
class KeySet:
    """Assembled dsDNA keys; each key is a direct + revcomp strand pair."""
    content: np.ndarray          # (n_keys, 2L) uint8

    @property
    def n_keys(self) -> int:
        return self.content.shape[0]

    def to_pad(self, owner: str, rng_seed: int = 0) -> PadInventory:
        """Two molecules per key: the direct and revcomp strands."""
        n = self.n_keys
        pad = empty_pad(owner, self.content, rng_seed)
        pad.key_id = np.repeat(np.arange(n, dtype=np.int64), 2)
        pad.strand = np.tile(np.array([DIRECT, REVCOMP], dtype=np.uint8), n)
        pad.variant = np.full(2 * n, -1, dtype=np.int64)
        pad.lineage = np.zeros(2 * n, dtype=np.int16)
        pad.umi_f = np.full(2 * n, -1, dtype=np.int32)
        pad.umi_r = np.full(2 * n, -1, dtype=np.int32)
        pad.count = np.ones(2 * n, dtype=np.int64)
        return pad


def synthesize_pool(template, bias: SynthesisBias, count: int,
                    seed: int) -> StrandPool:
    """Synthesize ``count`` single strands of one half-key pool."""
    if count < 1:
        raise ValueError("count must be >= 1")
    L = template.blocks_per_strand * template.block_len
    if bias.length != L:
        raise ValueError(f"bias length {bias.length} != strand length {L}")
    rng = np.random.default_rng(seed)
    return StrandPool(content=bias.sample(count, rng))


def assemble_keys(index_pool: StrandPool, payload_pool: StrandPool,
                  n_keys: int, seed: int) -> KeySet:
    """Random index-payload pairing without replacement."""
    if index_pool.size == 0 or payload_pool.size == 0:
        raise ValueError("pools must be non-empty")
    if n_keys > min(index_pool.size, payload_pool.size):
        raise ValueError("n_keys exceeds pool size")
    rng = np.random.default_rng(seed)
    i_pick = rng.choice(index_pool.size, size=n_keys, replace=False)
    p_pick = rng.choice(payload_pool.size, size=n_keys, replace=False)
    content = np.hstack([index_pool.content[i_pick],
                         payload_pool.content[p_pick]])
    return KeySet(content=content)


def bottleneck(pad: PadInventory, target_diversity: int = None,
               lam: float = None, seed: int = 0,
               mode: str = "uniform") -> PadInventory:
    """Aliquot sampling of a pad.

    ``uniform``: keep all molecules of exactly ``target_diversity``
    uniformly chosen keys.  ``poisson``: per-molecule copy count drawn
    Poisson(lam); with single-copy input the expected unique-key
    fraction is 1 - exp(-lam) per strand.
    """
    rng = np.random.default_rng(seed)
    if mode == "uniform":
        keys = np.unique(pad.key_id)
        if target_diversity is None or target_diversity > keys.size:
            raise ValueError("target_diversity exceeds pool diversity")
        if target_diversity == keys.size:
            return pad.take(np.arange(pad.n_rows))
        chosen = rng.choice(keys, size=target_diversity, replace=False)
        mask = np.isin(pad.key_id, chosen)
        return pad.take(np.flatnonzero(mask))
    if mode == "poisson":
        if lam is None:
            raise ValueError("poisson mode needs lam")
        counts = rng.poisson(lam * pad.count)
        keep = counts > 0
        return pad.take(np.flatnonzero(keep), counts[keep])
    raise ValueError(f"unknown bottleneck mode {mode!r}")
