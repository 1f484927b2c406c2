"""Denature-and-split partitioning and UMI tagging."""

from __future__ import annotations

import numpy as np

from .pad import PadInventory


def denature_split(pad: PadInventory, seed: int = 0):
    """Melt duplexes and assign each single strand to A or B fairly.

    Works on molecule counts: each of a row's copies goes to Alice with
    probability 1/2, so a 2-strand key lands (2,0)/(1,1)/(0,2) with
    probabilities 1/4, 1/2, 1/4.
    """
    rng = np.random.default_rng(seed)
    to_a = rng.binomial(pad.count, 0.5)
    to_b = pad.count - to_a
    pad_a = pad.take(np.flatnonzero(to_a > 0), to_a[to_a > 0])
    pad_b = pad.take(np.flatnonzero(to_b > 0), to_b[to_b > 0])
    pad_a.owner, pad_b.owner = "Alice", "Bob"
    return pad_a, pad_b


def umi_tag(pad: PadInventory, umi_len: int = 5, mis_tag_rate: float = 0.0,
            seed: int = 0) -> PadInventory:
    """Attach one uniform random (forward, reverse) UMI pair per strand.

    Rows are unfolded so every physical molecule carries its own tags.
    With probability ``mis_tag_rate`` a strand additionally spawns one
    extra lineage under a second distinct UMI pair, reproducing the
    multiplicities > 2 seen in uncompromised samples.
    """
    if pad.n_rows and np.any(pad.umi_f >= 0):
        raise ValueError("pad already tagged")
    if not (0.0 <= mis_tag_rate <= 1.0):
        raise ValueError("mis_tag_rate must be in [0, 1]")
    rng = np.random.default_rng(seed)
    rows = np.repeat(np.arange(pad.n_rows), pad.count)
    extra = rows[rng.random(rows.size) < mis_tag_rate]
    rows = np.concatenate([rows, extra])
    out = pad.take(rows, np.ones(rows.size, dtype=np.int64))
    space = 4 ** umi_len
    out.umi_f = rng.integers(0, space, rows.size, dtype=np.int32)
    out.umi_r = rng.integers(0, space, rows.size, dtype=np.int32)
    out.umi_len = umi_len
    return out
