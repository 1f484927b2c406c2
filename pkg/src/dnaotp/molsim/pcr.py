"""Branching-process PCR with rare per-base copy errors.

Copies fold into their source row's count; the small fraction of copies
that acquire substitution errors spawn new variant rows so their
sequences stay distinct.  Copy errors hit only the random positions —
errors in fixed spacers/flanks would merely dent alignment scores
without affecting key identity, so they are not modeled.
"""

from __future__ import annotations

import numpy as np

from .pad import PadInventory


def pcr_amplify(pad: PadInventory, cycles: int, efficiency: float = 0.95,
                err_rate: float = 1e-6, seed: int = 0) -> PadInventory:
    """Amplify every molecule; returns a new pad, input untouched."""
    if cycles < 0:
        raise ValueError("cycles must be >= 0")
    if not (0.0 <= efficiency <= 1.0):
        raise ValueError("efficiency must be in [0, 1]")
    rng = np.random.default_rng(seed)
    out = pad.take(np.arange(pad.n_rows))
    out.variants = pad.variants.copy()
    if cycles == 0 or pad.n_rows == 0:
        return out
    L = pad.content.shape[1]
    p_mut = 1.0 - (1.0 - err_rate) ** L      # per copied strand
    for cycle in range(1, cycles + 1):
        new = rng.binomial(out.count, efficiency)
        mutants = rng.binomial(new, p_mut) if err_rate > 0 else np.zeros_like(new)
        out.count += new - mutants
        m_rows = np.repeat(np.arange(out.n_rows), mutants)
        if m_rows.size == 0:
            continue
        # each mutant copy gets >= 1 substitutions at random positions
        seqs = out.row_content(m_rows)
        for r in range(m_rows.size):
            k = max(1, rng.binomial(L, err_rate))
            pos = rng.choice(L, size=k, replace=False)
            seqs[r, pos] = (seqs[r, pos] + rng.integers(1, 4, k)) % 4
        v0 = out.variants.shape[0]
        out.variants = np.vstack([out.variants, seqs])
        out.key_id = np.concatenate([out.key_id, out.key_id[m_rows]])
        out.strand = np.concatenate([out.strand, out.strand[m_rows]])
        out.variant = np.concatenate(
            [out.variant, np.arange(v0, v0 + m_rows.size, dtype=np.int64)])
        out.lineage = np.concatenate(
            [out.lineage, np.full(m_rows.size, cycle, dtype=np.int16)])
        out.umi_f = np.concatenate([out.umi_f, out.umi_f[m_rows]])
        out.umi_r = np.concatenate([out.umi_r, out.umi_r[m_rows]])
        out.count = np.concatenate(
            [out.count, np.ones(m_rows.size, dtype=np.int64)])
    return out
