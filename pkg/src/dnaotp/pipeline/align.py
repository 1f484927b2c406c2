"""Orientation and banded alignment against the N-wildcarded reference.

The reference is the full key template with every random position
(blocks, and UMI tails when present) replaced by N; N matches any read
base at no penalty.  Alignment is banded global Needleman-Wunsch.
After alignment the random regions are extracted with the dense-table
normalization rules: a run of read bases aligned to one reference
position keeps its first base and the minimum of the run's Qscores;
deleted positions get an N placeholder whose Qscore is the min of the
two nearest attributed Qscores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import seq
from ..backends import njit_if_enabled
from .fastq import ReadSet

MATCH, MISMATCH, GAP = 1, -1, -2


@njit_if_enabled()
def _banded_nw(ref, read, band):
    """Global banded alignment; returns (score, ops) with ops reversed.

    ops codes: 0 = diagonal (ref+read), 1 = ref only (deletion from the
    read), 2 = read only (insertion into the read).
    """
    R = ref.shape[0]
    L = read.shape[0]
    b = band + abs(L - R)
    width = 2 * b + 1
    NEG = np.int32(-10 ** 9)
    score = np.full((R + 1, width), NEG, dtype=np.int32)
    trace = np.zeros((R + 1, width), dtype=np.int8)
    for d in range(width):
        j = d - b
        if 0 <= j <= L:
            score[0, d] = GAP * j
            trace[0, d] = 2
    for i in range(1, R + 1):
        for d in range(width):
            j = i + d - b
            if j < 0 or j > L:
                continue
            best = NEG
            move = -1
            if j > 0:
                s = score[i - 1, d]
                if s > NEG:
                    rb = ref[i - 1]
                    sub = MATCH if (rb == 4 or rb == read[j - 1]) else MISMATCH
                    if s + sub > best:
                        best = s + sub
                        move = 0
            if d + 1 < width:
                s = score[i - 1, d + 1]
                if s > NEG and s + GAP > best:
                    best = s + GAP
                    move = 1
            if j > 0 and d - 1 >= 0:
                s = score[i, d - 1]
                if s > NEG and s + GAP > best:
                    best = s + GAP
                    move = 2
            if move >= 0:
                score[i, d] = best
                trace[i, d] = move
    d_end = L - R + b
    final = score[R, d_end]
    ops = np.empty(R + L, dtype=np.int8)
    n_ops = 0
    i, d = R, d_end
    while i > 0 or i + d - b > 0:
        mv = trace[i, d]
        ops[n_ops] = mv
        n_ops += 1
        if mv == 0:
            i -= 1
        elif mv == 1:
            i -= 1
            d += 1
        else:
            d -= 1
    return final, ops[:n_ops]


@njit_if_enabled()
def _extract(ref, read, quals, ops):
    """Per-reference-position base/qual attribution from alignment ops."""
    R = ref.shape[0]
    out_b = np.full(R, 4, dtype=np.uint8)     # N placeholder for deletions
    out_q = np.full(R, -1, dtype=np.int16)
    i = 0
    j = 0
    run_first = -1
    run_minq = np.int16(32767)
    for k in range(ops.shape[0] - 1, -1, -1):
        mv = ops[k]
        if mv == 2:  # insertion: read base pending for the next position
            if run_first < 0:
                run_first = read[j]
            if quals[j] < run_minq:
                run_minq = quals[j]
            j += 1
        elif mv == 0:
            if run_first < 0:
                out_b[i] = read[j]
                out_q[i] = quals[j]
            else:
                out_b[i] = np.uint8(run_first)
                out_q[i] = min(run_minq, quals[j])
            run_first = -1
            run_minq = np.int16(32767)
            i += 1
            j += 1
        else:  # deletion: position stays N, qual filled below
            run_first = -1
            run_minq = np.int16(32767)
            i += 1
    # deletions: min of the two nearest attributed Qscores
    for i in range(R):
        if out_q[i] >= 0:
            continue
        left = np.int16(32767)
        right = np.int16(32767)
        for u in range(i - 1, -1, -1):
            if out_q[u] >= 0:
                left = out_q[u]
                break
        for u in range(i + 1, R):
            if out_q[u] >= 0:
                right = out_q[u]
                break
        q = min(left, right)
        out_q[i] = q if q < 32767 else 0
    return out_b, out_q


@njit_if_enabled()
def _align_batch(ref, bases, quals, lengths, comp, band, min_score,
                 anchor, anchor_rc, skip, hint_margin,
                 out_b, out_q, out_score, out_orient, kept):
    """Orient, align and extract every read of a padded batch."""
    n = bases.shape[0]
    for i in range(n):
        L = lengths[i]
        rb = bases[i, :L]
        rq = quals[i, :L]
        # orientation hint from the leading fixed flank
        hint = -1
        w = anchor.shape[0]
        if L - skip >= w:
            m_f = 0
            m_r = 0
            for j in range(w):
                h = rb[skip + j]
                if h == anchor[j]:
                    m_f += 1
                if h == anchor_rc[j]:
                    m_r += 1
            if m_f - m_r >= hint_margin:
                hint = 0
            elif m_r - m_f >= hint_margin:
                hint = 1
        rc = np.empty(L, dtype=np.uint8)
        cq = np.empty(L, dtype=np.int16)
        for j in range(L):
            rc[j] = comp[rb[L - 1 - j]]
            cq[j] = rq[L - 1 - j]
        s_f = -(1 << 30)
        s_r = -(1 << 30)
        ops_f = np.empty(0, dtype=np.int8)
        ops_r = np.empty(0, dtype=np.int8)
        if hint != 1:
            s_f, ops_f = _banded_nw(ref, rb, band)
        if hint != 0:
            s_r, ops_r = _banded_nw(ref, rc, band)
        best = max(s_f, s_r)
        if best < min_score:
            continue
        if s_f >= s_r:
            eb, eq = _extract(ref, rb, rq, ops_f)
            out_orient[i] = 0
        else:
            eb, eq = _extract(ref, rc, cq, ops_r)
            out_orient[i] = 1
        out_b[i] = eb
        out_q[i] = eq
        out_score[i] = best
        kept[i] = True


def make_reference(template, umi_len: int = 0):
    """(reference codes, block offsets, umi slices) for alignment."""
    core = template.reference()
    offs = template.block_offsets()
    if umi_len:
        ref = np.concatenate([np.full(umi_len, seq.N, dtype=np.uint8), core,
                              np.full(umi_len, seq.N, dtype=np.uint8)])
        offs = offs + umi_len
        umi_slices = (slice(0, umi_len), slice(ref.size - umi_len, ref.size))
    else:
        ref = core
        umi_slices = None
    return ref, offs, umi_slices


@dataclass
class AlignedReads:
    """Extracted random regions of successfully aligned reads."""
    ids: list
    blocks: np.ndarray       # (n, n_blocks, block_len) uint8
    quals: np.ndarray        # (n, n_blocks, block_len) int16
    umi_f: np.ndarray        # (n,) int32, -1 if absent
    umi_r: np.ndarray
    score: np.ndarray        # (n,) int32
    orientation: np.ndarray  # (n,) uint8: 0 = '+', 1 = '-'

    def __len__(self):
        return len(self.ids)

    def select(self, idx) -> "AlignedReads":
        idx = np.asarray(idx)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        return AlignedReads([self.ids[i] for i in idx], self.blocks[idx],
                            self.quals[idx], self.umi_f[idx],
                            self.umi_r[idx], self.score[idx],
                            self.orientation[idx])


def _umi_codes(mat: np.ndarray) -> np.ndarray:
    """Base-4 codes of UMI base rows; -1 where any base is not ACGT."""
    bad = np.any(mat > 3, axis=1)
    powers = 4 ** np.arange(mat.shape[1] - 1, -1, -1, dtype=np.int64)
    codes = (mat.astype(np.int64) @ powers).astype(np.int32)
    codes[bad] = -1
    return codes


def orient_and_align(reads: ReadSet, template, umi_len: int = 0,
                     band: int = 12, min_score_frac: float = 0.5) -> AlignedReads:
    """Align every read in its best orientation; drop poor alignments."""
    ref, offs, umi_slices = make_reference(template, umi_len)
    bl = template.block_len
    nb = template.n_blocks
    n = len(reads)
    min_score = min_score_frac * ref.size
    # leading-flank anchor sits past the UMI (when one is expected) on
    # forward reads; reverse reads lead with the reverse flank's revcomp
    anchor = seq.encode(template.fixed_flanks[0])
    anchor_rc = seq.revcomp(seq.encode(template.fixed_flanks[1]))
    out_b = np.zeros((n, ref.size), dtype=np.uint8)
    out_q = np.zeros((n, ref.size), dtype=np.int16)
    out_score = np.zeros(n, dtype=np.int32)
    out_orient = np.zeros(n, dtype=np.uint8)
    kept = np.zeros(n, dtype=np.bool_)
    _align_batch(ref, reads.bases, reads.quals, reads.lengths, seq._COMP,
                 band, min_score, anchor, anchor_rc, umi_len, 8,
                 out_b, out_q, out_score, out_orient, kept)
    idx = np.flatnonzero(kept)
    eb = out_b[idx]
    eq = out_q[idx]
    pos = (offs[:, None] + np.arange(bl)[None, :]).ravel()
    blocks = eb[:, pos].reshape(idx.size, nb, bl)
    quals = eq[:, pos].reshape(idx.size, nb, bl)
    if umi_slices is not None:
        umf = _umi_codes(eb[:, umi_slices[0]])
        umr = _umi_codes(eb[:, umi_slices[1]])
    else:
        umf = np.full(idx.size, -1, dtype=np.int32)
        umr = np.full(idx.size, -1, dtype=np.int32)
    return AlignedReads([reads.ids[i] for i in idx],
                        np.ascontiguousarray(blocks),
                        np.ascontiguousarray(quals), umf, umr,
                        out_score[idx], out_orient[idx])
