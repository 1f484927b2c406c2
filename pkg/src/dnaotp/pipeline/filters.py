"""Read filtering: median quality, length window, optional barcodes."""

from __future__ import annotations

import numpy as np

from .. import seq
from .fastq import ReadSet


def filter_reads(reads: ReadSet, min_median_q: float = 10.0,
                 len_window=(0.85, 1.15), template_length: int = None) -> ReadSet:
    """Keep reads with median Phred >= threshold and length in window.

    The window is relative to ``template_length`` when given, otherwise
    absolute (min_len, max_len).
    """
    if template_length is not None:
        lo = len_window[0] * template_length
        hi = len_window[1] * template_length
    else:
        lo, hi = len_window
    keep = np.zeros(len(reads), dtype=bool)
    for i in range(len(reads)):
        n = reads.lengths[i]
        if not (lo <= n <= hi) or n == 0:
            continue
        keep[i] = np.median(reads.quals[i, :n]) >= min_median_q
    return reads.select(keep)


def _edit_distance_leq(a: np.ndarray, b: np.ndarray, k: int) -> bool:
    """Banded Levenshtein check: distance(a, b) <= k."""
    if abs(a.size - b.size) > k:
        return False
    prev = np.arange(b.size + 1)
    for i in range(1, a.size + 1):
        cur = np.empty(b.size + 1, dtype=np.int64)
        cur[0] = i
        for j in range(1, b.size + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        if cur.min() > k:
            return False
        prev = cur
    return prev[b.size] <= k


def barcode_prefilter(reads: ReadSet, barcode_f: str, barcode_r: str,
                      max_edit: int = 3) -> ReadSet:
    """Optional demultiplex filter: both-end barcodes within edit 3."""
    bf = seq.encode(barcode_f)
    br = seq.encode(barcode_r)
    keep = np.zeros(len(reads), dtype=bool)
    for i in range(len(reads)):
        n = reads.lengths[i]
        if n < bf.size + br.size:
            continue
        head = reads.bases[i, :bf.size + max_edit]
        tail = reads.bases[i, max(0, n - br.size - max_edit):n]
        keep[i] = (_edit_distance_leq(head[:bf.size], bf, max_edit)
                   and _edit_distance_leq(tail[-br.size:], br, max_edit))
    return reads.select(keep)
