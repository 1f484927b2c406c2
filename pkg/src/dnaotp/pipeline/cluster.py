"""Iterative identifier clustering of aligned reads.

Blocks are ranked once, globally, by quality: for every block the
median Qscore within the block is taken per read and averaged over all
reads (M_q); blocks are processed from highest to lowest M_q in groups
of six.  Reads are first grouped by an exact match of the top sextet
(i1).  Each group then votes a simple-majority consensus of the next
sextet (i2; singleton groups use their raw bases) and groups with
identical i2 are combined.  The merge step repeats with successive
sextets until every block has been used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .align import AlignedReads


@dataclass
class ClusterResult:
    labels: np.ndarray       # (n_reads,) int64 cluster id, contiguous from 0
    n_clusters: int
    block_rank: np.ndarray   # block indices, best quality first


def rank_blocks(aligned: AlignedReads) -> np.ndarray:
    """Blocks ordered by decreasing read-averaged median Qscore."""
    med = np.median(aligned.quals, axis=2)       # (n_reads, n_blocks)
    m_q = med.mean(axis=0)
    # stable ordering for reproducibility on exact ties
    return np.argsort(-m_q, kind="stable")


def _relabel(keys: np.ndarray) -> tuple:
    """Map rows of ``keys`` to dense labels 0..k-1 (first-seen order)."""
    _, first, inv = np.unique(keys, axis=0, return_index=True,
                              return_inverse=True)
    order = np.argsort(np.argsort(first))
    labels = order[inv]
    return labels, first.size


def _majority(bases: np.ndarray, labels: np.ndarray, n_clusters: int,
              sizes: np.ndarray) -> np.ndarray:
    """Per-cluster simple-majority base at each position.

    ``bases`` is (n_reads, width) with N (4) excluded from voting; ties
    resolve to the lexicographically smallest base.  Singleton clusters
    return their raw read row, N included.
    """
    n, width = bases.shape
    counts = np.zeros((n_clusters, width, 5), dtype=np.int64)
    np.add.at(counts, (labels[:, None], np.arange(width)[None, :], bases), 1)
    votes = counts[:, :, :4]
    out = np.argmax(votes, axis=2).astype(np.uint8)
    out[votes.sum(axis=2) == 0] = 4
    singleton = np.flatnonzero(sizes == 1)
    if singleton.size:
        # first (only) read of each singleton cluster
        first_read = np.full(n_clusters, -1, dtype=np.int64)
        first_read[labels[::-1]] = np.arange(n - 1, -1, -1)
        out[singleton] = bases[first_read[singleton]]
    return out


def cluster_iterative(aligned: AlignedReads, sextet: int = 6) -> ClusterResult:
    """Cluster reads into per-key groups via iterative identifier merging."""
    n, n_blocks, block_len = aligned.blocks.shape
    if n == 0:
        return ClusterResult(np.empty(0, dtype=np.int64), 0,
                             np.arange(n_blocks))
    rank = rank_blocks(aligned)
    chunks = [rank[k:k + sextet] for k in range(0, n_blocks, sextet)]
    flat = aligned.blocks.reshape(n, n_blocks * block_len)

    def chunk_bases(blocks):
        pos = (blocks[:, None] * block_len
               + np.arange(block_len)[None, :]).ravel()
        return flat[:, pos]

    labels, k = _relabel(chunk_bases(chunks[0]))
    for ch in chunks[1:]:
        sizes = np.bincount(labels, minlength=k)
        ident = _majority(chunk_bases(ch), labels, k, sizes)
        merged, k = _relabel(ident)
        labels = merged[labels]
    return ClusterResult(labels, k, rank)
