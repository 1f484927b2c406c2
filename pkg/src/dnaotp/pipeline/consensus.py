"""Quality-weighted consensus calling and dense-table filtering."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .align import AlignedReads
from .cluster import ClusterResult

DISSENT_PENALTY = 4.8   # Phred cost per dissenting read at a position


@dataclass
class ConsensusKeys:
    """Consensus table: one row per recovered key candidate."""
    bases: np.ndarray             # (n, n_blocks, block_len) uint8
    quals: np.ndarray             # (n, n_blocks, block_len) int16
    cluster_size: np.ndarray      # (n,) int64
    umi_multiplicity: np.ndarray  # (n,) int64 distinct UMI pairs (0 untagged)

    def __len__(self):
        return self.bases.shape[0]

    def select(self, idx) -> "ConsensusKeys":
        idx = np.asarray(idx)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        return ConsensusKeys(self.bases[idx], self.quals[idx],
                             self.cluster_size[idx],
                             self.umi_multiplicity[idx])

    def content(self) -> np.ndarray:
        """(n, n_blocks*block_len) block-major random content."""
        return self.bases.reshape(len(self), -1)

    def block_view(self, template, block_range) -> np.ndarray:
        idx = template.blocks_in_range(block_range)
        return self.bases[:, idx, :].reshape(len(self), -1)

    def qual_view(self, template, block_range) -> np.ndarray:
        idx = template.blocks_in_range(block_range)
        return self.quals[:, idx, :].reshape(len(self), -1)


def consensus_call(bases: np.ndarray, quals: np.ndarray):
    """Weighted-majority consensus of one cluster.

    ``bases``/``quals`` are (k, n_blocks, block_len).  At each position
    the base with the largest summed Phred weight wins (N excluded, ties
    to the lexicographically smallest base) and the consensus Qscore is
    the winning weight minus the dissenting weight minus
    ``DISSENT_PENALTY`` per dissenting read, floored at 0.
    """
    k, nb, bl = bases.shape
    flat_b = bases.reshape(k, nb * bl)
    flat_q = quals.reshape(k, nb * bl).astype(np.int64)
    weight = np.zeros((nb * bl, 5), dtype=np.int64)
    nread = np.zeros((nb * bl, 5), dtype=np.int64)
    cols = np.broadcast_to(np.arange(nb * bl), (k, nb * bl))
    np.add.at(weight, (cols, flat_b), flat_q)
    np.add.at(nread, (cols, flat_b), 1)
    votes = weight[:, :4]
    win = np.argmax(votes, axis=1)
    no_vote = nread[:, :4].sum(axis=1) == 0
    pos = np.arange(nb * bl)
    w_win = votes[pos, win]
    w_total = votes.sum(axis=1)
    n_dissent = nread[:, :4].sum(axis=1) - nread[pos, win]
    q = w_win - (w_total - w_win) - np.round(
        DISSENT_PENALTY * n_dissent).astype(np.int64)
    q = np.clip(q, 0, 32767)
    out_b = win.astype(np.uint8)
    out_b[no_vote] = 4
    q[no_vote] = 0
    return out_b.reshape(nb, bl), q.astype(np.int16).reshape(nb, bl)


def _umi_multiplicity(umi_f, umi_r) -> int:
    ok = (umi_f >= 0) & (umi_r >= 0)
    if not np.any(ok):
        return 0
    pairs = umi_f[ok].astype(np.int64) * (1 << 32) + umi_r[ok]
    return int(np.unique(pairs).size)


def call_clusters(aligned: AlignedReads, clusters: ClusterResult) -> ConsensusKeys:
    """One consensus key per cluster."""
    n, nb, bl = aligned.blocks.shape
    k = clusters.n_clusters
    bases = np.empty((k, nb, bl), dtype=np.uint8)
    quals = np.empty((k, nb, bl), dtype=np.int16)
    sizes = np.bincount(clusters.labels, minlength=k)
    order = np.argsort(clusters.labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    umi_mult = np.empty(k, dtype=np.int64)
    for c in range(k):
        rows = order[bounds[c]:bounds[c + 1]]
        bases[c], quals[c] = consensus_call(aligned.blocks[rows],
                                            aligned.quals[rows])
        umi_mult[c] = _umi_multiplicity(aligned.umi_f[rows],
                                        aligned.umi_r[rows])
    return ConsensusKeys(bases, quals, sizes.astype(np.int64), umi_mult)


def filter_consensus(keys: ConsensusKeys, template,
                     min_payload_q: int = 30,
                     median_ratio: float = 0.5,
                     min_cluster_size: int = 2):
    """Apply the dense-table acceptance filters, in order.

    1. minimum cluster size;
    2. minimum Qscore over the payload and the error-estimation blocks
       must exceed ``min_payload_q``;
    3. within every block, min(Q)/median(Q) must be >= ``median_ratio``;
    4. the index must be unique (all keys sharing an index are dropped).

    The Q gate covers the error-estimation blocks with the same
    threshold as the payload: the channel estimator assumes both block
    classes see the same residual error process, and gating only the
    payload would leave the error blocks dirtier than the material they
    are meant to predict.

    Returns (filtered keys, removal counts per filter).
    """
    removed = {}
    keep = keys.cluster_size >= min_cluster_size
    removed["cluster_size"] = int(np.sum(~keep))
    keys = keys.select(keep)

    pq = keys.qual_view(template, template.payload_block_range)
    eq = keys.qual_view(template, template.error_est_block_range)
    keep = (pq.min(axis=1) > min_payload_q) & (eq.min(axis=1) > min_payload_q)
    removed["payload_min_q"] = int(np.sum(~keep))
    keys = keys.select(keep)

    med = np.median(keys.quals, axis=2)                  # (n, n_blocks)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = keys.quals.min(axis=2) / med
    keep = np.all(np.nan_to_num(ratio, nan=0.0) >= median_ratio, axis=1)
    removed["block_median_ratio"] = int(np.sum(~keep))
    keys = keys.select(keep)

    idx = keys.block_view(template, template.index_block_range)
    _, inv, counts = np.unique(idx, axis=0, return_inverse=True,
                               return_counts=True)
    keep = counts[inv] == 1
    removed["index_collision"] = int(np.sum(~keep))
    keys = keys.select(keep)
    return keys, removed
