"""Versioned TSV serialization of the consensus key table."""

from __future__ import annotations

import numpy as np

from .. import seq
from .consensus import ConsensusKeys

MAGIC = "#dnaotp-consensus/1"
_COLUMNS = ("index_seq", "payload_seq", "error_est_seq", "quals",
            "cluster_size", "umi_multiplicity")


def write_consensus_table(keys: ConsensusKeys, template, path) -> None:
    idx = keys.block_view(template, template.index_block_range)
    pay = keys.block_view(template, template.payload_block_range)
    err = keys.block_view(template, template.error_est_block_range)
    flat_q = keys.quals.reshape(len(keys), -1)
    with open(path, "w") as fh:
        fh.write(MAGIC + "\n")
        fh.write("\t".join(_COLUMNS) + "\n")
        for i in range(len(keys)):
            fh.write("\t".join([
                seq.decode(idx[i]), seq.decode(pay[i]), seq.decode(err[i]),
                ",".join(map(str, flat_q[i])),
                str(int(keys.cluster_size[i])),
                str(int(keys.umi_multiplicity[i])),
            ]) + "\n")


def read_consensus_table(path, template) -> ConsensusKeys:
    with open(path) as fh:
        magic = fh.readline().strip()
        if magic != MAGIC:
            raise ValueError(f"not a consensus table (got {magic!r})")
        header = fh.readline().strip().split("\t")
        if tuple(header) != _COLUMNS:
            raise ValueError("unexpected consensus table columns")
        rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    n = len(rows)
    nb, bl = template.n_blocks, template.block_len
    bases = np.full((n, nb, bl), seq.N, dtype=np.uint8)
    quals = np.zeros((n, nb, bl), dtype=np.int16)
    size = np.zeros(n, dtype=np.int64)
    umi = np.zeros(n, dtype=np.int64)
    ranges = ((template.index_block_range, 0),
              (template.payload_block_range, 1),
              (template.error_est_block_range, 2))
    for i, row in enumerate(rows):
        if len(row) != len(_COLUMNS):
            raise ValueError(f"row {i}: expected {len(_COLUMNS)} fields")
        for block_range, col in ranges:
            blocks = template.blocks_in_range(block_range)
            codes = seq.encode(row[col])
            if codes.size != blocks.size * bl:
                raise ValueError(f"row {i}: bad sequence length")
            bases[i, blocks, :] = codes.reshape(blocks.size, bl)
        q = np.array(row[3].split(","), dtype=np.int64)
        if q.size != nb * bl:
            raise ValueError(f"row {i}: bad quals length")
        quals[i] = q.reshape(nb, bl)
        size[i] = int(row[4])
        umi[i] = int(row[5])
    return ConsensusKeys(bases, quals, size, umi)
