"""FASTQ-style read container and I/O (4-line records, Phred+33)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import seq


@dataclass
class Read:
    id: str
    bases: np.ndarray        # uint8 codes
    quals: np.ndarray        # int16 Phred

    def __post_init__(self):
        if self.bases.size != self.quals.size:
            raise ValueError("bases/quals length mismatch")


class ReadSet:
    """Batch of reads as padded matrices (pad base N, pad qual 0)."""

    def __init__(self, ids, bases: np.ndarray, quals: np.ndarray,
                 lengths: np.ndarray):
        self.ids = list(ids)
        self.bases = bases
        self.quals = quals
        self.lengths = np.asarray(lengths, dtype=np.int64)
        if not (len(self.ids) == bases.shape[0] == quals.shape[0]
                == self.lengths.size):
            raise ValueError("ragged ReadSet columns")

    def __len__(self):
        return len(self.ids)

    def __getitem__(self, i) -> Read:
        n = self.lengths[i]
        return Read(self.ids[i], self.bases[i, :n], self.quals[i, :n])

    def select(self, mask_or_idx) -> "ReadSet":
        idx = np.flatnonzero(mask_or_idx) if np.asarray(
            mask_or_idx).dtype == bool else np.asarray(mask_or_idx)
        return ReadSet([self.ids[i] for i in idx], self.bases[idx],
                       self.quals[idx], self.lengths[idx])

    @classmethod
    def from_reads(cls, reads) -> "ReadSet":
        reads = list(reads)
        lengths = np.array([r.bases.size for r in reads], dtype=np.int64)
        width = int(lengths.max(initial=0))
        bases = np.full((len(reads), width), seq.N, dtype=np.uint8)
        quals = np.zeros((len(reads), width), dtype=np.int16)
        for i, r in enumerate(reads):
            bases[i, :lengths[i]] = r.bases
            quals[i, :lengths[i]] = r.quals
        return cls([r.id for r in reads], bases, quals, lengths)


def read_fastq(path) -> ReadSet:
    reads = []
    with open(path) as fh:
        while True:
            header = fh.readline()
            if not header:
                break
            bases = fh.readline().strip()
            plus = fh.readline()
            quals = fh.readline().strip()
            if not header.startswith("@") or not plus.startswith("+"):
                raise ValueError("malformed 4-line record")
            if len(bases) != len(quals):
                raise ValueError("sequence/quality length mismatch")
            reads.append(Read(header[1:].strip(), seq.encode(bases),
                              seq.ascii_to_quals(quals)))
    return ReadSet.from_reads(reads)


def write_fastq(readset: ReadSet, path) -> None:
    with open(path, "w") as fh:
        for i in range(len(readset)):
            r = readset[i]
            fh.write(f"@{r.id}\n{seq.decode(r.bases)}\n+\n"
                     f"{seq.quals_to_ascii(r.quals)}\n")
