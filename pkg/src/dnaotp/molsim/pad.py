"""Pad inventories: multisets of single strands held by a party.

A pad is stored struct-of-arrays with one row per *distinct* physical
strand species and a copy count, so PCR blowups fold into counts
instead of materializing every molecule.  Pristine rows reference the
key-set content matrix; strands carrying PCR errors reference a row of
the pad's own ``variants`` matrix.

Row fields: key_id, strand (0 = direct, 1 = reverse complement),
variant (-1 = pristine), lineage (copy generation of the row's
founder), umi_f / umi_r (-1 = untagged), count.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .. import seq

DIRECT, REVCOMP = 0, 1


@dataclass
class PadInventory:
    owner: str
    content: np.ndarray                    # (n_keys, random_positions) uint8
    key_id: np.ndarray                     # (rows,) int64
    strand: np.ndarray                     # (rows,) uint8
    variant: np.ndarray                    # (rows,) int64, -1 pristine
    lineage: np.ndarray                    # (rows,) int16
    umi_f: np.ndarray                      # (rows,) int32, -1 untagged
    umi_r: np.ndarray                      # (rows,) int32
    count: np.ndarray                      # (rows,) int64
    variants: np.ndarray = None            # (n_var, random_positions) uint8
    rng_seed: int = 0
    umi_len: int = 0

    def __post_init__(self):
        if self.variants is None:
            self.variants = np.empty((0, self.content.shape[1]), dtype=np.uint8)
        n = self.key_id.size
        for name in ("strand", "variant", "lineage", "umi_f", "umi_r", "count"):
            if getattr(self, name).size != n:
                raise ValueError(f"column {name} length mismatch")
        if np.any(self.count < 0):
            raise ValueError("negative molecule count")

    # ------------------------------------------------------------------
    @property
    def n_rows(self) -> int:
        return self.key_id.size

    @property
    def total_molecules(self) -> int:
        return int(self.count.sum())

    @property
    def diversity(self) -> int:
        """Distinct keys with at least one molecule present."""
        return np.unique(self.key_id[self.count > 0]).size

    @property
    def tagged(self) -> bool:
        return bool(self.n_rows) and bool(np.all(self.umi_f >= 0))

    def row_content(self, rows=None) -> np.ndarray:
        """Random-content matrix for the given rows (default: all)."""
        if rows is None:
            rows = np.arange(self.n_rows)
        out = self.content[self.key_id[rows]].copy()
        mut = np.flatnonzero(self.variant[rows] >= 0)
        if mut.size:
            out[mut] = self.variants[self.variant[rows][mut]]
        return out

    def compact(self) -> "PadInventory":
        """Drop zero-count rows."""
        keep = self.count > 0
        return self.take(np.flatnonzero(keep))

    def take(self, rows: np.ndarray, counts: np.ndarray = None) -> "PadInventory":
        """New pad holding the given rows (optionally with new counts)."""
        return replace(
            self,
            key_id=self.key_id[rows].copy(),
            strand=self.strand[rows].copy(),
            variant=self.variant[rows].copy(),
            lineage=self.lineage[rows].copy(),
            umi_f=self.umi_f[rows].copy(),
            umi_r=self.umi_r[rows].copy(),
            count=(self.count[rows].copy() if counts is None
                   else np.asarray(counts, dtype=np.int64)),
        )

    def full_sequences(self, template, rows=None) -> np.ndarray:
        """Assembled nucleotide matrix for the rows; revcomp strands are
        reverse-complemented, UMI tags appended at both ends if tagged."""
        if rows is None:
            rows = np.arange(self.n_rows)
        rows = np.asarray(rows)
        mat = template.assemble(self.row_content(rows))
        rc = np.flatnonzero(self.strand[rows] == REVCOMP)
        if rc.size:
            mat[rc] = seq.revcomp_matrix(mat[rc])
        if self.umi_len:
            fwd = _umi_to_bases(self.umi_f[rows], self.umi_len)
            rev = _umi_to_bases(self.umi_r[rows], self.umi_len)
            mat = np.hstack([fwd, mat, rev])
        return mat


def _umi_to_bases(codes: np.ndarray, umi_len: int) -> np.ndarray:
    """Integer UMI codes to base matrices (base-4 digits, MSB first)."""
    codes = np.asarray(codes, dtype=np.int64)
    if np.any(codes < 0):
        raise ValueError("untagged rows have no UMI bases")
    shifts = 4 ** np.arange(umi_len - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] // shifts[None, :]) % 4).astype(np.uint8)


def empty_pad(owner: str, content: np.ndarray, rng_seed: int = 0) -> PadInventory:
    z = lambda dt: np.empty(0, dtype=dt)
    return PadInventory(owner=owner, content=content,
                        key_id=z(np.int64), strand=z(np.uint8),
                        variant=z(np.int64), lineage=z(np.int16),
                        umi_f=z(np.int32), umi_r=z(np.int32),
                        count=z(np.int64), rng_seed=rng_seed)


def save_pad(pad: PadInventory, path, template_hash: str = "") -> None:
    """Versioned npz archive with an owner/seed/template header."""
    np.savez_compressed(
        path, format=np.array(["DOTPPAD/1"]), owner=np.array([pad.owner]),
        rng_seed=np.array([pad.rng_seed]), umi_len=np.array([pad.umi_len]),
        template_hash=np.array([template_hash]),
        content=pad.content, key_id=pad.key_id, strand=pad.strand,
        variant=pad.variant, lineage=pad.lineage, umi_f=pad.umi_f,
        umi_r=pad.umi_r, count=pad.count, variants=pad.variants)


def load_pad(path) -> PadInventory:
    with np.load(path, allow_pickle=False) as z:
        if str(z["format"][0]) != "DOTPPAD/1":
            raise ValueError("not a DOTPPAD/1 archive")
        return PadInventory(
            owner=str(z["owner"][0]), content=z["content"],
            key_id=z["key_id"], strand=z["strand"], variant=z["variant"],
            lineage=z["lineage"], umi_f=z["umi_f"], umi_r=z["umi_r"],
            count=z["count"], variants=z["variants"],
            rng_seed=int(z["rng_seed"][0]), umi_len=int(z["umi_len"][0]))
