"""Read simulation: Phred-consistent errors and FASTQ output.

Quality scores are drawn first from a discretized clipped normal, and
substitutions then occur per base with probability 10^(-Q/10), so the
Phred promise holds by construction at every Q.  The location of the
distribution is calibrated so the *mean* substitution rate equals the
configured sub_rate.  Indel positions carry flat rates; inserted bases
get their own drawn quality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import seq
from .pad import PadInventory

Q_MIN, Q_MAX = 1, 50
_ASCII = np.frombuffer(b"ACGTN", dtype=np.uint8)


def _calibrated_pmf(sub_rate: float, sigma: float = 4.0):
    """Discretized normal over [Q_MIN, Q_MAX] with mean Phred error
    probability equal to sub_rate (location found by bisection)."""
    qs = np.arange(Q_MIN, Q_MAX + 1)
    perr = 10.0 ** (-qs / 10.0)

    def mean_err(mu):
        w = np.exp(-0.5 * ((qs - mu) / sigma) ** 2)
        w /= w.sum()
        return float(w @ perr), w

    lo, hi = float(Q_MIN), float(Q_MAX)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        e, _ = mean_err(mid)
        if e > sub_rate:
            lo = mid
        else:
            hi = mid
    _, pmf = mean_err(0.5 * (lo + hi))
    return qs, pmf


@dataclass
class SeqErrorModel:
    sub_rate: float = 0.01
    ins_rate: float = 0.005
    del_rate: float = 0.01
    depth: float = 4.0
    q_sigma: float = 4.0

    def __post_init__(self):
        for r in (self.sub_rate, self.ins_rate, self.del_rate):
            if not (0.0 <= r <= 1.0):
                raise ValueError("rates must be in [0, 1]")
        if self.sub_rate > 0:
            self._qs, self._pmf = _calibrated_pmf(self.sub_rate, self.q_sigma)
        else:
            self._qs, self._pmf = np.array([Q_MAX]), np.array([1.0])

    def draw_quals(self, shape, rng) -> np.ndarray:
        return rng.choice(self._qs, size=shape, p=self._pmf).astype(np.int16)


def simulate_reads(mat: np.ndarray, model: SeqErrorModel,
                   rng: np.random.Generator):
    """Apply the error model to a matrix of true sequences.

    Returns (bases, quals, lengths): flattened ragged reads plus
    per-read lengths.
    """
    n, L = mat.shape
    quals = model.draw_quals((n, L), rng)
    bases = mat.copy()
    if model.sub_rate > 0:
        p = 10.0 ** (-quals / 10.0)
        sub = rng.random((n, L)) < p
        bases[sub] = (bases[sub] + rng.integers(1, 4, int(sub.sum()),
                                                dtype=np.uint8)) % 4
    rep = np.ones((n, L), dtype=np.int64)
    if model.del_rate > 0:
        rep -= (rng.random((n, L)) < model.del_rate).astype(np.int64)
    if model.ins_rate > 0:
        rep += (rng.random((n, L)) < model.ins_rate).astype(np.int64)
    idx = np.repeat(np.arange(n * L), rep.ravel())
    out_b = bases.ravel()[idx]
    out_q = quals.ravel()[idx]
    dup = np.flatnonzero(np.diff(idx, prepend=-1) == 0)
    if dup.size:  # the second copy of a duplicated slot is the insertion
        out_b[dup] = rng.integers(0, 4, dup.size, dtype=np.uint8)
        out_q[dup] = model.draw_quals(dup.size, rng)
    lengths = rep.sum(axis=1)
    return out_b, out_q, lengths


def sequence_pad(pad: PadInventory, template, model: SeqErrorModel,
                 seed: int = 0, path=None, batch: int = 20000):
    """Emit reads for a pad: per-row read count ~ Poisson(depth * count).

    Writes 4-line records to ``path`` if given, else returns a list of
    (read_id, bases, quals) tuples.  Read IDs embed the ground truth as
    ``key=<id> strand=<s> row=<r>`` for oracle checks downstream.
    """
    rng = np.random.default_rng(seed)
    n_reads_per_row = rng.poisson(model.depth * pad.count)
    rows = np.repeat(np.arange(pad.n_rows), n_reads_per_row)
    records = [] if path is None else None
    fh = open(path, "w") if path is not None else None
    serial = 0
    try:
        for start in range(0, rows.size, batch):
            chunk = rows[start:start + batch]
            mat = pad.full_sequences(template, chunk)
            out_b, out_q, lengths = simulate_reads(mat, model, rng)
            offs = np.concatenate([[0], np.cumsum(lengths)])
            for j in range(chunk.size):
                b = out_b[offs[j]:offs[j + 1]]
                q = np.clip(out_q[offs[j]:offs[j + 1]], Q_MIN, Q_MAX)
                rid = (f"r{serial} key={pad.key_id[chunk[j]]} "
                       f"strand={pad.strand[chunk[j]]} row={chunk[j]}")
                bs = _ASCII[b].tobytes().decode("ascii")
                qs = seq.quals_to_ascii(q)
                if fh is not None:
                    fh.write(f"@{rid}\n{bs}\n+\n{qs}\n")
                else:
                    records.append((rid, bs, qs))
                serial += 1
    finally:
        if fh is not None:
            fh.close()
    return records if path is None else serial
