"""Non-IID min-entropy assessment for binary mask material.

Runs the full battery of ten estimators and reports the per-bit
min-entropy as the minimum over those that could run.  Inputs shorter
than one million bits are flagged as below the standard assessment
length; the numbers are still computed but carry less weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import estimators as est
from .suffix import TupleStats

STANDARD_LENGTH = 1_000_000


@dataclass
class EntropyReport:
    estimates: dict
    min_entropy: float
    sample_length: int
    sub_standard_length: bool
    skipped: tuple = field(default_factory=tuple)
    symbol_bits: int = 1

    def __str__(self):
        lines = [f"sample length: {self.sample_length} bits, "
                 f"{self.symbol_bits}-bit symbols"
                 + (" (below standard length)" if self.sub_standard_length
                    else "")]
        for name in est.ESTIMATOR_NAMES:
            v = self.estimates[name]
            lines.append(f"  {name:20s} "
                         + ("skipped" if math.isnan(v) else f"{v:.6f}"))
        lines.append(f"min-entropy: {self.min_entropy:.6f} bits/bit")
        return "\n".join(lines)


def assess(bits: np.ndarray, symbol_bits: int = 1) -> EntropyReport:
    """Assess a binary sample; returns per-estimator values and the min.

    All values are reported in bits of min-entropy per mask bit.  With
    ``symbol_bits=1`` every estimator runs on the raw bit sequence.
    With ``symbol_bits=8`` the non-binary track is followed: bits are
    packed into bytes, the seven symbol-oriented estimators run on byte
    symbols (scaled to per-bit), while collision, Markov and
    compression always run on the bitstring.
    """
    bits = np.ascontiguousarray(np.asarray(bits).ravel(), dtype=np.uint8)
    if bits.size < 2:
        raise ValueError("need at least 2 bits to assess")
    if bits.max() > 1:
        raise ValueError("sample must be binary (0/1)")
    if symbol_bits == 1:
        stats = TupleStats(bits)
        values = {
            "most_common_value": est.most_common_value(bits),
            "collision": est.collision(bits),
            "markov": est.markov(bits),
            "compression": est.compression(bits),
            "t_tuple": est.t_tuple(bits, stats),
            "lrs": est.lrs(bits, stats),
            "multi_mcw": est.multi_mcw(bits),
            "lag": est.lag(bits),
            "multi_mmc": est.multi_mmc(bits),
            "lz78y": est.lz78y(bits),
        }
    elif symbol_bits == 8:
        sym = np.packbits(bits[:bits.size - bits.size % 8])
        if sym.size < 2:
            raise ValueError("need at least 2 byte symbols")
        stats = TupleStats(sym, sym_bits=8)
        values = {
            "most_common_value": est.most_common_value_bytes(sym),
            "collision": est.collision(bits),
            "markov": est.markov(bits),
            "compression": est.compression(bits),
            "t_tuple": est.t_tuple_bytes(sym, stats),
            "lrs": est.lrs_bytes(sym, stats),
            "multi_mcw": est.multi_mcw_bytes(sym),
            "lag": est.lag_bytes(sym),
            "multi_mmc": est.multi_mmc_bytes(sym),
            "lz78y": est.lz78y_bytes(sym),
        }
    else:
        raise ValueError("symbol_bits must be 1 or 8")
    usable = [v for v in values.values() if not math.isnan(v)]
    skipped = tuple(k for k, v in values.items() if math.isnan(v))
    return EntropyReport(
        estimates=values,
        min_entropy=min(usable),
        sample_length=bits.size,
        sub_standard_length=bits.size < STANDARD_LENGTH,
        skipped=skipped,
        symbol_bits=symbol_bits,
    )


def assess_subsequences(bits: np.ndarray, n_chunks: int = 10) -> list:
    """Assess equal-length contiguous chunks; sanity check for drift."""
    bits = np.asarray(bits).ravel()
    size = bits.size // n_chunks
    if size < 2:
        raise ValueError("chunks too short")
    return [assess(bits[i * size:(i + 1) * size]) for i in range(n_chunks)]


__all__ = ["EntropyReport", "assess", "assess_subsequences",
           "STANDARD_LENGTH"]
