"""Mask reconciliation: systematic-BCH parity exchange.

The sender chunks their mask into k-bit blocks (zero-padded at the
end), encodes each with the selected systematic BCH code and transmits
only the parity bits.  The receiver appends that parity to their own
mask chunks and decodes; the corrected chunks equal the sender's mask
whenever each block carries at most t mismatches.  The parity bits are
public, so n-k bits per block of the mask's secrecy are sacrificed —
the selected ~5% overhead is the price of reconciliation.
"""

from __future__ import annotations

import numpy as np

from .bch import DecodeFailure
from .params import CodeSelection


def _chunks(bits: np.ndarray, k: int, blocks: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    out = np.zeros(blocks * k, dtype=np.uint8)
    out[:bits.size] = bits
    return out.reshape(blocks, k)


def parity_for_mask(bits: np.ndarray, sel: CodeSelection) -> np.ndarray:
    """Sender side: concatenated parity of every mask block."""
    code = sel.code
    if np.asarray(bits).size > sel.block_count * code.k:
        raise ValueError("mask longer than the selected code covers")
    chunks = _chunks(bits, code.k, sel.block_count)
    parity = np.empty((sel.block_count, code.parity_bits), dtype=np.uint8)
    for i in range(sel.block_count):
        parity[i] = code.encode(chunks[i])[code.k:]
    return parity.ravel()


def correct_mask(bits: np.ndarray, parity: np.ndarray,
                 sel: CodeSelection) -> np.ndarray:
    """Receiver side: corrected mask equal to the sender's.

    Raises DecodeFailure when a block exceeds the correction capacity.
    """
    code = sel.code
    n_bits = np.asarray(bits).size
    parity = np.asarray(parity, dtype=np.uint8)
    if parity.size != sel.block_count * code.parity_bits:
        raise ValueError("parity length does not match the selection")
    chunks = _chunks(bits, code.k, sel.block_count)
    parity = parity.reshape(sel.block_count, code.parity_bits)
    out = np.empty_like(chunks)
    corrections = 0
    for i in range(sel.block_count):
        received = np.concatenate([chunks[i], parity[i]])
        msg, ncorr = code.decode(received)
        out[i] = msg
        corrections += ncorr
    return out.ravel()[:n_bits], corrections
