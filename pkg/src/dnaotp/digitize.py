"""Blockwise purine-parity digitization and binary mask assembly.

Each 5-nt block maps to one bit: the purine count (A or G) modulo 2.
Per-key bit vectors are concatenated column-wise (bit-position-major:
all first bits of every key, then all second bits, ...) into the shared
binary mask.  The column-wise orientation is part of the format
contract: both parties must use the same interleaving or their masks
desynchronize everywhere.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import seq

MASK_MAGIC = b"DOTPMASK"
MASK_VERSION = 1
LAYOUT_COLWISE = "colwise-v1"


class FormatError(ValueError):
    pass


@dataclass
class BinaryMask:
    bits: np.ndarray          # uint8 0/1, logical length n_keys * bits_per_key
    n_keys: int
    bits_per_key: int
    layout: str = LAYOUT_COLWISE
    provenance: str = ""
    consumed: int = 0         # bits consumed from the front (one-time property)

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.size != self.n_keys * self.bits_per_key:
            raise ValueError("mask length != n_keys * bits_per_key")

    @property
    def n_bits(self) -> int:
        return self.bits.size

    @property
    def remaining(self) -> int:
        return self.n_bits - self.consumed

    def digest(self) -> str:
        return hashlib.sha256(seq.pack_bits(self.bits)).hexdigest()


def ppd(block: np.ndarray, block_len: int = 5) -> int:
    """One parity bit from one block: (#A + #G) mod 2."""
    block = np.asarray(block)
    if block.ndim != 1 or block.size != block_len:
        raise ValueError(f"block must have length {block_len}")
    if block.max(initial=0) > seq.T:
        raise ValueError("block contains non-ACGT symbol")
    return int(((block == seq.A) | (block == seq.G)).sum() & 1)


def ppd5(block) -> int:
    """5PPD of a 5-nt block given as string or codes."""
    if isinstance(block, str):
        block = seq.encode(block)
    return ppd(block, 5)


def digitize_payload(payload, block_len: int = 5) -> np.ndarray:
    """Digitize one payload sequence, one bit per block, block order kept."""
    if isinstance(payload, str):
        payload = seq.encode(payload)
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.size % block_len != 0:
        raise ValueError("payload length not divisible by block length")
    if payload.max(initial=0) > seq.T:
        raise ValueError("payload contains non-ACGT symbol")
    purine = (payload == seq.A) | (payload == seq.G)
    return (purine.reshape(-1, block_len).sum(axis=1) & 1).astype(np.uint8)


def digitize_matrix(payloads: np.ndarray, block_len: int = 5) -> np.ndarray:
    """Digitize (n_keys, L) base codes to (n_keys, L//block_len) bits."""
    payloads = np.asarray(payloads, dtype=np.uint8)
    n, L = payloads.shape
    if L % block_len != 0:
        raise ValueError("payload length not divisible by block length")
    purine = (payloads == seq.A) | (payloads == seq.G)
    return (purine.reshape(n, L // block_len, block_len).sum(axis=2) & 1).astype(np.uint8)


def build_mask(bit_grid: np.ndarray, provenance: str = "") -> BinaryMask:
    """Column-wise mask from a (n_keys, bits_per_key) bit grid.

    Bit j of key k lands at mask position j*K + k.
    """
    bit_grid = np.asarray(bit_grid, dtype=np.uint8)
    if bit_grid.ndim != 2:
        raise ValueError("expected a 2-d bit grid")
    n_keys, bits_per_key = bit_grid.shape
    bits = np.ascontiguousarray(bit_grid.T).ravel()
    return BinaryMask(bits=bits, n_keys=n_keys, bits_per_key=bits_per_key,
                      provenance=provenance)


def mask_to_grid(mask: BinaryMask) -> np.ndarray:
    """Exact inverse of build_mask."""
    return np.ascontiguousarray(
        mask.bits.reshape(mask.bits_per_key, mask.n_keys).T)


@dataclass
class ChannelEstimate:
    p_est: float
    sample_bits: int
    mismatches: int
    ci_low: float
    ci_high: float
    confidence: float = 0.95


def binomial_ci(k: int, n: int, confidence: float = 0.95):
    """Exact (Clopper-Pearson) binomial confidence interval."""
    alpha = 1.0 - confidence
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def estimate_error_rate(local_bits: np.ndarray, remote_bits: np.ndarray,
                        confidence: float = 0.95) -> ChannelEstimate:
    """Channel error rate from sacrificial (publicly compared) bits."""
    a = np.asarray(local_bits, dtype=np.uint8)
    b = np.asarray(remote_bits, dtype=np.uint8)
    if a.size != b.size:
        raise ValueError("error-estimation bit strings have different lengths "
                         "(desynchronization)")
    if a.size == 0:
        raise ValueError("empty error-estimation strings")
    mism = int((a != b).sum())
    lo, hi = binomial_ci(mism, a.size, confidence)
    if mism == 0:
        hi = max(hi, 3.0 / a.size)  # rule-of-three floor for zero observations
    return ChannelEstimate(p_est=mism / a.size, sample_bits=a.size,
                           mismatches=mism, ci_low=lo, ci_high=hi,
                           confidence=confidence)


# ---------------------------------------------------------------------------
# mask file format

def write_mask(path, mask: BinaryMask) -> None:
    header = {
        "version": MASK_VERSION,
        "n_keys": mask.n_keys,
        "bits_per_key": mask.bits_per_key,
        "layout": mask.layout,
        "provenance": mask.provenance,
        "consumed": mask.consumed,
    }
    with open(path, "wb") as fh:
        fh.write(MASK_MAGIC + b"\n")
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(seq.pack_bits(mask.bits))


def read_mask(path) -> BinaryMask:
    with open(path, "rb") as fh:
        magic = fh.readline().rstrip(b"\n")
        if magic != MASK_MAGIC:
            raise FormatError("not a mask file (bad magic)")
        header = json.loads(fh.readline().decode())
        if header.get("version") != MASK_VERSION:
            raise FormatError(f"unsupported mask version {header.get('version')}")
        data = fh.read()
    n_bits = header["n_keys"] * header["bits_per_key"]
    bits = seq.unpack_bits(data, n_bits)
    return BinaryMask(bits=bits, n_keys=header["n_keys"],
                      bits_per_key=header["bits_per_key"],
                      layout=header["layout"], provenance=header["provenance"],
                      consumed=header["consumed"])
