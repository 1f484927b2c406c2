"""One-time-pad sealing with encode-then-mask framing.

The plaintext is BCH-encoded first and the codewords are XORed with
fresh mask bits, so mask discrepancies on the receiving side appear as
sparse codeword errors and no unmasked parity ever leaves the sender.
Consumed mask bits are overwritten and flagged; reuse is a hard error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .. import seq
from ..digitize import BinaryMask, FormatError, read_mask, write_mask
from .bch import BchCode, DecodeFailure

CT_MAGIC = b"DOTPCT"
CT_VERSION = 1


class MaskExhausted(RuntimeError):
    pass


class MaskReuse(RuntimeError):
    pass


@dataclass
class Ciphertext:
    m: int
    n: int
    k: int
    t: int
    block_count: int
    plaintext_bit_length: int
    mask_provenance: str
    mask_offset: int
    body: np.ndarray  # packed masked codewords, uint8 bits

    def __post_init__(self):
        self.body = np.asarray(self.body, dtype=np.uint8)
        if self.body.size != self.block_count * self.n:
            raise ValueError("body length != block_count * n")
        if self.plaintext_bit_length > self.block_count * self.k:
            raise ValueError("plaintext longer than block capacity")


def consume_and_destroy(mask: BinaryMask, bits_used: int) -> int:
    """Consume bits from the front of the unconsumed region.

    Returns the offset the consumed stretch started at.  The consumed
    bits are zeroed in memory; persist with write_mask to destroy them
    on disk as well.
    """
    if bits_used < 0:
        raise ValueError("bits_used must be >= 0")
    if bits_used > mask.remaining:
        raise MaskExhausted(
            f"mask has {mask.remaining} bits left, {bits_used} requested")
    start = mask.consumed
    mask.bits[start:start + bits_used] = 0
    mask.consumed = start + bits_used
    return start


def otp_seal(plaintext_bits: np.ndarray, mask: BinaryMask,
             code: BchCode) -> Ciphertext:
    pt = np.asarray(plaintext_bits, dtype=np.uint8)
    blocks = math.ceil(max(pt.size, 1) / code.k)
    need = blocks * code.n
    if need > mask.remaining:
        raise MaskExhausted(
            f"mask has {mask.remaining} bits left, sealing needs {need}")
    padded = np.zeros(blocks * code.k, dtype=np.uint8)
    padded[:pt.size] = pt
    body = np.empty(blocks * code.n, dtype=np.uint8)
    for b in range(blocks):
        body[b * code.n:(b + 1) * code.n] = code.encode(
            padded[b * code.k:(b + 1) * code.k])
    offset = mask.consumed
    pad_bits = mask.bits[offset:offset + need].copy()
    consume_and_destroy(mask, need)
    body ^= pad_bits
    return Ciphertext(m=code.m, n=code.n, k=code.k, t=code.t,
                      block_count=blocks, plaintext_bit_length=pt.size,
                      mask_provenance=mask.provenance, mask_offset=offset,
                      body=body)


def otp_open(ct: Ciphertext, mask: BinaryMask) -> np.ndarray:
    """Unmask and decode; raises DecodeFailure listing bad blocks."""
    if ct.mask_provenance and mask.provenance and \
            ct.mask_provenance != mask.provenance:
        raise FormatError("ciphertext was sealed against a different mask")
    need = ct.block_count * ct.n
    if mask.consumed != ct.mask_offset:
        # allow opening when the local mask is positioned at the offset
        if mask.consumed > ct.mask_offset:
            raise MaskReuse("local mask already consumed past the "
                            "ciphertext offset")
        raise FormatError("local mask not synchronized to ciphertext offset")
    if need > mask.remaining:
        raise MaskExhausted("local mask too short for ciphertext")
    pad_bits = mask.bits[ct.mask_offset:ct.mask_offset + need].copy()
    consume_and_destroy(mask, need)
    code = BchCode(m=ct.m, t=ct.t)
    if code.n != ct.n or code.k != ct.k:
        raise FormatError("ciphertext header is internally inconsistent")
    words = (ct.body ^ pad_bits).reshape(ct.block_count, ct.n)
    out = np.empty(ct.block_count * ct.k, dtype=np.uint8)
    bad = []
    for b in range(ct.block_count):
        try:
            msg, _ = code.decode(words[b])
            out[b * ct.k:(b + 1) * ct.k] = msg
        except DecodeFailure:
            bad.append(b)
    if bad:
        raise DecodeFailure(f"decode failure in blocks {bad}")
    return out[:ct.plaintext_bit_length]


# ---------------------------------------------------------------------------
# byte payload helpers and container I/O

def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8 != 0:
        raise ValueError("bit length not a whole number of bytes")
    return np.packbits(bits).tobytes()


def write_ciphertext(path, ct: Ciphertext) -> None:
    header = {
        "version": CT_VERSION, "m": ct.m, "n": ct.n, "k": ct.k, "t": ct.t,
        "block_count": ct.block_count,
        "plaintext_bit_length": ct.plaintext_bit_length,
        "mask_provenance": ct.mask_provenance,
        "mask_offset": ct.mask_offset,
    }
    with open(path, "wb") as fh:
        fh.write(CT_MAGIC + b"\n")
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(seq.pack_bits(ct.body))


def read_ciphertext(path) -> Ciphertext:
    with open(path, "rb") as fh:
        magic = fh.readline().rstrip(b"\n")
        if magic != CT_MAGIC:
            raise FormatError("not a ciphertext file (bad magic)")
        header = json.loads(fh.readline().decode())
        if header.get("version") != CT_VERSION:
            raise FormatError("unsupported ciphertext version")
        data = fh.read()
    n_bits = header["block_count"] * header["n"]
    body = seq.unpack_bits(data, n_bits)
    return Ciphertext(m=header["m"], n=header["n"], k=header["k"],
                      t=header["t"], block_count=header["block_count"],
                      plaintext_bit_length=header["plaintext_bit_length"],
                      mask_provenance=header["mask_provenance"],
                      mask_offset=header["mask_offset"], body=body)
