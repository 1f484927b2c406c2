"""Base-level sequence utilities.

Bases are encoded as uint8: A=0, C=1, G=2, T=3.  Purines are A and G.
A fifth code N=4 marks wildcard/unknown positions (template references,
deletion placeholders).
"""

from __future__ import annotations

import numpy as np

BASES = "ACGTN"
A, C, G, T, N = 0, 1, 2, 3, 4

_CODE = np.full(256, 255, dtype=np.uint8)
for _i, _b in enumerate(BASES):
    _CODE[ord(_b)] = _i
    _CODE[ord(_b.lower())] = _i

# complement map: A<->T, C<->G, N->N
_COMP = np.array([3, 2, 1, 0, 4], dtype=np.uint8)

PHRED_OFFSET = 33


def encode(s: str) -> np.ndarray:
    """String of ACGTN -> uint8 codes."""
    arr = _CODE[np.frombuffer(s.encode("ascii"), dtype=np.uint8)]
    if arr.max(initial=0) == 255:
        bad = s[int(np.argmax(arr == 255))]
        raise ValueError(f"invalid base {bad!r}")
    return arr


def decode(codes: np.ndarray) -> str:
    return "".join(BASES[c] for c in codes)


def revcomp(codes: np.ndarray) -> np.ndarray:
    return _COMP[codes][::-1]


def revcomp_str(s: str) -> str:
    return decode(revcomp(encode(s)))


def revcomp_matrix(mat: np.ndarray) -> np.ndarray:
    """Row-wise reverse complement of a base-code matrix."""
    return _COMP[mat][:, ::-1]


def quals_to_ascii(quals: np.ndarray) -> str:
    return bytes((np.asarray(quals, dtype=np.int64) + PHRED_OFFSET).astype(np.uint8)).decode("ascii")


def ascii_to_quals(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8).astype(np.int16) - PHRED_OFFSET


def pack_bits(bits: np.ndarray) -> bytes:
    """Pack a 0/1 array into bytes, MSB-first; trailing pad bits zero."""
    bits = np.asarray(bits, dtype=np.uint8)
    return np.packbits(bits).tobytes()


def unpack_bits(data: bytes, n_bits: int) -> np.ndarray:
    out = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if n_bits > out.size:
        raise ValueError("bit length exceeds packed data")
    return out[:n_bits]
