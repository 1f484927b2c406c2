"""GF(2^m) arithmetic via exp/log tables, m in [4, 16].

Primitive polynomials are fixed constants from the standard published
table (Lin & Costello appendix); one per field degree.
"""

from __future__ import annotations

import numpy as np

# degree -> primitive polynomial, bit i = coefficient of x^i
PRIMITIVE_POLYS = {
    4: 0x13,      # x^4 + x + 1
    5: 0x25,      # x^5 + x^2 + 1
    6: 0x43,      # x^6 + x + 1
    7: 0x89,      # x^7 + x^3 + 1
    8: 0x11D,     # x^8 + x^4 + x^3 + x^2 + 1
    9: 0x211,     # x^9 + x^4 + 1
    10: 0x409,    # x^10 + x^3 + 1
    11: 0x805,    # x^11 + x^2 + 1
    12: 0x1053,   # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,   # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,   # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,   # x^15 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}

_FIELD_CACHE = {}


class GF2m:
    """Tables for GF(2^m) with alpha a root of the primitive polynomial."""

    def __init__(self, m: int):
        if m not in PRIMITIVE_POLYS:
            raise ValueError(f"unsupported field degree {m} (supported: 4..16)")
        self.m = m
        self.n = (1 << m) - 1
        poly = PRIMITIVE_POLYS[m]
        exp = np.zeros(2 * self.n, dtype=np.int64)
        log = np.zeros(self.n + 1, dtype=np.int64)
        x = 1
        for i in range(self.n):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & (1 << m):
                x ^= poly
        if x != 1:
            raise AssertionError("polynomial is not primitive")
        exp[self.n:] = exp[:self.n]  # wraparound to skip mod in hot loops
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^m)")
        return int(self.exp[self.n - self.log[a]])

    def pow_alpha(self, e: int) -> int:
        return int(self.exp[e % self.n])


def field(m: int) -> GF2m:
    if m not in _FIELD_CACHE:
        _FIELD_CACHE[m] = GF2m(m)
    return _FIELD_CACHE[m]


def cyclotomic_coset(i: int, n: int) -> tuple:
    """Coset of i under doubling mod n, returned sorted."""
    out = []
    x = i % n
    while x not in out:
        out.append(x)
        x = (2 * x) % n
    return tuple(sorted(out))


def poly_mul_gf(a, b, gf: GF2m):
    """Multiply polynomials with GF(2^m) coefficients (lists, a[i] ~ x^i)."""
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] ^= gf.mul(ai, bj)
    return out


def minimal_polynomial(coset, gf: GF2m):
    """prod_{j in coset} (x - alpha^j); coefficients end up in GF(2)."""
    poly = [1]
    for j in coset:
        poly = poly_mul_gf(poly, [gf.pow_alpha(j), 1], gf)
    assert all(c in (0, 1) for c in poly), "minimal polynomial not binary"
    return poly
