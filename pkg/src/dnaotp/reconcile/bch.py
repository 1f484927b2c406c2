"""Binary BCH codec: systematic encoding, syndrome decoding with
Berlekamp-Massey and Chien search.

Bit convention: a length-n codeword array c has c[i] as the coefficient
of x^(n-1-i), so c[0..k-1] is the message and c[k..n-1] the parity.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from ..backends import njit_if_enabled
from . import gf as gflib


class DecodeFailure(Exception):
    """More errors than the code can locate; never silent corruption."""


@njit_if_enabled()
def _encode_kernel(msg, gen, nk, out_parity):
    # CRC-style LFSR division: parity = x^(n-k) * m(x) mod g(x)
    reg = np.zeros(nk, dtype=np.uint8)
    for i in range(msg.shape[0]):
        fb = msg[i] ^ reg[0]
        for j in range(nk - 1):
            reg[j] = reg[j + 1]
        reg[nk - 1] = 0
        if fb:
            for j in range(nk):
                reg[j] ^= gen[nk - 1 - j]
    for j in range(nk):
        out_parity[j] = reg[j]


@njit_if_enabled()
def _syndromes_kernel(bits, n, two_t, exp, log, out):
    # S_j = r(alpha^j), j = 1..2t; r_i is the coefficient of x^(n-1-i)
    for j in range(1, two_t + 1):
        s = 0
        for i in range(n):
            if bits[i]:
                s ^= exp[(j * (n - 1 - i)) % n]
        out[j - 1] = s


@njit_if_enabled()
def _berlekamp_massey_kernel(synd, two_t, n, exp, log, sigma):
    # Returns L (degree of error locator) or -1 on structural failure.
    t_cap = two_t // 2
    C = np.zeros(two_t + 2, dtype=np.int64)
    B = np.zeros(two_t + 2, dtype=np.int64)
    T = np.zeros(two_t + 2, dtype=np.int64)
    C[0] = 1
    B[0] = 1
    L = 0
    m = 1
    b = 1
    for step in range(two_t):
        d = synd[step]
        for i in range(1, L + 1):
            if C[i] != 0 and synd[step - i] != 0:
                d ^= exp[log[C[i]] + log[synd[step - i]]]
        if d == 0:
            m += 1
        elif 2 * L <= step:
            for i in range(two_t + 2):
                T[i] = C[i]
            coef = exp[(log[d] + n - log[b]) % n]
            for i in range(two_t + 2 - m):
                if B[i] != 0:
                    C[i + m] ^= exp[log[coef] + log[B[i]]]
            L = step + 1 - L
            for i in range(two_t + 2):
                B[i] = T[i]
            b = d
            m = 1
        else:
            coef = exp[(log[d] + n - log[b]) % n]
            for i in range(two_t + 2 - m):
                if B[i] != 0:
                    C[i + m] ^= exp[log[coef] + log[B[i]]]
            m += 1
    if L > t_cap:
        return -1
    # degree check: highest nonzero coefficient must be at L
    deg = 0
    for i in range(two_t + 1):
        if C[i] != 0:
            deg = i
    if deg != L:
        return -1
    for i in range(L + 1):
        sigma[i] = C[i]
    return L


@njit_if_enabled()
def _chien_kernel(sigma, L, n, exp, log, err_pos):
    # Roots of sigma among alpha^j give error positions e = n - j (mod n)
    # in polynomial coordinates; returns number of roots found.
    nerr = 0
    terms = np.zeros(L + 1, dtype=np.int64)
    for i in range(L + 1):
        terms[i] = sigma[i]
    for j in range(n):
        s = 0
        for i in range(L + 1):
            s ^= terms[i]
        if s == 0:
            e = (n - j) % n
            if nerr < L:
                err_pos[nerr] = n - 1 - e  # bit-array index
            nerr += 1
        # multiply term i by alpha^i for the next j
        for i in range(1, L + 1):
            if terms[i] != 0:
                terms[i] = exp[(log[terms[i]] + i) % n]
    return nerr


def _poly_divides_gf2(g: np.ndarray, n: int) -> bool:
    """Check g(x) | x^n - 1 over GF(2), g given as g[i] = coeff x^i."""
    # long division of x^n + 1 by g
    rem = np.zeros(n + 1, dtype=np.uint8)
    rem[0] = 1
    rem[n] = 1
    dg = len(g) - 1
    for sh in range(n - dg, -1, -1):
        if rem[sh + dg]:
            rem[sh:sh + dg + 1] ^= g
    return not rem.any()


@dataclass
class BchCode:
    m: int
    t: int
    n: int = dc_field(init=False)
    k: int = dc_field(init=False)
    generator_poly: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        gfield = gflib.field(self.m)
        self.n = gfield.n
        if self.t < 0:
            raise ValueError("t must be >= 0")
        if self.t == 0:
            self.generator_poly = np.array([1], dtype=np.uint8)
            self.k = self.n
            self._gf = gfield
            return
        cosets = set()
        for i in range(1, 2 * self.t + 1):
            cosets.add(gflib.cyclotomic_coset(i, self.n))
        gen = [1]
        for coset in sorted(cosets):
            gen = gflib.poly_mul_gf(gen, gflib.minimal_polynomial(coset, gfield), gfield)
        self.generator_poly = np.array(gen, dtype=np.uint8)
        self.k = self.n - (len(gen) - 1)
        if self.k <= 0:
            raise ValueError(f"BCH(m={self.m}, t={self.t}) has no message bits")
        if not _poly_divides_gf2(self.generator_poly, self.n):
            raise AssertionError("generator does not divide x^n - 1")
        self._gf = gfield

    @property
    def parity_bits(self) -> int:
        return self.n - self.k

    @property
    def overhead(self) -> float:
        return self.parity_bits / self.n

    def encode(self, msg_bits: np.ndarray) -> np.ndarray:
        msg = np.asarray(msg_bits, dtype=np.uint8)
        if msg.size != self.k:
            raise ValueError(f"message must have {self.k} bits")
        out = np.empty(self.n, dtype=np.uint8)
        out[:self.k] = msg
        if self.t == 0:
            return out
        parity = np.zeros(self.parity_bits, dtype=np.uint8)
        _encode_kernel(msg, self.generator_poly, self.parity_bits, parity)
        out[self.k:] = parity
        return out

    def decode(self, received: np.ndarray):
        """Return (message bits, number of corrections).

        Raises DecodeFailure when the error pattern is detectably beyond
        the correction capability.
        """
        r = np.asarray(received, dtype=np.uint8)
        if r.size != self.n:
            raise ValueError(f"block must have {self.n} bits")
        if self.t == 0:
            return r[:self.k].copy(), 0
        gfield = self._gf
        synd = np.zeros(2 * self.t, dtype=np.int64)
        _syndromes_kernel(r, self.n, 2 * self.t, gfield.exp, gfield.log, synd)
        if not synd.any():
            return r[:self.k].copy(), 0
        sigma = np.zeros(2 * self.t + 2, dtype=np.int64)
        L = _berlekamp_massey_kernel(synd, 2 * self.t, self.n,
                                     gfield.exp, gfield.log, sigma)
        if L < 0:
            raise DecodeFailure("error locator degree mismatch")
        err_pos = np.zeros(max(L, 1), dtype=np.int64)
        nroots = _chien_kernel(sigma, L, self.n, gfield.exp, gfield.log, err_pos)
        if nroots != L:
            raise DecodeFailure("root count does not match locator degree")
        corrected = r.copy()
        corrected[err_pos[:L]] ^= 1
        # verify: corrected word must have zero syndromes
        _syndromes_kernel(corrected, self.n, 2 * self.t, gfield.exp, gfield.log, synd)
        if synd.any():
            raise DecodeFailure("correction did not cancel syndromes")
        return corrected[:self.k].copy(), L
