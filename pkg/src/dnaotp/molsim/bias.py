"""Synthesis bias model for the random positions of a strand.

Combines a per-position base profile (optionally with linear drift
along the synthesis direction) with a short-range Markov correlation of
order up to 5.  The sampling law at position i given the previous
``corr_order`` bases c is

    P(b | i, c)  proportional to  profile[i, b] * transition[c, b]

renormalized per position, so the positional and correlation factors
multiply.  Order 0 reduces to independent positional sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..backends import njit_if_enabled

_NORM_TOL = 1e-12
MAX_CORR_ORDER = 5


@njit_if_enabled()
def _sample_kernel(cum, u, out):
    """Sequential inverse-CDF sampling with a rolling Markov context.

    cum: (L, 4**order, 4) cumulative conditional probabilities.
    u:   (n, L) uniforms; out: (n, L) base codes.
    The first ``order`` positions use an A-padded context.
    """
    n, L = u.shape
    n_ctx = cum.shape[1]
    for r in range(n):
        ctx = 0
        for i in range(L):
            x = u[r, i]
            row = cum[i, ctx]
            b = 0
            while b < 3 and x > row[b]:
                b += 1
            out[r, i] = b
            ctx = (ctx * 4 + b) % n_ctx
    return out


@dataclass(frozen=True)
class SynthesisBias:
    positional_profile: np.ndarray          # (L, 4), rows sum to 1
    corr_order: int = 0
    transition: np.ndarray = None           # (4**corr_order, 4), rows sum to 1

    def __post_init__(self):
        prof = np.asarray(self.positional_profile, dtype=np.float64)
        if prof.ndim != 2 or prof.shape[1] != 4:
            raise ValueError("positional_profile must be (L, 4)")
        if np.any(prof < 0) or np.any(np.abs(prof.sum(axis=1) - 1.0) > _NORM_TOL):
            raise ValueError("profile rows must be probabilities summing to 1")
        if not (0 <= self.corr_order <= MAX_CORR_ORDER):
            raise ValueError(f"corr_order must be in [0, {MAX_CORR_ORDER}]")
        object.__setattr__(self, "positional_profile", prof)
        if self.corr_order > 0:
            tr = np.asarray(self.transition, dtype=np.float64)
            if tr.shape != (4 ** self.corr_order, 4):
                raise ValueError("transition must be (4**corr_order, 4)")
            if np.any(tr < 0) or np.any(np.abs(tr.sum(axis=1) - 1.0) > _NORM_TOL):
                raise ValueError("transition rows must sum to 1")
            object.__setattr__(self, "transition", tr)
        elif self.transition is not None:
            raise ValueError("transition given but corr_order is 0")

    @property
    def length(self) -> int:
        return self.positional_profile.shape[0]

    def conditional_cdf(self) -> np.ndarray:
        """(L, n_ctx, 4) cumulative P(b | position, context)."""
        prof = self.positional_profile
        if self.corr_order == 0:
            cond = prof[:, None, :]
        else:
            cond = prof[:, None, :] * self.transition[None, :, :]
            cond = cond / cond.sum(axis=2, keepdims=True)
        return np.cumsum(np.ascontiguousarray(cond), axis=2)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """(count, L) random base codes drawn under the bias."""
        cum = self.conditional_cdf()
        u = rng.random((count, self.length))
        out = np.empty((count, self.length), dtype=np.uint8)
        _sample_kernel(cum, u, out)
        return out

    # ------------------------------------------------------------------
    # factories

    @classmethod
    def uniform(cls, length: int) -> "SynthesisBias":
        return cls(np.full((length, 4), 0.25))

    @classmethod
    def with_drift(cls, length: int, start, slope) -> "SynthesisBias":
        """Linear per-position drift; rows renormalized after clipping."""
        start = np.asarray(start, dtype=np.float64)
        slope = np.asarray(slope, dtype=np.float64)
        pos = np.arange(length)[:, None]
        prof = np.clip(start[None, :] + pos * slope[None, :], 1e-6, None)
        prof /= prof.sum(axis=1, keepdims=True)
        return cls(prof)

    @classmethod
    def nanopore_like(cls, length: int, corr_order: int = 1) -> "SynthesisBias":
        """Qualitative default: mild unbalanced profile with a weak drift
        and a slight same-base (homopolymer) preference."""
        start = np.array([0.27, 0.22, 0.26, 0.25])
        slope = np.array([-0.0003, 0.0001, -0.0001, 0.0003])
        prof = cls.with_drift(length, start, slope).positional_profile
        if corr_order == 0:
            return cls(prof)
        n_ctx = 4 ** corr_order
        tr = np.full((n_ctx, 4), 0.25)
        for c in range(n_ctx):
            last = c % 4
            tr[c] += 0.02 * (np.arange(4) == last) - 0.02 / 3 * (np.arange(4) != last)
        tr /= tr.sum(axis=1, keepdims=True)
        return cls(prof, corr_order=corr_order, transition=tr)
