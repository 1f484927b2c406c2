"""Code-parameter selection for a target decryption failure rate.

Given the estimated channel error rate, pick the (m, t) pair minimizing
transmitted bits subject to

    block_count * P[Bin(n, p_safe) > t] <= dfr_target

with p_safe a one-sided 99.9% upper confidence bound on the estimate
and the binomial tail evaluated in arbitrary precision (mpmath).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from scipy import stats

from . import gf as gflib
from .bch import BchCode

DFR_DEFAULT = 2.0 ** -128
_K_CACHE = {}


class NoFeasibleCode(ValueError):
    pass


def bch_dimension(m: int, t: int) -> int:
    """Message length k of BCH(2^m - 1, t) from cyclotomic coset sizes."""
    if (m, t) in _K_CACHE:
        return _K_CACHE[(m, t)]
    n = (1 << m) - 1
    seen = set()
    deg = 0
    for i in range(1, 2 * t + 1):
        coset = gflib.cyclotomic_coset(i, n)
        if coset not in seen:
            seen.add(coset)
            deg += len(coset)
    k = n - deg
    _K_CACHE[(m, t)] = k
    return k


def binomial_tail_gt(n: int, t: int, p: float, dps: int = 60) -> mpmath.mpf:
    """P[Bin(n, p) > t], exact tail via the regularized incomplete beta."""
    if p <= 0.0:
        return mpmath.mpf(0)
    if p >= 1.0:
        return mpmath.mpf(1)
    if t >= n:
        return mpmath.mpf(0)
    with mpmath.workdps(dps):
        return mpmath.betainc(t + 1, n - t, 0, mpmath.mpf(p), regularized=True)


def upper_confidence_p(p_est: float, sample_bits=None, mismatches=None,
                       confidence: float = 0.999) -> float:
    """One-sided upper confidence bound on the channel error rate.

    With observation counts available, the exact Clopper-Pearson bound;
    otherwise a fixed multiplicative safety margin on the point estimate.
    """
    if sample_bits:
        k = mismatches if mismatches is not None else round(p_est * sample_bits)
        if k >= sample_bits:
            return 1.0
        return float(stats.beta.ppf(confidence, k + 1, sample_bits - k))
    return p_est * 2.0 if p_est > 0 else 0.0


@dataclass
class CodeSelection:
    code: BchCode
    block_count: int
    p_safe: float
    per_block_dfr: float
    total_dfr_bound: float
    total_bits: int

    @property
    def overhead(self) -> float:
        return self.code.overhead


def select_params(p_est: float, plaintext_bits: int,
                  dfr_target: float = DFR_DEFAULT,
                  sample_bits=None, mismatches=None,
                  m_range=(4, 16), t_max: int = 256,
                  safety: str = "auto",
                  total_bits_max: int = None) -> CodeSelection:
    """Smallest-overhead BCH meeting the failure-rate target.

    Searches field degrees in ``m_range`` and error capacities up to
    ``t_max``, minimizing the total transmitted bits for the payload.
    ``safety="none"`` treats p_est as the safe rate directly (no
    confidence margin); default applies the 99.9% upper bound.
    ``total_bits_max`` caps blocks*n (e.g. the remaining mask budget).
    """
    if not (0.0 <= p_est < 0.5):
        raise ValueError("p_est must lie in [0, 0.5)")
    if plaintext_bits < 1:
        raise ValueError("plaintext_bits must be >= 1")
    if safety == "none":
        p_safe = p_est
    else:
        p_safe = upper_confidence_p(p_est, sample_bits, mismatches)
    if p_safe >= 0.5:
        raise NoFeasibleCode("confidence-adjusted error rate >= 0.5")

    best = None
    for m in range(m_range[0], m_range[1] + 1):
        n = (1 << m) - 1
        for t in range(0, t_max + 1):
            k = bch_dimension(m, t)
            if k <= 0:
                break
            blocks = math.ceil(plaintext_bits / k)
            tail = binomial_tail_gt(n, t, p_safe)
            if float(blocks * tail) > dfr_target:
                continue
            total = blocks * n
            if total_bits_max is not None and total > total_bits_max:
                break
            if best is None or total < best[0]:
                best = (total, m, t, k, blocks, float(tail))
            break  # larger t for this m only adds overhead
    if best is None:
        raise NoFeasibleCode(
            f"no BCH code with m in {m_range} meets DFR {dfr_target:g} "
            f"at p_safe={p_safe:g}")
    total, m, t, k, blocks, tail = best
    code = BchCode(m=m, t=t)
    assert code.k == k
    return CodeSelection(code=code, block_count=blocks, p_safe=p_safe,
                         per_block_dfr=tail, total_dfr_bound=blocks * tail,
                         total_bits=total)
