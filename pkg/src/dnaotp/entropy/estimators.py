"""The ten non-IID min-entropy estimators (binary, 1-bit symbols).

Each estimator returns min-entropy in bits per bit, in [0, 1], with the
99% upper-confidence adjustments the assessment methodology prescribes.
Estimators that structurally cannot run on a given input (e.g. tuple
counts below the cutoff) return NaN and are excluded from the minimum.
"""

from __future__ import annotations

import math

import numpy as np

from .predictors import (collision_times, compression_distances, lag_predict,
                         lz78y_predict, lz78y_predict_bytes, multi_mcw_predict,
                         multi_mcw_predict_bytes, multi_mmc_predict,
                         multi_mmc_predict_bytes)
from .suffix import TupleStats

Z_99 = 2.576  # one-sided 99% normal quantile used throughout
TUPLE_CUTOFF = 35


def _clamp01(h: float) -> float:
    return min(max(h, 0.0), 1.0)


# ---------------------------------------------------------------------------
# frequency / counting estimators

def most_common_value(bits: np.ndarray) -> float:
    L = bits.size
    counts = np.bincount(bits, minlength=2)
    p_hat = counts.max() / L
    p_u = min(1.0, p_hat + Z_99 * math.sqrt(p_hat * (1 - p_hat) / (L - 1)))
    return _clamp01(-math.log2(p_u))


def _collision_mean_eq(p: float) -> float:
    """Expected collision time for Bernoulli(p) with p >= 1/2."""
    q = 1.0 - p
    # F(q) = Gamma(3, 1/q) * q^-3... reduces to q + 2q^2 + 2q^3 exactly
    Fq = q + 2 * q * q + 2 * q ** 3
    if q == 0.0:
        return 2.0
    term = 0.5 * (1.0 / p - 1.0 / q)
    return p / (q * q) * (1.0 + term) * Fq - (p / q) * term


def collision(bits: np.ndarray) -> float:
    ts = collision_times(np.ascontiguousarray(bits, dtype=np.uint8))
    v = ts.size
    if v < 2:
        return math.nan
    x_bar = float(ts.mean())
    sigma = float(ts.std(ddof=1))
    x_prime = x_bar - Z_99 * sigma / math.sqrt(v)
    # mean collision time is decreasing in the bias p; no solution in
    # [1/2, 1) means the estimator grants full entropy
    lo, hi = 0.5, 1.0 - 1e-12
    if x_prime >= _collision_mean_eq(lo):
        return 1.0
    if x_prime <= _collision_mean_eq(hi):
        return _clamp01(-math.log2(hi))
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _collision_mean_eq(mid) > x_prime:
            lo = mid
        else:
            hi = mid
    return _clamp01(-math.log2(lo))


def markov(bits: np.ndarray) -> float:
    L = bits.size
    c = np.bincount(bits, minlength=2)
    p0, p1 = c[0] / L, c[1] / L
    pairs = bits[:-1].astype(np.int64) * 2 + bits[1:]
    tc = np.bincount(pairs, minlength=4).astype(float)
    row0 = tc[0] + tc[1]
    row1 = tc[2] + tc[3]
    p00 = tc[0] / row0 if row0 else 0.0
    p01 = tc[1] / row0 if row0 else 0.0
    p10 = tc[2] / row1 if row1 else 0.0
    p11 = tc[3] / row1 if row1 else 0.0

    def lg(x):
        return math.log2(x) if x > 0 else -math.inf

    seqs = [
        lg(p0) + 127 * lg(p00),
        lg(p0) + 64 * lg(p01) + 63 * lg(p10),
        lg(p0) + lg(p01) + 126 * lg(p11),
        lg(p1) + lg(p10) + 126 * lg(p00),
        lg(p1) + 64 * lg(p10) + 63 * lg(p01),
        lg(p1) + 127 * lg(p11),
    ]
    best = max(seqs)
    if best == -math.inf:
        return 1.0
    return _clamp01(min(-best / 128.0, 1.0))


def _compression_g(z: float, d: int, n_blocks: int) -> float:
    """(1/v) sum_{t=d+1}^{n} sum_{u=1}^{t} log2(u) F(z,t,u)."""
    v = n_blocks - d
    if z <= 0.0:
        return 0.0
    u = np.arange(1, n_blocks + 1, dtype=np.float64)
    log1mz = math.log1p(-z) if z < 1.0 else -math.inf
    if math.isinf(log1mz):
        return 0.0  # log2(1) * z * 1 terms only, all zero
    pow_terms = np.exp((u - 1) * log1mz)
    log2u = np.log2(u)
    c = log2u * pow_terms                      # log2(u) (1-z)^(u-1)
    prefix = np.cumsum(c)
    ts = np.arange(d + 1, n_blocks + 1)
    inner = z * z * prefix[ts - 2] + z * c[ts - 1]  # u<t plus u=t term
    return float(inner.sum() / v)


def compression(bits: np.ndarray, d: int = 1000) -> float:
    L = bits.size
    n_blocks = L // 6
    if n_blocks <= d + 1:
        return math.nan
    blocks = np.ascontiguousarray(
        bits[:n_blocks * 6].reshape(n_blocks, 6) @ (1 << np.arange(5, -1, -1)),
        dtype=np.int64)
    dist = compression_distances(blocks, d)
    logd = np.log2(dist.astype(np.float64))
    v = dist.size
    x_bar = float(logd.mean())
    c_const = 0.5907
    sigma = c_const * float(logd.std(ddof=1))
    x_prime = x_bar - Z_99 * sigma / math.sqrt(v)

    def expected(p):
        q = (1.0 - p) / 63.0
        return _compression_g(p, d, n_blocks) + 63.0 * _compression_g(q, d, n_blocks)

    lo, hi = 1.0 / 64.0, 1.0 - 1e-9
    if x_prime >= expected(lo):
        return 1.0
    if x_prime <= expected(hi):
        return _clamp01(-math.log2(hi) / 6.0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if expected(mid) > x_prime:
            lo = mid
        else:
            hi = mid
    return _clamp01(-math.log2(lo) / 6.0)


def t_tuple(bits: np.ndarray, stats: TupleStats = None) -> float:
    L = bits.size
    if stats is None:
        stats = TupleStats(bits)
    if stats.most_common_count(1) < TUPLE_CUTOFF:
        return math.nan
    p_hat = 0.0
    i = 1
    while True:
        q = stats.most_common_count(i)
        if q < TUPLE_CUTOFF:
            break
        p_hat = max(p_hat, (q / (L - i + 1)) ** (1.0 / i))
        i += 1
    p_u = min(1.0, p_hat + Z_99 * math.sqrt(p_hat * (1 - p_hat) / (L - 1)))
    return _clamp01(-math.log2(p_u))


def lrs(bits: np.ndarray, stats: TupleStats = None) -> float:
    L = bits.size
    if stats is None:
        stats = TupleStats(bits)
    u = 1
    while stats.most_common_count(u) >= TUPLE_CUTOFF:
        u += 1
    v = stats.max_lcp
    if v < u:
        return math.nan
    p_hat = 0.0
    for w in range(u, v + 1):
        npos = L - w + 1
        denom = npos * (npos - 1) / 2.0
        p_w = stats.identical_pairs(w) / denom
        p_hat = max(p_hat, p_w ** (1.0 / w))
    p_u = min(1.0, p_hat + Z_99 * math.sqrt(p_hat * (1 - p_hat) / (L - 1)))
    return _clamp01(-math.log2(p_u))


# ---------------------------------------------------------------------------
# prediction estimators

def _p_local(longest_run: int, n_pred: int) -> float:
    """99% bound on per-prediction success rate given the longest run."""
    r = longest_run + 1
    target = 0.99

    def no_run_prob(p):
        q = 1.0 - p
        if p <= 0.0:
            return 1.0
        if p >= 1.0:
            return 0.0
        x = 1.0
        for _ in range(30):
            x = 1.0 + q * (p ** r) * (x ** (r + 1))
        try:
            return (1.0 - p * x) / ((r + 1 - r * x) * q) / (x ** (n_pred + 1))
        except (OverflowError, ZeroDivisionError):
            return 0.0

    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if no_run_prob(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _prediction_entropy(correct: int, longest_run: int, n_pred: int,
                        sym_bits: int = 1) -> float:
    if n_pred < 2:
        return math.nan
    p_global = correct / n_pred
    if correct == 0:
        p_global_u = 1.0 - 0.01 ** (1.0 / n_pred)
    else:
        p_global_u = min(1.0, p_global + Z_99 * math.sqrt(
            p_global * (1 - p_global) / (n_pred - 1)))
    p_local = _p_local(longest_run, n_pred)
    p = max(p_global_u, p_local, 2.0 ** -sym_bits)
    h = min(max(-math.log2(p), 0.0), float(sym_bits))
    return h / sym_bits


def multi_mcw(bits: np.ndarray) -> float:
    if bits.size < 64 + 2:
        return math.nan
    return _prediction_entropy(*multi_mcw_predict(
        np.ascontiguousarray(bits, dtype=np.uint8)))


def lag(bits: np.ndarray) -> float:
    if bits.size < 3:
        return math.nan
    return _prediction_entropy(*lag_predict(
        np.ascontiguousarray(bits, dtype=np.uint8)))


def multi_mmc(bits: np.ndarray) -> float:
    if bits.size < 4:
        return math.nan
    return _prediction_entropy(*multi_mmc_predict(
        np.ascontiguousarray(bits, dtype=np.uint8)))


def lz78y(bits: np.ndarray) -> float:
    if bits.size < 20:
        return math.nan
    return _prediction_entropy(*lz78y_predict(
        np.ascontiguousarray(bits, dtype=np.uint8)))


# ---------------------------------------------------------------------------
# byte-symbol variants (non-binary track); values reported per bit

def most_common_value_bytes(sym: np.ndarray) -> float:
    L = sym.size
    p_hat = np.bincount(sym, minlength=256).max() / L
    p_u = min(1.0, p_hat + Z_99 * math.sqrt(p_hat * (1 - p_hat) / (L - 1)))
    return min(max(-math.log2(p_u), 0.0), 8.0) / 8.0


def t_tuple_bytes(sym: np.ndarray, stats: TupleStats = None) -> float:
    L = sym.size
    if stats is None:
        stats = TupleStats(sym, sym_bits=8)
    if stats.most_common_count(1) < TUPLE_CUTOFF:
        return math.nan
    p_hat = 0.0
    i = 1
    while True:
        q = stats.most_common_count(i)
        if q < TUPLE_CUTOFF:
            break
        p_hat = max(p_hat, (q / (L - i + 1)) ** (1.0 / i))
        i += 1
    p_u = min(1.0, p_hat + Z_99 * math.sqrt(p_hat * (1 - p_hat) / (L - 1)))
    return min(max(-math.log2(p_u), 0.0), 8.0) / 8.0


def lrs_bytes(sym: np.ndarray, stats: TupleStats = None) -> float:
    L = sym.size
    if stats is None:
        stats = TupleStats(sym, sym_bits=8)
    u = 1
    while stats.most_common_count(u) >= TUPLE_CUTOFF:
        u += 1
    v = stats.max_lcp
    if v < u:
        return math.nan
    p_hat = 0.0
    for w in range(u, v + 1):
        npos = L - w + 1
        p_w = stats.identical_pairs(w) / (npos * (npos - 1) / 2.0)
        p_hat = max(p_hat, p_w ** (1.0 / w))
    p_u = min(1.0, p_hat + Z_99 * math.sqrt(p_hat * (1 - p_hat) / (L - 1)))
    return min(max(-math.log2(p_u), 0.0), 8.0) / 8.0


def multi_mcw_bytes(sym: np.ndarray) -> float:
    if sym.size < 64 + 2:
        return math.nan
    return _prediction_entropy(*multi_mcw_predict_bytes(
        np.ascontiguousarray(sym, dtype=np.uint8)), sym_bits=8)


def lag_bytes(sym: np.ndarray) -> float:
    if sym.size < 3:
        return math.nan
    return _prediction_entropy(*lag_predict(
        np.ascontiguousarray(sym, dtype=np.uint8)), sym_bits=8)


def multi_mmc_bytes(sym: np.ndarray) -> float:
    if sym.size < 4:
        return math.nan
    return _prediction_entropy(*multi_mmc_predict_bytes(
        np.ascontiguousarray(sym, dtype=np.uint8)), sym_bits=8)


def lz78y_bytes(sym: np.ndarray) -> float:
    if sym.size < 20:
        return math.nan
    return _prediction_entropy(*lz78y_predict_bytes(
        np.ascontiguousarray(sym, dtype=np.uint8)), sym_bits=8)


ESTIMATOR_NAMES = (
    "most_common_value", "collision", "markov", "compression",
    "t_tuple", "lrs", "multi_mcw", "lag", "multi_mmc", "lz78y",
)
