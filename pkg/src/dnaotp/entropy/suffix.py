"""Suffix-array statistics for tuple-count estimators.

The t-tuple and longest-repeated-substring estimators need, for every
tuple length W: the count of the most common W-tuple, and the number of
unordered pairs of positions holding identical W-tuples.  Both drop out
of the LCP array: sorted-suffix runs with all intermediate LCP >= W are
exactly the W-tuple equivalence classes.
"""

from __future__ import annotations

import numpy as np

from ..backends import njit_if_enabled


def suffix_array(s: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling (numpy lexsort)."""
    s = np.asarray(s, dtype=np.int64)
    n = s.size
    rank = s.copy()
    k = 1
    while True:
        rank2 = np.full(n, -1, dtype=np.int64)
        if k < n:
            rank2[:n - k] = rank[k:]
        order = np.lexsort((rank2, rank))
        newrank = np.empty(n, dtype=np.int64)
        newrank[order[0]] = 0
        diff = (rank[order[1:]] != rank[order[:-1]]) | \
               (rank2[order[1:]] != rank2[order[:-1]])
        newrank[order[1:]] = np.cumsum(diff)
        rank = newrank
        if rank[order[-1]] == n - 1:
            return order
        k *= 2


@njit_if_enabled()
def _kasai_kernel(s, sa, rank, lcp):
    n = s.shape[0]
    h = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sa[r + 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1


def lcp_array(s: np.ndarray, sa: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.int64)
    n = s.size
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(max(n - 1, 0), dtype=np.int64)
    if n > 1:
        _kasai_kernel(s, sa, rank, lcp)
    return lcp


@njit_if_enabled()
def _span_kernel(lcp, max_count_at, pair_count_at):
    """All-nearest-smaller-values sweep over the LCP array.

    For each position j, with window (prev, next) where lcp[j] is the
    leftmost minimum, records:
      max_count_at[v]  = max over j with lcp[j]==v of (window length + 1)
      pair_count_at[v] += (j - prev) * (next - j)  (suffix pairs with LCP
                                                    exactly min v there)
    """
    n = lcp.shape[0]
    stack_pos = np.empty(n, dtype=np.int64)
    stack_val = np.empty(n, dtype=np.int64)
    prev = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    # leftmost-minimum convention: left extent blocked by values <= v,
    # right extent blocked by values < v, so ties are counted exactly once
    # (and the first element of an equal-value run sees the full window).
    top = -1
    for j in range(n):
        while top >= 0 and stack_val[top] > lcp[j]:
            top -= 1
        prev[j] = stack_pos[top] if top >= 0 else -1
        top += 1
        stack_pos[top] = j
        stack_val[top] = lcp[j]
    top = -1
    for j in range(n - 1, -1, -1):
        while top >= 0 and stack_val[top] >= lcp[j]:
            top -= 1
        nxt[j] = stack_pos[top] if top >= 0 else n
        top += 1
        stack_pos[top] = j
        stack_val[top] = lcp[j]
    for j in range(n):
        v = lcp[j]
        window = nxt[j] - prev[j] - 1
        if window + 1 > max_count_at[v]:
            max_count_at[v] = window + 1
        pair_count_at[v] += (j - prev[j]) * (nxt[j] - j)


@njit_if_enabled()
def _windows64(sym, sym_bits):
    """Sliding 64-bit windows over symbols, first symbol at the MSB end."""
    n = sym.shape[0]
    per = 64 // sym_bits
    out = np.empty(n - per + 1, dtype=np.uint64)
    shift = np.uint64(sym_bits)
    w = np.uint64(0)
    for i in range(per - 1):
        w = (w << shift) | np.uint64(sym[i])
    for i in range(per - 1, n):
        w = (w << shift) | np.uint64(sym[i])
        out[i - per + 1] = w
    return out


@njit_if_enabled()
def _bit_lcp(sorted_windows, lcp, sym_bits):
    """Common-prefix length in symbols of consecutive sorted windows."""
    n = sorted_windows.shape[0]
    per = 64 // sym_bits
    for i in range(n - 1):
        x = sorted_windows[i] ^ sorted_windows[i + 1]
        if x == np.uint64(0):
            lcp[i] = per
        else:
            c = 0
            while (x >> np.uint64(63)) == np.uint64(0):
                x <<= np.uint64(1)
                c += 1
            lcp[i] = c // sym_bits


def _window_lcp(sym: np.ndarray, sym_bits: int):
    """LCP array over sorted 64-bit windows, or None when repeats may
    exceed 63 bits (duplicate windows) and the full suffix array is needed.

    Trailing suffixes shorter than one window are not covered, which
    undercounts tuples whose occurrences all touch the tail; near-ideal
    inputs never repeat that long, and the duplicate-window guard
    forces the exact path in every case where longer repeats exist.
    """
    per = 64 // sym_bits
    win = _windows64(np.ascontiguousarray(sym, dtype=np.uint8), sym_bits)
    win.sort(kind="stable")
    lcp = np.empty(win.size - 1, dtype=np.int64)
    _bit_lcp(win, lcp, sym_bits)
    if int(lcp.max(initial=0)) >= per:
        return None
    return lcp


# below this length the exact suffix array is cheap; above it the
# windowed fast path avoids the prefix-doubling memory blow-up
_WINDOW_FASTPATH_MIN = 4_000_000


class TupleStats:
    """Q[W] (most-common W-tuple count) and pair counts from one pass."""

    def __init__(self, sym: np.ndarray, sym_bits: int = 1):
        self.length = int(np.asarray(sym).size)
        if self.length < 2:
            self.max_lcp = 0
            self._q = np.array([self.length], dtype=np.int64)
            self._pairs = np.array([0], dtype=np.int64)
            return
        lcp = None
        if self.length >= _WINDOW_FASTPATH_MIN:
            lcp = _window_lcp(sym, sym_bits)
        if lcp is None:
            s = np.asarray(sym, dtype=np.int64)
            sa = suffix_array(s)
            lcp = lcp_array(s, sa)
        vmax = int(lcp.max(initial=0))
        self.max_lcp = vmax
        max_count_at = np.zeros(vmax + 1, dtype=np.int64)
        pair_count_at = np.zeros(vmax + 1, dtype=np.int64)
        _span_kernel(lcp, max_count_at, pair_count_at)
        # Q[W] = suffix max over v >= W; pairs[W] = suffix sum over v >= W
        q = np.maximum.accumulate(max_count_at[::-1])[::-1]
        self._q = np.maximum(q, 1)
        self._pairs = np.cumsum(pair_count_at[::-1])[::-1]

    def most_common_count(self, w: int) -> int:
        """Occurrences of the most common w-tuple."""
        if w <= 0:
            raise ValueError("tuple length must be positive")
        if w > self.max_lcp:
            return 1 if w <= self.length else 0
        return int(self._q[w])

    def identical_pairs(self, w: int) -> int:
        """Unordered position pairs whose w-tuples are identical."""
        if w <= 0:
            raise ValueError("tuple length must be positive")
        if w > self.max_lcp:
            return 0
        return int(self._pairs[w])
