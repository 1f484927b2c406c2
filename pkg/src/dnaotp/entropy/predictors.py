"""Sequential kernels for the prediction-style estimators and the other
order-dependent scans (collision parsing, compression distances).

These are the hot loops of entropy assessment; they compile under numba
and run as plain python when the fallback backend is selected.  All
kernels return (correct_count, longest_run, n_predictions).
"""

from __future__ import annotations

import numpy as np

from ..backends import njit_if_enabled


@njit_if_enabled()
def collision_times(bits):
    """Sequence of per-collision sample counts (2 or 3 for binary)."""
    n = bits.shape[0]
    out = np.empty(n // 2 + 1, dtype=np.int64)
    v = 0
    i = 0
    while True:
        if i + 1 >= n:
            break
        if bits[i] == bits[i + 1]:
            out[v] = 2
            v += 1
            i += 2
        else:
            if i + 2 >= n:
                break
            out[v] = 3
            v += 1
            i += 3
    return out[:v]


@njit_if_enabled()
def compression_distances(blocks, d):
    """Maurer-style dictionary distances D_i for i > d (1-based blocks)."""
    n = blocks.shape[0]
    last = np.full(64, -1, dtype=np.int64)
    for i in range(d):
        last[blocks[i]] = i + 1
    out = np.empty(n - d, dtype=np.int64)
    for i in range(d, n):
        b = blocks[i]
        pos = i + 1
        if last[b] < 0:
            out[i - d] = pos
        else:
            out[i - d] = pos - last[b]
        last[b] = pos
    return out


@njit_if_enabled()
def multi_mcw_predict(bits):
    """Most-common-in-window prediction, windows 63/255/1023/4095."""
    n = bits.shape[0]
    w = np.array([63, 255, 1023, 4095], dtype=np.int64)
    ones = np.zeros(4, dtype=np.int64)
    scoreboard = np.zeros(4, dtype=np.int64)
    winner = 0
    correct = 0
    run = 0
    longest = 0
    npred = 0
    for i in range(63, n):  # 0-based: first prediction for position 63
        # window counts for each subpredictor covering s[i-w .. i-1]
        frequent = np.full(4, -1, dtype=np.int64)
        for j in range(4):
            if i >= w[j]:
                if i == w[j]:
                    c = 0
                    for u in range(i):
                        c += bits[u]
                    ones[j] = c
                c1 = ones[j]
                c0 = w[j] - c1
                if c1 > c0:
                    frequent[j] = 1
                elif c1 < c0:
                    frequent[j] = 0
                else:
                    frequent[j] = bits[i - 1]  # tie: most recent value
        npred += 1
        if frequent[winner] == bits[i]:
            correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
        for j in range(4):
            if frequent[j] == bits[i]:
                scoreboard[j] += 1
                if scoreboard[j] >= scoreboard[winner]:
                    winner = j
        # slide windows (cast first: uint8 - uint8 wraps under numpy
        # scalar rules, which would corrupt the fallback backend)
        for j in range(4):
            if i >= w[j]:
                ones[j] += np.int64(bits[i]) - np.int64(bits[i - w[j]])
    return correct, longest, npred


@njit_if_enabled()
def lag_predict(bits, d_max=128):
    n = bits.shape[0]
    scoreboard = np.zeros(d_max, dtype=np.int64)
    winner = 0
    correct = 0
    run = 0
    longest = 0
    npred = 0
    for i in range(1, n):  # first prediction for the second sample
        npred += 1
        wlag = winner + 1
        if i >= wlag and bits[i - wlag] == bits[i]:
            correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
        jmax = d_max if i >= d_max else i
        for j in range(jmax):
            if bits[i - (j + 1)] == bits[i]:
                scoreboard[j] += 1
                if scoreboard[j] >= scoreboard[winner]:
                    winner = j
    return correct, longest, npred


@njit_if_enabled()
def multi_mmc_predict(bits, d_max=16):
    n = bits.shape[0]
    # counts[d] laid out flat: context (d bits) * 2 + next_symbol
    offs = np.zeros(d_max + 1, dtype=np.int64)
    total = 0
    for d in range(1, d_max + 1):
        offs[d] = total
        total += (1 << d) * 2
    counts = np.zeros(total, dtype=np.int64)
    ctx = np.zeros(d_max + 1, dtype=np.int64)    # rolling context per depth
    scoreboard = np.zeros(d_max, dtype=np.int64)
    winner = 0
    correct = 0
    run = 0
    longest = 0
    npred = 0
    for i in range(n):
        if i >= 2:
            npred += 1
            predicted = False
            # winner's prediction
            d = winner + 1
            if i >= d:
                base = offs[d] + ctx[d] * 2
                c0 = counts[base]
                c1 = counts[base + 1]
                if c0 > 0 or c1 > 0:
                    pred = 1 if c1 > c0 else 0
                    if pred == bits[i]:
                        predicted = True
            if predicted:
                correct += 1
                run += 1
                if run > longest:
                    longest = run
            else:
                run = 0
            for j in range(d_max):
                d = j + 1
                if i >= d:
                    base = offs[d] + ctx[d] * 2
                    c0 = counts[base]
                    c1 = counts[base + 1]
                    if c0 > 0 or c1 > 0:
                        pred = 1 if c1 > c0 else 0
                        if pred == bits[i]:
                            scoreboard[j] += 1
                            if scoreboard[j] >= scoreboard[winner]:
                                winner = j
        # update models with the observed transition, then roll contexts
        for d in range(1, d_max + 1):
            if i >= d:
                base = offs[d] + ctx[d] * 2
                counts[base + bits[i]] += 1
        for d in range(d_max, 1, -1):
            ctx[d] = ((ctx[d] << 1) | bits[i]) & ((1 << d) - 1)
        ctx[1] = bits[i]
    return correct, longest, npred


@njit_if_enabled()
def lz78y_predict(bits, b_max=16, max_dict=65536):
    n = bits.shape[0]
    offs = np.zeros(b_max + 1, dtype=np.int64)
    total = 0
    for j in range(1, b_max + 1):
        offs[j] = total
        total += 1 << j
    counts = np.zeros(total * 2, dtype=np.int64)
    present = np.zeros(total, dtype=np.uint8)
    dict_size = 0
    correct = 0
    run = 0
    longest = 0
    npred = 0
    for i in range(b_max + 1, n):  # 0-based; first prediction at i = B+1
        # add substrings ending at position i-1 (suffixes of s[i-B-1 .. i-2])
        for j in range(b_max, 0, -1):
            ctx = 0
            for u in range(i - 1 - j, i - 1):
                ctx = (ctx << 1) | int(bits[u])
            key = offs[j] + ctx
            if present[key]:
                counts[key * 2 + bits[i - 1]] += 1
            elif dict_size < max_dict:
                present[key] = 1
                counts[key * 2 + bits[i - 1]] += 1
                dict_size += 1
        # predict s[i] from the longest-to-shortest contexts, keep max count
        npred += 1
        best_count = -1
        pred = -1
        ctx = 0
        for u in range(i - b_max, i):
            ctx = (ctx << 1) | int(bits[u])
        c = ctx
        for j in range(b_max, 0, -1):
            key = offs[j] + (c & ((1 << j) - 1))
            if present[key]:
                c0 = counts[key * 2]
                c1 = counts[key * 2 + 1]
                y = 1 if c1 > c0 else 0
                cy = c1 if c1 > c0 else c0
                if cy > best_count:
                    best_count = cy
                    pred = y
        if pred == bits[i]:
            correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
    return correct, longest, npred


@njit_if_enabled()
def longest_run_of_ones(arr):
    run = 0
    longest = 0
    for i in range(arr.shape[0]):
        if arr[i]:
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
    return longest


# ---------------------------------------------------------------------------
# general-alphabet kernels (byte symbols), used by the non-binary track

@njit_if_enabled()
def _hash_mix(x):
    """splitmix64 finalizer; deterministic 64-bit mixing."""
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@njit_if_enabled()
def _table_slot(keys, key):
    """Open-addressing lookup; returns slot of key or of the first empty."""
    mask = np.uint64(keys.shape[0] - 1)
    slot = _hash_mix(key) & mask
    while True:
        k = keys[slot]
        if k == key or k == np.uint64(0):
            return slot
        slot = (slot + np.uint64(1)) & mask


@njit_if_enabled()
def multi_mcw_predict_bytes(sym):
    """MultiMCW prediction for 8-bit symbols, windows 63/255/1023/4095."""
    n = sym.shape[0]
    w = np.array([63, 255, 1023, 4095], dtype=np.int64)
    counts = np.zeros((4, 256), dtype=np.int64)
    cur_max = np.zeros(4, dtype=np.int64)
    cur_sym = np.full(4, -1, dtype=np.int64)
    scoreboard = np.zeros(4, dtype=np.int64)
    winner = 0
    correct = 0
    run = 0
    longest = 0
    npred = 0
    for i in range(n):
        if i >= 63:
            npred += 1
            if cur_sym[winner] == sym[i]:
                correct += 1
                run += 1
                if run > longest:
                    longest = run
            else:
                run = 0
            for j in range(4):
                if i >= w[j] and cur_sym[j] == sym[i]:
                    scoreboard[j] += 1
                    if scoreboard[j] >= scoreboard[winner]:
                        winner = j
        # slide each full window, then append sym[i]
        for j in range(4):
            if i >= w[j]:
                old = sym[i - w[j]]
                counts[j, old] -= 1
                if old == cur_sym[j]:
                    # recompute: highest count, most recent wins ties
                    m = 0
                    for v in range(256):
                        if counts[j, v] > m:
                            m = counts[j, v]
                    cur_max[j] = m
                    for u in range(i - 1, i - w[j], -1):
                        if counts[j, sym[u]] == m:
                            cur_sym[j] = sym[u]
                            break
            c = counts[j, sym[i]] + 1
            counts[j, sym[i]] = c
            if c >= cur_max[j]:
                cur_max[j] = c
                cur_sym[j] = sym[i]
    return correct, longest, npred


@njit_if_enabled()
def multi_mmc_predict_bytes(sym, d_max=16, max_ctx=100000):
    """MultiMMC prediction for 8-bit symbols.

    Depths 1-2 use flat count arrays (all contexts fit under the cap);
    deeper models use open-addressing hash tables capped at ``max_ctx``
    tracked contexts per depth, as the assessment methodology requires.
    """
    n = sym.shape[0]
    c1 = np.zeros(256 * 256, dtype=np.int64)          # d=1: ctx*256+sym
    b1 = np.zeros(256 * 2, dtype=np.int64)            # best count, best sym
    c2 = np.zeros(256 * 256 * 256, dtype=np.int32)    # d=2
    b2 = np.zeros(256 * 256 * 2, dtype=np.int64)
    # hash tables for depths >= 3: ctx table stores packed best, pair
    # table stores counts per (depth, ctx, sym)
    ctx_keys = np.zeros(1 << 22, dtype=np.uint64)
    ctx_best = np.zeros(1 << 22, dtype=np.int64)      # (count << 9) | sym
    pair_keys = np.zeros(1 << 23, dtype=np.uint64)
    pair_cnt = np.zeros(1 << 23, dtype=np.int64)
    n_ctx = np.zeros(d_max + 1, dtype=np.int64)
    P = np.uint64(0x100000001B3)
    pows = np.empty(d_max + 1, dtype=np.uint64)
    pows[0] = np.uint64(1)
    for d in range(1, d_max + 1):
        pows[d] = pows[d - 1] * P
    scoreboard = np.zeros(d_max, dtype=np.int64)
    winner = 0
    correct = 0
    run = 0
    longest = 0
    npred = 0
    for i in range(n):
        if i >= 2:
            npred += 1
            # rolling context hashes: h_d covers sym[i-d .. i-1]
            h = np.uint64(0)
            ok = False
            dwin = winner + 1
            for d in range(1, d_max + 1):
                if i < d:
                    break
                h = h + np.uint64(sym[i - d] + 1) * pows[d]
                pred = -1
                if d == 1:
                    if b1[sym[i - 1] * 2] > 0:
                        pred = b1[sym[i - 1] * 2 + 1]
                elif d == 2:
                    ctx = sym[i - 2] * 256 + sym[i - 1]
                    if b2[ctx * 2] > 0:
                        pred = b2[ctx * 2 + 1]
                else:
                    key = _hash_mix(h ^ (np.uint64(d) << np.uint64(56)))
                    if key == np.uint64(0):
                        key = np.uint64(1)
                    slot = _table_slot(ctx_keys, key)
                    if ctx_keys[slot] == key and ctx_best[slot] > 0:
                        pred = ctx_best[slot] & 511
                hit = pred == sym[i]
                if d == dwin:
                    ok = hit
                if pred >= 0 and hit:
                    scoreboard[d - 1] += 1
                    if scoreboard[d - 1] >= scoreboard[winner]:
                        winner = d - 1
            if ok:
                correct += 1
                run += 1
                if run > longest:
                    longest = run
            else:
                run = 0
        # update the models with the transition ending at sym[i]
        s = sym[i]
        h = np.uint64(0)
        for d in range(1, d_max + 1):
            if i < d:
                break
            h = h + np.uint64(sym[i - 1 - (d - 1)] + 1) * pows[d]
            if d == 1:
                ctx = sym[i - 1]
                c = c1[ctx * 256 + s] + 1
                c1[ctx * 256 + s] = c
                if c > b1[ctx * 2]:
                    b1[ctx * 2] = c
                    b1[ctx * 2 + 1] = s
            elif d == 2:
                ctx = sym[i - 2] * 256 + sym[i - 1]
                c = np.int64(c2[ctx * 256 + s]) + 1
                c2[ctx * 256 + s] = np.int32(c)
                if c > b2[ctx * 2]:
                    b2[ctx * 2] = c
                    b2[ctx * 2 + 1] = s
            else:
                key = _hash_mix(h ^ (np.uint64(d) << np.uint64(56)))
                if key == np.uint64(0):
                    key = np.uint64(1)
                slot = _table_slot(ctx_keys, key)
                if ctx_keys[slot] != key:
                    if n_ctx[d] >= max_ctx:
                        continue
                    ctx_keys[slot] = key
                    n_ctx[d] += 1
                pkey = _hash_mix(key ^ np.uint64(s + 1))
                if pkey == np.uint64(0):
                    pkey = np.uint64(1)
                pslot = _table_slot(pair_keys, pkey)
                if pair_keys[pslot] != pkey:
                    pair_keys[pslot] = pkey
                c = pair_cnt[pslot] + 1
                pair_cnt[pslot] = c
                if c > (ctx_best[slot] >> 9):
                    ctx_best[slot] = (c << 9) | s
    return correct, longest, npred


@njit_if_enabled()
def lz78y_predict_bytes(sym, b_max=16, max_dict=65536):
    """LZ78Y prediction for 8-bit symbols with the 65536-entry cap."""
    n = sym.shape[0]
    ctx_keys = np.zeros(1 << 18, dtype=np.uint64)
    ctx_best = np.zeros(1 << 18, dtype=np.int64)      # (count << 9) | sym
    pair_keys = np.zeros(1 << 20, dtype=np.uint64)
    pair_cnt = np.zeros(1 << 20, dtype=np.int64)
    dict_size = 0
    P = np.uint64(0x100000001B3)
    pows = np.empty(b_max + 2, dtype=np.uint64)
    pows[0] = np.uint64(1)
    for d in range(1, b_max + 2):
        pows[d] = pows[d - 1] * P
    correct = 0
    run = 0
    longest = 0
    npred = 0
    for i in range(b_max + 1, n):
        # add suffixes of sym[i-j-1 .. i-2] -> sym[i-1] for j = b_max..1
        s = sym[i - 1]
        h = np.uint64(0)
        for j in range(1, b_max + 1):
            h = h + np.uint64(sym[i - 1 - j] + 1) * pows[j]
            key = _hash_mix(h ^ (np.uint64(j) << np.uint64(56)))
            if key == np.uint64(0):
                key = np.uint64(1)
            slot = _table_slot(ctx_keys, key)
            known = ctx_keys[slot] == key
            if not known:
                if dict_size >= max_dict:
                    continue
                ctx_keys[slot] = key
                dict_size += 1
            pkey = _hash_mix(key ^ np.uint64(s + 1))
            if pkey == np.uint64(0):
                pkey = np.uint64(1)
            pslot = _table_slot(pair_keys, pkey)
            if pair_keys[pslot] != pkey:
                pair_keys[pslot] = pkey
            c = pair_cnt[pslot] + 1
            pair_cnt[pslot] = c
            if c > (ctx_best[slot] >> 9):
                ctx_best[slot] = (c << 9) | s
        # predict sym[i]: deepest-first, strictly higher count wins
        npred += 1
        best_count = np.int64(0)
        pred = -1
        h = np.uint64(0)
        for j in range(1, b_max + 1):
            h = h + np.uint64(sym[i - j] + 1) * pows[j]
            key = _hash_mix(h ^ (np.uint64(j) << np.uint64(56)))
            if key == np.uint64(0):
                key = np.uint64(1)
            slot = _table_slot(ctx_keys, key)
            if ctx_keys[slot] == key:
                c = ctx_best[slot] >> 9
                # shallower contexts override only with strictly more
                if c > best_count:
                    best_count = c
                    pred = ctx_best[slot] & 511
        if pred == sym[i]:
            correct += 1
            run += 1
            if run > longest:
                longest = run
        else:
            run = 0
    return correct, longest, npred
