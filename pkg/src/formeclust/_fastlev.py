"""Compiled edit-distance kernels.

The pairwise matrix is the pipeline hot spot (O(n^2) unit pairs, each a
Levenshtein run over pixel-width sequences), so the inner loops live here
as numba-compiled functions. ``myers_distance`` is the bit-parallel block
algorithm (64 DP columns per machine word); ``lev_two_row`` is the plain
dynamic program kept as an in-tree cross-check.

All functions are exact integer computations: results are independent of
thread count and identical run to run.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_ONE = np.uint64(1)
_TOPBIT = np.uint64(63)


@njit(cache=True)
def lev_two_row(a, b):  # pragma: no cover - exercised via tests
    """Textbook DP with two rows, O(min(|a|,|b|)) memory."""
    if a.shape[0] < b.shape[0]:
        a, b = b, a
    m, n = a.shape[0], b.shape[0]
    if n == 0:
        return m
    prev = np.arange(n + 1, dtype=np.int64)
    cur = np.empty(n + 1, dtype=np.int64)
    for i in range(1, m + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, n + 1):
            sub = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            ins = cur[j - 1] + 1
            dele = prev[j] + 1
            best = sub
            if ins < best:
                best = ins
            if dele < best:
                best = dele
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]


@njit(cache=True)
def _build_peq(seq, alphabet, blocks):
    peq = np.zeros((alphabet, blocks), dtype=np.uint64)
    for i in range(seq.shape[0]):
        peq[seq[i], i >> 6] |= _ONE << np.uint64(i & 63)
    return peq


@njit(cache=True)
def _myers_core(peq, m, text):
    """Block bit-parallel Levenshtein of the pattern behind ``peq`` vs ``text``.

    Horizontal deltas (+1/0/-1) carry between 64-bit blocks; the running
    score tracks the DP cell at the last pattern row.
    """
    n = text.shape[0]
    blocks = (m + 63) >> 6
    vp = np.empty(blocks, dtype=np.uint64)
    vn = np.zeros(blocks, dtype=np.uint64)
    for t in range(blocks):
        vp[t] = ~np.uint64(0)
    score = m
    last = blocks - 1
    score_mask = _ONE << np.uint64((m - 1) & 63)
    for j in range(n):
        c = text[j]
        hin = 1
        for t in range(blocks):
            eq = peq[c, t]
            pv = vp[t]
            mv = vn[t]
            xv = eq | mv
            if hin < 0:
                eq |= _ONE
            xh = (((eq & pv) + pv) ^ pv) | eq
            ph = mv | ~(xh | pv)
            mh = pv & xh
            if t == last:
                if ph & score_mask:
                    score += 1
                elif mh & score_mask:
                    score -= 1
            hout = 0
            if ph >> _TOPBIT:
                hout = 1
            elif mh >> _TOPBIT:
                hout = -1
            ph = ph << _ONE
            mh = mh << _ONE
            if hin > 0:
                ph |= _ONE
            elif hin < 0:
                mh |= _ONE
            vp[t] = mh | ~(xv | ph)
            vn[t] = ph & xv
            hin = hout
    return score


@njit(cache=True)
def myers_distance(a, b):
    """Levenshtein distance between two dense-coded symbol arrays."""
    m, n = a.shape[0], b.shape[0]
    if m == 0:
        return n
    if n == 0:
        return m
    alphabet = 0
    for i in range(m):
        if a[i] >= alphabet:
            alphabet = a[i] + 1
    for j in range(n):
        if b[j] >= alphabet:
            alphabet = b[j] + 1
    peq = _build_peq(a, alphabet, (m + 63) >> 6)
    return _myers_core(peq, m, b)


@njit(cache=True)
def _slot_distance(symbols, start_i, len_i, start_j, len_j, normalize):
    """Distance for one aligned slot pair; negative length marks an absent title."""
    if len_i < 0 and len_j < 0:
        return 0.0
    if len_i < 0 or len_j < 0:
        worst = len_j if len_i < 0 else len_i
        return 1.0 if (normalize and worst > 0) else float(worst)
    d = float(myers_distance(symbols[start_i:start_i + len_i], symbols[start_j:start_j + len_j]))
    if normalize:
        longest = max(len_i, len_j)
        if longest > 0:
            d /= longest
    return d


@njit(cache=True, parallel=True)
def pairwise_distances(symbols, starts, lengths, p, normalize):
    """Symmetric unit-distance matrix under the p-norm slot reduction.

    symbols   flat int64 array holding every title's code sequence
    starts    (n_units, n_slots) offsets into ``symbols``
    lengths   (n_units, n_slots); -1 marks an absent title
    p         norm order; any non-finite value means the max norm

    Each (i, j) cell is computed independently by exactly one task, so the
    fill is bitwise identical for any worker count.
    """
    n_units, n_slots = starts.shape
    out = np.zeros((n_units, n_units), dtype=np.float64)
    use_max = not np.isfinite(p)
    for i in prange(n_units):
        for j in range(i + 1, n_units):
            acc = 0.0
            peak = 0.0
            for k in range(n_slots):
                d = _slot_distance(symbols, starts[i, k], lengths[i, k],
                                   starts[j, k], lengths[j, k], normalize)
                if use_max:
                    if d > peak:
                        peak = d
                else:
                    acc += d ** p
            val = peak if use_max else acc ** (1.0 / p)
            out[i, j] = val
            out[j, i] = val
    return out
