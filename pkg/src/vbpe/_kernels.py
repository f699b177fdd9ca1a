"""Hot inner loops: adjacency scanning, merge replacement, NN lookup, grid sampling.

Each kernel exists twice: a loop form compiled with numba ``@njit`` and a
fallback (vectorized numpy where the operation allows it, plain Python for
the inherently sequential merge pass). The active path is chosen at import
time by the ``VBPE_NUMBA`` environment variable ("0"/"false"/"off" selects
the fallback); when numba is not importable the fallback is used silently.
Both paths must produce identical outputs; ``benchmarks/bench_kernels.py``
times them against each other.

Token grids are passed as five int32 arrays of shape (h, w): the covering
token id, the covering region's anchor row/col, and its row/col extents,
each value replicated over every cell of its region. A cell is a region
anchor iff its stored anchor equals its own coordinates.
"""

from __future__ import annotations

import os

import numpy as np


def _env_wants_numba() -> bool:
    return os.environ.get("VBPE_NUMBA", "1").strip().lower() not in (
        "0",
        "false",
        "off",
        "no",
    )


try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    njit = None
    _HAVE_NUMBA = False

NUMBA_ACTIVE = _HAVE_NUMBA and _env_wants_numba()


# ---------------------------------------------------------------------------
# adjacency scan
#
# Emits one int64 key per shape-compatible adjacency:
#     key = (left * n_ids + right) * 2 + orientation   (0 = horizontal)
# Horizontal requires the right neighbor region to be anchored at the top-
# right corner of the current region with equal row extent; vertical is the
# transpose. Overlapping occurrences are all counted.
# ---------------------------------------------------------------------------


def _scan_loop(tok, anc_r, anc_c, sh_r, sh_c, n_ids, out_keys):
    h, w = tok.shape
    n = 0
    for i in range(h):
        for j in range(w):
            if anc_r[i, j] != i or anc_c[i, j] != j:
                continue
            r = sh_r[i, j]
            c = sh_c[i, j]
            t = tok[i, j]
            j2 = j + c
            if j2 < w and anc_r[i, j2] == i and anc_c[i, j2] == j2 and sh_r[i, j2] == r:
                out_keys[n] = (np.int64(t) * n_ids + tok[i, j2]) * 2
                n += 1
            i2 = i + r
            if i2 < h and anc_r[i2, j] == i2 and anc_c[i2, j] == j and sh_c[i2, j] == c:
                out_keys[n] = (np.int64(t) * n_ids + tok[i2, j]) * 2 + 1
                n += 1
    return n


def scan_keys_numpy(tok, anc_r, anc_c, sh_r, sh_c, n_ids):
    """Vectorized adjacency scan; returns the emitted keys in raster order."""
    h, w = tok.shape
    rows = np.arange(h, dtype=np.int32)[:, None]
    cols = np.arange(w, dtype=np.int32)[None, :]
    ai, aj = np.nonzero((anc_r == rows) & (anc_c == cols))
    r = sh_r[ai, aj]
    c = sh_c[ai, aj]
    t = tok[ai, aj].astype(np.int64)

    j2 = aj + c
    hv = j2 < w
    hi, hj = ai[hv], j2[hv]
    hok = (anc_r[hi, hj] == hi) & (anc_c[hi, hj] == hj) & (sh_r[hi, hj] == r[hv])
    hkeys = (t[hv][hok] * n_ids + tok[hi, hj][hok]) * 2

    i2 = ai + r
    vv = i2 < h
    vi, vj = i2[vv], aj[vv]
    vok = (anc_r[vi, vj] == vi) & (anc_c[vi, vj] == vj) & (sh_c[vi, vj] == c[vv])
    vkeys = (t[vv][vok] * n_ids + tok[vi, vj][vok]) * 2 + 1

    # interleave back into raster order: horizontal before vertical per anchor
    order = np.concatenate([np.nonzero(hv)[0][hok] * 2, np.nonzero(vv)[0][vok] * 2 + 1])
    keys = np.concatenate([hkeys, vkeys])
    return keys[np.argsort(order, kind="stable")]


if _HAVE_NUMBA:
    _scan_loop_jit = njit(cache=True, nogil=True)(_scan_loop)
else:
    _scan_loop_jit = None


def scan_keys_loop(tok, anc_r, anc_c, sh_r, sh_c, n_ids, _impl=_scan_loop):
    out = np.empty(2 * tok.size, dtype=np.int64)
    n = _impl(tok, anc_r, anc_c, sh_r, sh_c, n_ids, out)
    return out[:n].copy()


def scan_keys_jit(tok, anc_r, anc_c, sh_r, sh_c, n_ids):
    return scan_keys_loop(tok, anc_r, anc_c, sh_r, sh_c, n_ids, _impl=_scan_loop_jit)


scan_keys = scan_keys_jit if NUMBA_ACTIVE else scan_keys_numpy


# ---------------------------------------------------------------------------
# greedy merge pass
#
# Single raster-order pass replacing (left, right) in one orientation with
# new_id. Rewriting regions in place as the scan advances realizes the
# greedy non-overlapping semantics: consumed cells stop being anchors and
# the freshly minted id can never match left or right again this pass.
# The pass is order-dependent, so there is no vectorized form; the fallback
# runs the same loop in plain Python.
# ---------------------------------------------------------------------------


def _merge_loop(tok, anc_r, anc_c, sh_r, sh_c, left, right, horizontal, new_id):
    h, w = tok.shape
    n = 0
    for i in range(h):
        for j in range(w):
            if anc_r[i, j] != i or anc_c[i, j] != j or tok[i, j] != left:
                continue
            r = sh_r[i, j]
            c = sh_c[i, j]
            if horizontal:
                j2 = j + c
                if j2 >= w or tok[i, j2] != right:
                    continue
                if anc_r[i, j2] != i or anc_c[i, j2] != j2 or sh_r[i, j2] != r:
                    continue
                nc = c + sh_c[i, j2]
                for ii in range(i, i + r):
                    for jj in range(j, j + nc):
                        tok[ii, jj] = new_id
                        anc_r[ii, jj] = i
                        anc_c[ii, jj] = j
                        sh_r[ii, jj] = r
                        sh_c[ii, jj] = nc
                n += 1
            else:
                i2 = i + r
                if i2 >= h or tok[i2, j] != right:
                    continue
                if anc_r[i2, j] != i2 or anc_c[i2, j] != j or sh_c[i2, j] != c:
                    continue
                nr = r + sh_r[i2, j]
                for ii in range(i, i + nr):
                    for jj in range(j, j + c):
                        tok[ii, jj] = new_id
                        anc_r[ii, jj] = i
                        anc_c[ii, jj] = j
                        sh_r[ii, jj] = nr
                        sh_c[ii, jj] = c
                n += 1
    return n


if _HAVE_NUMBA:
    merge_pass_jit = njit(cache=True, nogil=True)(_merge_loop)
else:
    merge_pass_jit = None

merge_pass_python = _merge_loop
merge_pass = merge_pass_jit if NUMBA_ACTIVE else merge_pass_python


# ---------------------------------------------------------------------------
# nearest codebook entry (squared Euclidean, ties -> smallest index)
# ---------------------------------------------------------------------------


def _nearest_loop(points, codebook, out):
    npts, z = points.shape
    k = codebook.shape[0]
    for i in range(npts):
        best = 0
        bestd = np.inf
        for c in range(k):
            d = 0.0
            for t in range(z):
                diff = points[i, t] - codebook[c, t]
                d += diff * diff
            if d < bestd:
                bestd = d
                best = c
        out[i] = best


def nearest_numpy(points, codebook):
    out = np.empty(points.shape[0], dtype=np.int32)
    # chunk rows so the (chunk, K, z) temporary stays small
    step = max(1, int(4e6) // max(1, codebook.size))
    for s in range(0, points.shape[0], step):
        blk = points[s : s + step]
        d = ((blk[:, None, :] - codebook[None, :, :]) ** 2).sum(axis=2)
        out[s : s + step] = d.argmin(axis=1).astype(np.int32)
    return out


if _HAVE_NUMBA:
    _nearest_loop_jit = njit(cache=True, nogil=True)(_nearest_loop)
else:
    _nearest_loop_jit = None


def nearest_jit(points, codebook):
    out = np.empty(points.shape[0], dtype=np.int32)
    _nearest_loop_jit(points, codebook, out)
    return out


nearest = nearest_jit if NUMBA_ACTIVE else nearest_numpy


# ---------------------------------------------------------------------------
# 2D Markov grid fill
#
# u holds pre-drawn uniforms, one per cell. Cell (0,0) maps its uniform
# straight onto a symbol; every other cell walks the cumulative transition
# row of its left (interior/top-row) or upper (first-column) neighbor.
# Callers must pad the last cumulative column with a value > 1.0 so the
# walk always terminates inside the row.
# ---------------------------------------------------------------------------


def _markov_loop(u, cum_right, cum_down, out):
    count, h, w = u.shape
    n = cum_right.shape[0]
    for g in range(count):
        for i in range(h):
            for j in range(w):
                uu = u[g, i, j]
                if i == 0 and j == 0:
                    s = int(uu * n)
                    if s > n - 1:
                        s = n - 1
                    out[g, i, j] = s
                else:
                    if j > 0:
                        prev = out[g, i, j - 1]
                        s = 0
                        while uu >= cum_right[prev, s]:
                            s += 1
                    else:
                        prev = out[g, i - 1, j]
                        s = 0
                        while uu >= cum_down[prev, s]:
                            s += 1
                    out[g, i, j] = s


def markov_fill_numpy(u, cum_right, cum_down):
    count, h, w = u.shape
    n = cum_right.shape[0]
    out = np.empty((count, h, w), dtype=np.int32)
    out[:, 0, 0] = np.minimum((u[:, 0, 0] * n).astype(np.int64), n - 1)
    for i in range(h):
        for j in range(w):
            if i == 0 and j == 0:
                continue
            rows = cum_right[out[:, i, j - 1]] if j > 0 else cum_down[out[:, i - 1, j]]
            out[:, i, j] = (u[:, i, j][:, None] >= rows).sum(axis=1)
    return out


if _HAVE_NUMBA:
    _markov_loop_jit = njit(cache=True, nogil=True)(_markov_loop)
else:
    _markov_loop_jit = None


def markov_fill_jit(u, cum_right, cum_down):
    out = np.empty(u.shape, dtype=np.int32)
    _markov_loop_jit(u, cum_right, cum_down, out)
    return out


markov_fill = markov_fill_jit if NUMBA_ACTIVE else markov_fill_numpy


def decode_key(key: int, n_ids: int) -> tuple[int, int, int]:
    """Invert the adjacency key encoding -> (left, right, orientation)."""
    orient = int(key) & 1
    pair = int(key) >> 1
    return pair // n_ids, pair % n_ids, orient
