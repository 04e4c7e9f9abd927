"""Hot loops, compiled with numba when available.

Every kernel has a pure-numpy twin with the same signature. Setting the
environment variable ``RECAPTURE_DISABLE_NUMBA=1`` (or running without numba
installed) selects the numpy versions. ``USING_NUMBA`` reports the choice.
"""

from __future__ import annotations

import os

import numpy as np

_disabled = os.environ.get("RECAPTURE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
try:
    if _disabled:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - exercised by the env flag
    njit = None

USING_NUMBA = njit is not None

# sort-key packing for the implicit last layer: length | prefix rank | middle | right rank
RANK_BITS = 20
PREFIX_BITS = 22
MID_BITS = 3
MAX_LENGTH = 1 << 10


def pack_key(length, prefix_rank, mid, right_rank):
    return ((length * (1 << PREFIX_BITS) + prefix_rank) * (1 << MID_BITS) + mid) * (
        1 << RANK_BITS
    ) + right_rank


# --------------------------------------------------------------------------
# numpy reference versions


def compose_binary_np(table, left, right):
    """``out[i, j, v] = table[left[i, v], right[j, v]]``."""
    return table[left[:, None, :], right[None, :, :]]


def forcing_imp_np(x, y, succ):
    """Kripke implication for every pair of rows.

    ``x`` and ``y`` are (m1, W) and (m2, W) boolean forcing tables over the
    worlds of a model family; ``succ[w]`` lists the worlds above ``w``, padded
    by repeating ``w``. Returns (m1, m2, W).
    """
    bad = x[:, None, :] & ~y[None, :, :]
    return ~bad[:, :, succ].any(axis=-1)


def mask_valid_np(states, succs):
    """``out[s, t]`` iff every bit of ``states[s]`` is also set in ``succs[t]``."""
    leak = states[:, None, :] & ~succs[None, :, :]
    return ~leak.any(axis=-1)


def binary_layer_scan_np(table, kidx, depth, length, lexrank, prefix_rank, overhead, mid,
                         last_depth, counts, best, arg, tag):
    """Fold every binary application in the last layer into per-key counts,
    minimum packed sort key and the (tag, i, j) that attains it."""
    m = len(kidx)
    newest = depth == last_depth
    block = max(1, (1 << 22) // max(m, 1))
    for lo in range(0, m, block):
        hi = min(m, lo + block)
        rows = np.arange(lo, hi)
        keep = newest[rows][:, None] | newest[None, :]
        ii, jj = np.nonzero(keep)
        ii = ii + lo
        keys = table[kidx[ii], kidx[jj]]
        sk = pack_key(
            (length[ii] + length[jj] + overhead).astype(np.int64),
            prefix_rank[ii].astype(np.int64), mid, lexrank[jj].astype(np.int64),
        )
        np.add.at(counts, keys, 1)
        before = best.copy()
        np.minimum.at(best, keys, sk)
        changed = np.nonzero(best != before)[0]
        if len(changed):
            hit = np.isin(keys, changed) & (sk == best[keys])
            arg[keys[hit]] = (tag << 40) | (ii[hit].astype(np.int64) << 20) | jj[hit]


# --------------------------------------------------------------------------
# numba versions

if USING_NUMBA:

    @njit(cache=True)
    def compose_binary_nb(table, left, right):
        m1, v = left.shape
        m2 = right.shape[0]
        out = np.empty((m1, m2, v), dtype=table.dtype)
        for i in range(m1):
            for j in range(m2):
                for k in range(v):
                    out[i, j, k] = table[left[i, k], right[j, k]]
        return out

    @njit(cache=True)
    def forcing_imp_nb(x, y, succ):
        m1, w = x.shape
        m2 = y.shape[0]
        fan = succ.shape[1]
        out = np.empty((m1, m2, w), dtype=np.bool_)
        for i in range(m1):
            for j in range(m2):
                for a in range(w):
                    ok = True
                    for b in range(fan):
                        v = succ[a, b]
                        if x[i, v] and not y[j, v]:
                            ok = False
                            break
                    out[i, j, a] = ok
        return out

    @njit(cache=True)
    def mask_valid_nb(states, succs):
        s, words = states.shape
        t = succs.shape[0]
        out = np.empty((s, t), dtype=np.bool_)
        for a in range(s):
            for b in range(t):
                ok = True
                for k in range(words):
                    if states[a, k] & ~succs[b, k]:
                        ok = False
                        break
                out[a, b] = ok
        return out

    @njit(cache=True)
    def binary_layer_scan_nb(table, kidx, depth, length, lexrank, prefix_rank, overhead, mid,
                             last_depth, counts, best, arg, tag):
        m = kidx.shape[0]
        scale_p = np.int64(1) << PREFIX_BITS
        scale_m = np.int64(1) << MID_BITS
        scale_r = np.int64(1) << RANK_BITS
        for i in range(m):
            new_i = depth[i] == last_depth
            ki = kidx[i]
            li = np.int64(length[i] + overhead)
            pi = np.int64(prefix_rank[i])
            for j in range(m):
                if not new_i and depth[j] != last_depth:
                    continue
                k = table[ki, kidx[j]]
                counts[k] += 1
                sk = (((li + length[j]) * scale_p + pi) * scale_m + mid) * scale_r + lexrank[j]
                if sk < best[k]:
                    best[k] = sk
                    arg[k] = (np.int64(tag) << 40) | (np.int64(i) << 20) | j

    compose_binary = compose_binary_nb
    forcing_imp = forcing_imp_nb
    mask_valid = mask_valid_nb
    binary_layer_scan = binary_layer_scan_nb
else:
    compose_binary = compose_binary_np
    forcing_imp = forcing_imp_np
    mask_valid = mask_valid_np
    binary_layer_scan = binary_layer_scan_np


def implementations() -> dict[str, dict[str, object]]:
    """Both variants of each kernel, for tests and benchmarks."""
    out: dict[str, dict[str, object]] = {
        "numpy": {
            "compose_binary": compose_binary_np,
            "forcing_imp": forcing_imp_np,
            "mask_valid": mask_valid_np,
            "binary_layer_scan": binary_layer_scan_np,
        }
    }
    if USING_NUMBA:
        out["numba"] = {
            "compose_binary": compose_binary_nb,
            "forcing_imp": forcing_imp_nb,
            "mask_valid": mask_valid_nb,
            "binary_layer_scan": binary_layer_scan_nb,
        }
    return out
