"""Exhaustive subset scans over all ``2**n`` project selections.

Selections are encoded as integer masks with project 0 in the most
significant bit, so increasing mask order is lexicographic order of the
0-1 selection vector and "smallest mask" is the documented tie-break.

A mask is split into a high part (first ``n - L`` projects) and a low part
(last ``L`` projects). Per-part subset-sum tables make every mask O(1):
``cost[mask] = hi_cost[hi] + lo_cost[lo]``.

After-tax profit is computed in exact integers: money in tenths of a unit,
rates as ``keep = (1 - rate) * denom``, so ``z1_scaled = R * keep`` (or
``R * denom`` when ``R <= 0``).
"""

from __future__ import annotations

import numpy as np

from .._accel import jitable, njit, resolve_backend

LOW_BITS = 16
ZW_SLACK = 1e-12


def subset_table(values: np.ndarray) -> np.ndarray:
    """Sums over all subsets of ``values``; ``values[0]`` maps to the top bit."""
    table = np.zeros(1, dtype=values.dtype)
    for v in values[::-1]:
        table = np.concatenate([table, table + v])
    return table


def split_tables(arrays: dict) -> tuple:
    n = arrays["cost"].shape[0]
    low = min(n, LOW_BITS)
    hi_n = n - low
    tabs = []
    for key in ("cost", "profit", "pref"):
        v = arrays[key]
        tabs.append(subset_table(v[:hi_n]))
        tabs.append(subset_table(v[hi_n:]))
    return low, tabs


# ---------------------------------------------------------------------------
# loop kernels (compiled when numba is available)
# ---------------------------------------------------------------------------

@jitable
def _z1_scaled(r, uppers, keep, denom):
    if r <= 0:
        return r * denom
    b = 0
    for u in uppers:
        if r >= u:
            b += 1
        else:
            break
    return r * keep[b]


def _extrema_loop(low, hc, lc, hp, lp, hu, lu, budget, uppers, keep, denom):
    best1 = np.int64(0)
    best2 = 0.0
    nfeas = 0
    for hi in range(hc.shape[0]):
        c0 = hc[hi]
        if c0 > budget:
            continue
        for lo in range(lc.shape[0]):
            if c0 + lc[lo] > budget:
                continue
            nfeas += 1
            z1 = _z1_scaled(hp[hi] + lp[lo], uppers, keep, denom)
            if z1 > best1:
                best1 = z1
            z2 = hu[hi] + lu[lo]
            if z2 > best2:
                best2 = z2
    return best1, best2, nfeas


@jitable
def _zw(z1, z2, w, z1star, z2star):
    d1 = 0.0
    if z1star != 0:
        d1 = (z1star - z1) / z1star
    d2 = 0.0
    if z2star != 0.0:
        d2 = (z2star - z2) / z2star
    return w * d1 + (1.0 - w) * d2


def _argmin_loop(low, hc, lc, hp, lp, hu, lu, budget, uppers, keep, denom, w, z1star, z2star, slack):
    best = np.inf
    for hi in range(hc.shape[0]):
        c0 = hc[hi]
        if c0 > budget:
            continue
        for lo in range(lc.shape[0]):
            if c0 + lc[lo] > budget:
                continue
            z1 = _z1_scaled(hp[hi] + lp[lo], uppers, keep, denom)
            v = _zw(z1, hu[hi] + lu[lo], w, z1star, z2star)
            if v < best:
                best = v
    # second pass: first (lexicographically smallest) mask within slack
    for hi in range(hc.shape[0]):
        c0 = hc[hi]
        if c0 > budget:
            continue
        for lo in range(lc.shape[0]):
            if c0 + lc[lo] > budget:
                continue
            z1 = _z1_scaled(hp[hi] + lp[lo], uppers, keep, denom)
            v = _zw(z1, hu[hi] + lu[lo], w, z1star, z2star)
            if v <= best + slack:
                return best, (np.int64(hi) << low) | lo
    return best, np.int64(-1)


_extrema_jit = njit(_extrema_loop)
_argmin_jit = njit(_argmin_loop)


# ---------------------------------------------------------------------------
# vectorised numpy path
# ---------------------------------------------------------------------------

def z1_scaled_vec(r: np.ndarray, uppers: np.ndarray, keep: np.ndarray, denom: int) -> np.ndarray:
    b = np.searchsorted(uppers, r, side="right")
    return np.where(r > 0, r * keep[b], r * denom)


def _iter_chunks(low, tabs, budget):
    hc, lc, hp, lp, hu, lu = tabs
    for hi in range(hc.shape[0]):
        cost = hc[hi] + lc
        ok = cost <= budget
        if not ok.any():
            continue
        idx = np.flatnonzero(ok)
        yield hi, idx, hp[hi] + lp[idx], hu[hi] + lu[idx]


def _extrema_numpy(low, tabs, budget, uppers, keep, denom):
    best1, best2, nfeas = 0, 0.0, 0
    for _, idx, r, z2 in _iter_chunks(low, tabs, budget):
        z1 = z1_scaled_vec(r, uppers, keep, denom)
        best1 = max(best1, int(z1.max()))
        best2 = max(best2, float(z2.max()))
        nfeas += idx.size
    return best1, best2, nfeas


def _zw_vec(z1, z2, w, z1star, z2star):
    d1 = (z1star - z1) / z1star if z1star != 0 else np.zeros(z1.shape)
    d2 = (z2star - z2) / z2star if z2star != 0.0 else np.zeros(z2.shape)
    return w * d1 + (1.0 - w) * d2


def _argmin_numpy(low, tabs, budget, uppers, keep, denom, w, z1star, z2star, slack):
    chunks = []
    best = np.inf
    for hi, idx, r, z2 in _iter_chunks(low, tabs, budget):
        v = _zw_vec(z1_scaled_vec(r, uppers, keep, denom), z2, w, z1star, z2star)
        best = min(best, float(v.min()))
        chunks.append((hi, idx, v))
    for hi, idx, v in chunks:
        hit = np.flatnonzero(v <= best + slack)
        if hit.size:
            return best, (hi << low) | int(idx[hit[0]])
    return best, -1


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def scan_extrema(arrays: dict, backend: str = "auto") -> tuple[int, float, int]:
    """Max scaled ``z1``, max ``z2`` and feasible count over all selections."""
    low, tabs = split_tables(arrays)
    args = (arrays["budget"], arrays["uppers"], arrays["keep"], arrays["denom"])
    if resolve_backend(backend) == "numba":
        b1, b2, nf = _extrema_jit(low, *tabs, *args)
        return int(b1), float(b2), int(nf)
    return _extrema_numpy(low, tabs, *args)


def scan_argmin(arrays: dict, w: float, z1star: int, z2star: float,
                backend: str = "auto", slack: float = ZW_SLACK) -> tuple[float, int]:
    """Minimum weighted deviation and the smallest mask attaining it."""
    low, tabs = split_tables(arrays)
    args = (arrays["budget"], arrays["uppers"], arrays["keep"], arrays["denom"])
    if resolve_backend(backend) == "numba":
        best, mask = _argmin_jit(low, *tabs, *args, float(w), np.int64(z1star), float(z2star), slack)
        return float(best), int(mask)
    return _argmin_numpy(low, tabs, *args, float(w), int(z1star), float(z2star), slack)


def feasible_points(arrays: dict):
    """Yield ``(masks, z1_scaled, z2)`` for feasible selections, chunk by chunk."""
    low, tabs = split_tables(arrays)
    uppers, keep, denom = arrays["uppers"], arrays["keep"], arrays["denom"]
    for hi, idx, r, z2 in _iter_chunks(low, tabs, arrays["budget"]):
        masks = (np.int64(hi) << low) | idx.astype(np.int64)
        yield masks, z1_scaled_vec(r, uppers, keep, denom), z2


def mask_to_selection(mask: int, n: int) -> tuple[bool, ...]:
    return tuple(bool((mask >> (n - 1 - i)) & 1) for i in range(n))


def selection_to_mask(selection) -> int:
    m = 0
    for x in selection:
        m = (m << 1) | int(bool(x))
    return m
