"""Deterministic best-worst method in its original minimax ratio form.

For a fixed tolerance ``xi`` every constraint links only two weights
(best and j, or j and worst), so after fixing ``w_worst = 1`` and
``w_best = t`` each remaining weight lives in an interval that depends on
``t`` alone. The linear feasibility problem at ``xi`` therefore collapses to
a non-empty interval test ``L(xi) <= t <= U(xi)``, which bisection then
drives to the smallest feasible ``xi``.
"""

from __future__ import annotations

import numpy as np

from .types import BestWorstPreference, WeightResult

MAX_BISECTION_STEPS = 200
CONSISTENCY_TOL = 1e-6


class BWMConvergenceError(RuntimeError):
    pass


def bwm_objective(weights, pref: BestWorstPreference) -> float:
    """``max_j max(|w_B/w_j - a_Bj|, |w_j/w_W - a_jW|)``; inf if a weight is 0."""
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        return float("inf")
    a_b = np.asarray(pref.a_best, dtype=float)
    a_w = np.asarray(pref.a_worst, dtype=float)
    dev_b = np.abs(w[pref.best] / w - a_b)
    dev_w = np.abs(w / w[pref.worst] - a_w)
    return float(max(dev_b.max(), dev_w.max()))


def _others(pref: BestWorstPreference):
    return [j for j in range(pref.n) if j not in (pref.best, pref.worst)]


def _t_interval(pref: BestWorstPreference, xi: float) -> tuple[float, float]:
    a_bw = pref.a_bw
    lo = max(a_bw - xi, 0.0)
    hi = a_bw + xi
    for j in _others(pref):
        a, c = pref.a_best[j], pref.a_worst[j]
        hi = min(hi, (a + xi) * (c + xi))
        if a > xi and c > xi:
            lo = max(lo, (a - xi) * (c - xi))
    return lo, hi


def _feasible(pref: BestWorstPreference, xi: float) -> bool:
    lo, hi = _t_interval(pref, xi)
    return lo <= hi and hi > 0


def _boxes(pref: BestWorstPreference, xi: float, t: float) -> tuple[np.ndarray, np.ndarray]:
    lo = np.empty(pref.n)
    hi = np.empty(pref.n)
    lo[pref.best] = hi[pref.best] = t
    lo[pref.worst] = hi[pref.worst] = 1.0
    for j in _others(pref):
        a, c = pref.a_best[j], pref.a_worst[j]
        lo[j] = max(t / (a + xi), c - xi, 0.0)
        hi[j] = c + xi
        if a > xi:
            hi[j] = min(hi[j], t / (a - xi))
        hi[j] = max(hi[j], lo[j])
    return lo, hi


def _weight_ranges(pref: BestWorstPreference, xi: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate min and max of the normalised weights feasible at ``xi``.

    Normalised weights are linear-fractional in ``(t, v)``, so extremes sit
    at vertices: ``t`` at an interval end or box breakpoint, and every other
    coordinate at one end of its box.
    """
    t_lo, t_hi = _t_interval(pref, xi)
    cands = {t_lo, t_hi}
    for j in _others(pref):
        a, c = pref.a_best[j], pref.a_worst[j]
        cands.add((c - xi) * (a + xi))
        if a > xi:
            cands.add((c + xi) * (a - xi))
    ts = sorted(t for t in cands if t_lo <= t <= t_hi and t > 0)
    wmin = np.full(pref.n, np.inf)
    wmax = np.full(pref.n, -np.inf)
    for t in ts:
        lo, hi = _boxes(pref, xi, t)
        for j in range(pref.n):
            small = lo[j] / (hi.sum() - hi[j] + lo[j])
            large = hi[j] / (lo.sum() - lo[j] + hi[j])
            wmin[j] = min(wmin[j], small)
            wmax[j] = max(wmax[j], large)
    return wmin, wmax


def solve_bwm(pref: BestWorstPreference, tol: float = 1e-9) -> WeightResult:
    """Minimax-optimal BWM weights.

    Returns the renormalised per-coordinate midpoint of the optimal weight
    region, so the answer is unique even when the optimum is not.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if _feasible(pref, 0.0):
        xi = 0.0
    else:
        lo = 0.0
        hi = bwm_objective(np.full(pref.n, 1.0 / pref.n), pref)
        assert _feasible(pref, hi), "uniform weights must be feasible at their own objective"
        for _ in range(MAX_BISECTION_STEPS):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if _feasible(pref, mid):
                hi = mid
            else:
                lo = mid
        else:
            raise BWMConvergenceError(
                f"bisection did not reach tol={tol} in {MAX_BISECTION_STEPS} steps "
                f"(bracket [{lo}, {hi}])"
            )
        xi = hi
    wmin, wmax = _weight_ranges(pref, xi)
    w = 0.5 * (wmin + wmax)
    w = w / w.sum()
    return WeightResult(weights=w, xi_star=xi, consistent=xi <= CONSISTENCY_TOL)
