"""Exact bi-objective portfolio optimisation.

Both objectives are maximised: after-tax profit ``z1`` and total
preferability ``z2``. The scalarised problem minimises

    Zw = w * (Z1* - z1) / Z1* + (1 - w) * (Z2* - z2) / Z2*

where ``Z1*`` and ``Z2*`` are the single-objective optima over the same
feasible set. A deviation term whose optimum is 0 counts as 0.

Up to ``ENUMERATION_LIMIT`` projects the search is exhaustive; above that a
depth-first branch-and-bound takes over. Ties in ``Zw`` (within
``ZW_SLACK``) go to the lexicographically smallest selection vector.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .kernels import ZW_SLACK, mask_to_selection
from .model import Instance, PortfolioSolution, evaluate_portfolio, validate_solution

__all__ = [
    "ENUMERATION_LIMIT",
    "MAX_PROJECTS",
    "ScaleError",
    "BudgetRow",
    "solve_scalarized",
    "single_objective_optima",
    "enumerate_pareto",
    "nondominated",
    "sweep_weight",
    "sweep_budget",
]

ENUMERATION_LIMIT = 25
MAX_PROJECTS = 40


class ScaleError(ValueError):
    """Instance too large for the exact methods."""


def _check_scale(inst: Instance, limit: int = MAX_PROJECTS) -> None:
    if inst.n > limit:
        raise ScaleError(f"{inst.n} projects exceeds the supported maximum of {limit}")


def _check_weight(w: float) -> float:
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"scalarisation weight {w} outside [0, 1]")
    return w


# ---------------------------------------------------------------------------
# branch and bound (n > ENUMERATION_LIMIT)
# ---------------------------------------------------------------------------

class _BranchAndBound:
    """DFS over x_0, x_1, ... with the 0-branch first.

    Every node is itself a feasible selection (undecided projects left out),
    and nodes are visited in lexicographic order of their selection vector.
    The bound is the fractional-knapsack relaxation of a linear surrogate
    that over-estimates the true objective; for ``z1`` the surrogate is
    ``(1 - min rate) * R``, valid because rates are non-negative.
    """

    def __init__(self, arrays: dict):
        self.a = arrays
        self.n = arrays["cost"].shape[0]
        self.keep_max = int(arrays["keep"].max())

    def _objective(self, kind, w=None, z1s=None, z2s=None):
        a = self.a
        uppers, keep, denom = a["uppers"], a["keep"], a["denom"]
        profit = a["profit"].astype(float)
        pref = a["pref"]
        if kind == "z1":
            def value(r, z2):
                return int(kernels._z1_scaled(r, uppers, keep, denom))
            lin = self.keep_max * profit
        elif kind == "z2":
            def value(r, z2):
                return z2
            lin = pref.copy()
        else:
            c1 = w / z1s if z1s != 0 else 0.0
            c2 = (1.0 - w) / z2s if z2s != 0.0 else 0.0

            def value(r, z2):
                return c1 * float(kernels._z1_scaled(r, uppers, keep, denom)) + c2 * z2
            lin = c1 * self.keep_max * profit + c2 * pref
        return value, lin

    def maximise(self, value, lin, slack):
        a = self.a
        cost, profit, pref = a["cost"], a["profit"], a["pref"]
        budget = a["budget"]
        n = self.n
        # items worth packing in the relaxation, best ratio first
        positive = [i for i in range(n) if lin[i] > 0]
        order = sorted(positive, key=lambda i: (-(lin[i] / cost[i]) if cost[i] > 0 else -np.inf, i))

        def bound(depth, room, lin_cur):
            ub = lin_cur
            for i in order:
                if i < depth:
                    continue
                if cost[i] <= room:
                    room -= cost[i]
                    ub += lin[i]
                else:
                    ub += lin[i] * room / cost[i]
                    break
            return ub

        best = value(0, 0.0)
        cands = [(best, 0)]

        def visit(depth, mask, spent, r, z2, lin_cur):
            nonlocal best
            if depth == n:
                return
            if bound(depth, budget - spent, lin_cur) < best - slack - 1e-9 * abs(best):
                return
            # x_depth = 0 first: keeps lexicographic visiting order
            visit(depth + 1, mask << 1, spent, r, z2, lin_cur)
            c = spent + cost[depth]
            if c <= budget:
                r1 = r + profit[depth]
                z21 = z2 + pref[depth]
                m1 = ((mask << 1) | 1) << (n - depth - 1)
                v = value(r1, z21)
                if v >= best - slack:
                    cands.append((v, m1))
                    best = max(best, v)
                visit(depth + 1, (mask << 1) | 1, c, r1, z21, lin_cur + lin[depth])

        visit(0, 0, 0, 0, 0.0, 0.0)
        winner = min(m for v, m in cands if v >= best - slack)
        return best, winner

    def extrema(self):
        v1, _ = self.maximise(*self._objective("z1"), slack=0.0)
        v2, _ = self.maximise(*self._objective("z2"), slack=0.0)
        return int(v1), float(v2)

    def argmin(self, w, z1s, z2s, slack):
        value, lin = self._objective("zw", w, z1s, z2s)
        _, mask = self.maximise(value, lin, slack)
        sel = np.array(mask_to_selection(mask, self.n), dtype=bool)
        a = self.a
        z1 = kernels._z1_scaled(int(a["profit"][sel].sum()), a["uppers"], a["keep"], a["denom"])
        return float(kernels._zw(z1, float(a["pref"][sel].sum()), w, z1s, z2s)), mask


# ---------------------------------------------------------------------------
# scalarised solve
# ---------------------------------------------------------------------------

class _Scalarizer:
    """Caches kernel arrays and single-objective optima for repeated solves."""

    def __init__(self, inst: Instance, method: str = "auto", backend: str = "auto"):
        _check_scale(inst)
        if method == "auto":
            method = "enumerate" if inst.n <= ENUMERATION_LIMIT else "bnb"
        if method == "enumerate":
            _check_scale(inst, ENUMERATION_LIMIT)
        elif method != "bnb":
            raise ValueError(f"unknown method {method!r}")
        self.inst = inst
        self.method = method
        self.backend = backend
        self.arrays = inst.arrays()
        self._bnb = _BranchAndBound(self.arrays) if method == "bnb" else None
        if method == "enumerate":
            self.z1s, self.z2s, _ = kernels.scan_extrema(self.arrays, backend)
        else:
            self.z1s, self.z2s = self._bnb.extrema()

    @property
    def scale(self) -> int:
        return self.arrays["denom"] * 10

    def z1_star(self) -> Decimal:
        return Decimal(self.z1s) / Decimal(self.scale)

    def solve(self, w: float) -> PortfolioSolution:
        w = _check_weight(w)
        if self.method == "enumerate":
            zw, mask = kernels.scan_argmin(self.arrays, w, self.z1s, self.z2s, self.backend)
        else:
            zw, mask = self._bnb.argmin(w, self.z1s, self.z2s, ZW_SLACK)
        sel = mask_to_selection(mask, self.inst.n)
        sol = evaluate_portfolio(sel, self.inst, w=w, zw=zw)
        validate_solution(sol, self.inst)
        return sol


def single_objective_optima(inst: Instance, method: str = "auto",
                            backend: str = "auto") -> tuple[Decimal, float]:
    """``(Z1*, Z2*)`` over the feasible selections of ``inst``."""
    if inst.n == 0:
        return Decimal(0), 0.0
    s = _Scalarizer(inst, method, backend)
    return s.z1_star(), s.z2s


def solve_scalarized(inst: Instance, w: float = 0.5, *, method: str = "auto",
                     backend: str = "auto") -> PortfolioSolution:
    """Feasible selection minimising the weighted relative deviation ``Zw``.

    Parameters
    ----------
    inst : Instance
        Projects, budget and tax schedule.
    w : float
        Weight of the profit deviation; ``1 - w`` weighs preferability.
    method : {"auto", "enumerate", "bnb"}
        ``auto`` enumerates up to 25 projects and branches-and-bounds above.
    backend : {"auto", "numba", "numpy"}
        Kernel implementation used by exhaustive enumeration.
    """
    w = _check_weight(w)
    if inst.n == 0:
        return evaluate_portfolio((), inst, w=w, zw=0.0)
    return _Scalarizer(inst, method, backend).solve(w)


# ---------------------------------------------------------------------------
# Pareto front
# ---------------------------------------------------------------------------

def _front_indices(z1: np.ndarray, z2: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Indices of nondominated points (maximise both), one per objective pair.

    Among identical objective pairs the smallest mask survives. ``z2`` is
    compared after rounding to 12 decimals so that equal sums reached in a
    different addition order count as equal.
    """
    z2q = np.round(z2, 12)
    order = np.lexsort((masks, -z2q, -z1))
    keep = []
    running = -np.inf
    for i in order:
        if z2q[i] > running:
            keep.append(i)
            running = z2q[i]
    return np.asarray(keep, dtype=np.int64)


def nondominated(solutions: Iterable[PortfolioSolution]) -> list[PortfolioSolution]:
    """Nondominated subset of ``solutions``, sorted by descending ``z1``."""
    sols = list(solutions)
    if not sols:
        return []
    z1 = np.array([float(s.z1) for s in sols])
    # exact comparisons on z1: rank distinct Decimal values
    distinct = sorted(set(s.z1 for s in sols))
    rank = {v: i for i, v in enumerate(distinct)}
    z1 = np.array([rank[s.z1] for s in sols], dtype=np.int64)
    z2 = np.array([s.z2 for s in sols])
    masks = np.array([kernels.selection_to_mask(s.selection) for s in sols], dtype=np.int64)
    return [sols[i] for i in _front_indices(z1, z2, masks)]


def enumerate_pareto(inst: Instance) -> list[PortfolioSolution]:
    """All nondominated feasible portfolios, by exhaustive enumeration."""
    _check_scale(inst, ENUMERATION_LIMIT)
    if inst.n == 0:
        return [evaluate_portfolio((), inst)]
    arrays = inst.arrays()
    parts = []
    for masks, z1, z2 in kernels.feasible_points(arrays):
        idx = _front_indices(z1, z2, masks)
        parts.append((masks[idx], z1[idx], z2[idx]))
    masks = np.concatenate([p[0] for p in parts])
    z1 = np.concatenate([p[1] for p in parts])
    z2 = np.concatenate([p[2] for p in parts])
    front = []
    for i in _front_indices(z1, z2, masks):
        sol = evaluate_portfolio(mask_to_selection(int(masks[i]), inst.n), inst)
        validate_solution(sol, inst)
        front.append(sol)
    return front


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def sweep_weight(inst: Instance, grid_points: int = 101, *, method: str = "auto",
                 backend: str = "auto") -> list[PortfolioSolution]:
    """Scalarised optima over ``w = k / (grid_points - 1)``.

    Returns the distinct nondominated results, each carrying in
    ``weights_producing`` every grid weight that selected it.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    weights = [k / (grid_points - 1) for k in range(grid_points)]
    if inst.n == 0:
        sol = evaluate_portfolio((), inst, w=0.0, zw=0.0)
        return [replace(sol, weights_producing=tuple(weights))]
    s = _Scalarizer(inst, method, backend)
    by_sel: dict[tuple[bool, ...], list] = {}
    for w in weights:
        sol = s.solve(w)
        by_sel.setdefault(sol.selection, [sol, []])[1].append(w)
    merged = [replace(sol, weights_producing=tuple(ws)) for sol, ws in by_sel.values()]
    return nondominated(merged)


@dataclass(frozen=True)
class BudgetRow:
    budget: Decimal
    solution: PortfolioSolution
    z1_star: Decimal

    def as_dict(self) -> dict:
        s = self.solution
        return {
            "budget": str(self.budget),
            "selected": list(s.selected_ids),
            "z1": str(s.z1),
            "profit_before_tax": str(s.profit_before_tax),
            "tax": str(s.tax_paid),
            "z2": round(s.z2, 12),
            "zw": None if s.zw is None else round(s.zw, 12),
            "z1_star": str(self.z1_star),
        }


def sweep_budget(inst: Instance, budgets: Sequence, w: float = 0.5, *, method: str = "auto",
                 backend: str = "auto") -> list[BudgetRow]:
    """Scalarised solve at each budget, everything else held fixed."""
    w = _check_weight(w)
    rows = []
    for b in budgets:
        sub = inst.with_budget(b)
        if sub.budget < 0:
            raise ValueError(f"budget {b} is negative")
        if sub.n == 0:
            rows.append(BudgetRow(sub.budget, evaluate_portfolio((), sub, w=w, zw=0.0), Decimal(0)))
            continue
        s = _Scalarizer(sub, method, backend)
        rows.append(BudgetRow(sub.budget, s.solve(w), s.z1_star()))
    return rows


def budget_grid(start, stop, step) -> list[Decimal]:
    """Inclusive arithmetic grid ``start, start+step, ..., <= stop``."""
    start, stop, step = Decimal(str(start)), Decimal(str(stop)), Decimal(str(step))
    if step <= 0:
        raise ValueError("step must be positive")
    out = []
    b = start
    while b <= stop:
        out.append(b)
        b += step
    return out
