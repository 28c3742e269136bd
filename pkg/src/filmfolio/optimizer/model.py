"""Portfolio model: projects, bracket taxation, and solution evaluation.

Currency is held as :class:`decimal.Decimal` so that taxes such as
``0.3 * 10,873,002 = 3,261,900.6`` come out exact. The whole profit is taxed
at the single rate of the bracket it falls in (no marginal slices), with
bracket ``b`` covering ``P[b-1] <= R < P[b]`` and ``P[0] = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Bracket",
    "TaxSchedule",
    "Project",
    "Instance",
    "PortfolioSolution",
    "InvalidInstanceError",
    "SolutionInvariantError",
    "evaluate_portfolio",
    "check_feasible",
    "validate_solution",
    "DEFAULT_TAX_SCHEDULE",
]

# currency values carry at most one decimal place
MONEY_SCALE = 10


class InvalidInstanceError(ValueError):
    """Raised when model data violates a structural invariant."""


class SolutionInvariantError(AssertionError):
    """Raised by :func:`validate_solution` when a solution is inconsistent."""


def to_decimal(value) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, float):
        # repr round-trips, so 0.3 stays 0.3 rather than its binary expansion
        return Decimal(repr(value))
    return Decimal(value)


def _to_tenths(value: Decimal, what: str) -> int:
    scaled = value * MONEY_SCALE
    if scaled != scaled.to_integral_value():
        raise InvalidInstanceError(f"{what}={value} has more than one decimal place")
    return int(scaled)


@dataclass(frozen=True)
class Bracket:
    upper: Optional[Decimal]  # None for the open-ended top bracket
    rate: Decimal


@dataclass(frozen=True)
class TaxSchedule:
    brackets: tuple[Bracket, ...]

    def __post_init__(self):
        if not self.brackets:
            raise InvalidInstanceError("tax schedule needs at least one bracket")
        object.__setattr__(
            self,
            "brackets",
            tuple(
                Bracket(None if b.upper is None else to_decimal(b.upper), to_decimal(b.rate))
                for b in self.brackets
            ),
        )
        prev = Decimal(0)
        for i, b in enumerate(self.brackets):
            last = i == len(self.brackets) - 1
            if not Decimal(0) <= b.rate <= Decimal(1):
                raise InvalidInstanceError(f"bracket {i + 1}: rate {b.rate} outside [0, 1]")
            if last:
                if b.upper is not None:
                    raise InvalidInstanceError("the last bracket must be unbounded (upper = null)")
                continue
            if b.upper is None:
                raise InvalidInstanceError(f"bracket {i + 1}: only the last bracket may be unbounded")
            if b.upper <= prev:
                raise InvalidInstanceError(
                    f"bracket {i + 1}: non-increasing thresholds ({b.upper} after {prev})"
                )
            prev = b.upper

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple]) -> "TaxSchedule":
        return cls(tuple(Bracket(u, r) for u, r in pairs))

    @property
    def thresholds(self) -> tuple[Decimal, ...]:
        """Finite upper bounds ``P_1 .. P_{m-1}``."""
        return tuple(b.upper for b in self.brackets[:-1])

    @property
    def rates(self) -> tuple[Decimal, ...]:
        return tuple(b.rate for b in self.brackets)

    def bracket_of(self, profit) -> int:
        """1-based bracket number holding ``profit`` (lower bound inclusive)."""
        profit = to_decimal(profit)
        b = 1
        for upper in self.thresholds:
            if profit >= upper:
                b += 1
            else:
                break
        return b

    def rate_for(self, profit) -> Decimal:
        return self.brackets[self.bracket_of(profit) - 1].rate

    def scaled_rates(self) -> tuple[int, np.ndarray]:
        """Common denominator ``D`` and integer ``(1 - rate) * D`` per bracket."""
        fracs = [Fraction(r) for r in self.rates]
        denom = lcm(*(f.denominator for f in fracs))
        keep = np.array([int((1 - f) * denom) for f in fracs], dtype=np.int64)
        return denom, keep

    def thresholds_tenths(self) -> np.ndarray:
        return np.array(
            [_to_tenths(u, "bracket upper bound") for u in self.thresholds], dtype=np.int64
        )


DEFAULT_TAX_SCHEDULE = TaxSchedule.from_pairs(
    [("100000", "0.10"), ("1000000", "0.20"), ("100000000", "0.30"), (None, "0.40")]
)


@dataclass(frozen=True)
class Project:
    id: int
    name: str
    revenue: Decimal
    cost: Decimal
    preferability: float

    def __post_init__(self):
        object.__setattr__(self, "revenue", to_decimal(self.revenue))
        object.__setattr__(self, "cost", to_decimal(self.cost))
        object.__setattr__(self, "preferability", float(self.preferability))
        if self.cost < 0:
            raise InvalidInstanceError(f"project {self.id}: cost {self.cost} is negative")
        if not 0.0 <= self.preferability <= 1.0:
            raise InvalidInstanceError(
                f"project {self.id}: preferability {self.preferability} outside [0, 1]"
            )

    @property
    def profit(self) -> Decimal:
        return self.revenue - self.cost


@dataclass(frozen=True)
class Instance:
    projects: tuple[Project, ...]
    budget: Decimal
    tax: TaxSchedule = DEFAULT_TAX_SCHEDULE

    def __post_init__(self):
        object.__setattr__(self, "projects", tuple(self.projects))
        object.__setattr__(self, "budget", to_decimal(self.budget))
        if self.budget < 0:
            raise InvalidInstanceError(f"budget {self.budget} is negative")
        seen = set()
        for p in self.projects:
            if p.id in seen:
                raise InvalidInstanceError(f"duplicate project id {p.id}")
            seen.add(p.id)

    @property
    def n(self) -> int:
        return len(self.projects)

    def with_budget(self, budget) -> "Instance":
        return Instance(self.projects, to_decimal(budget), self.tax)

    def arrays(self) -> dict:
        """Integer/float arrays consumed by the search kernels."""
        cost = np.array([_to_tenths(p.cost, f"project {p.id} cost") for p in self.projects], dtype=np.int64)
        rev = np.array([_to_tenths(p.revenue, f"project {p.id} revenue") for p in self.projects], dtype=np.int64)
        denom, keep = self.tax.scaled_rates()
        profit = rev - cost
        # z1 is accumulated as profit_tenths * denom; keep well inside int64
        worst = int(np.abs(profit).sum()) * max(denom, 1)
        if worst >= 2**62:
            raise InvalidInstanceError("monetary magnitudes too large for exact search")
        return {
            "cost": cost,
            "profit": profit,
            "pref": np.array([p.preferability for p in self.projects], dtype=np.float64),
            "budget": _to_tenths(self.budget, "budget"),
            "uppers": self.tax.thresholds_tenths(),
            "keep": keep,
            "denom": int(denom),
        }


@dataclass(frozen=True)
class PortfolioSolution:
    selection: tuple[bool, ...]
    project_ids: tuple[int, ...]
    profit_before_tax: Decimal
    bracket_index: int
    tax_rate: Decimal
    tax_paid: Decimal
    z1: Decimal
    z2: float
    total_cost: Decimal
    zw: Optional[float] = None
    scalar_weight: Optional[float] = None
    weights_producing: tuple[float, ...] = field(default=(), compare=False)

    @property
    def selected_ids(self) -> tuple[int, ...]:
        return tuple(pid for pid, x in zip(self.project_ids, self.selection) if x)

    def as_dict(self) -> dict:
        return {
            "selected": list(self.selected_ids),
            "profit_before_tax": str(self.profit_before_tax),
            "bracket": self.bracket_index,
            "tax_rate": str(self.tax_rate),
            "tax": str(self.tax_paid),
            "z1": str(self.z1),
            "z2": round(self.z2, 12),
            "total_cost": str(self.total_cost),
            "zw": None if self.zw is None else round(self.zw, 12),
            "w": self.scalar_weight,
        }


def _check_length(selection, inst: Instance) -> tuple[bool, ...]:
    sel = tuple(bool(x) for x in selection)
    if len(sel) != inst.n:
        raise ValueError(f"selection has length {len(sel)}, instance has {inst.n} projects")
    return sel


def evaluate_portfolio(selection, inst: Instance, *, w: Optional[float] = None,
                       zw: Optional[float] = None) -> PortfolioSolution:
    """Objective values of a 0-1 selection; the budget is not checked here."""
    sel = _check_length(selection, inst)
    chosen = [p for p, x in zip(inst.projects, sel) if x]
    profit = sum((p.profit for p in chosen), Decimal(0))
    cost = sum((p.cost for p in chosen), Decimal(0))
    z2 = float(sum(p.preferability for p in chosen))
    bracket = inst.tax.bracket_of(profit)
    rate = inst.tax.brackets[bracket - 1].rate
    if profit > 0:
        tax = rate * profit
    else:
        # losses are not taxed, and never subsidised
        tax = Decimal(0)
    return PortfolioSolution(
        selection=sel,
        project_ids=tuple(p.id for p in inst.projects),
        profit_before_tax=profit,
        bracket_index=bracket,
        tax_rate=rate,
        tax_paid=tax,
        z1=profit - tax,
        z2=z2,
        total_cost=cost,
        zw=zw,
        scalar_weight=w,
    )


def check_feasible(selection, inst: Instance) -> bool:
    sel = _check_length(selection, inst)
    return sum((p.cost for p, x in zip(inst.projects, sel) if x), Decimal(0)) <= inst.budget


def validate_solution(sol: PortfolioSolution, inst: Instance) -> None:
    """Re-derive every model constraint for ``sol``.

    Besides the budget and profit identities this checks the big-M bracket
    inequalities ``P[b-1]*y_b - M(1-y_b) <= R <= P[b]*y_b + M(1-y_b)`` with
    ``M`` set to ten times the largest finite threshold, treating the open
    top bracket's upper bound as ``M``.
    """
    if not check_feasible(sol.selection, inst):
        raise SolutionInvariantError(f"selection {sol.selected_ids} exceeds budget {inst.budget}")
    ref = evaluate_portfolio(sol.selection, inst)
    for name in ("profit_before_tax", "bracket_index", "tax_rate", "tax_paid", "z1", "total_cost"):
        if getattr(ref, name) != getattr(sol, name):
            raise SolutionInvariantError(f"{name}: stored {getattr(sol, name)} != recomputed {getattr(ref, name)}")
    if abs(ref.z2 - sol.z2) > 1e-9:
        raise SolutionInvariantError(f"z2: stored {sol.z2} != recomputed {ref.z2}")

    R = sol.profit_before_tax
    thresholds = inst.tax.thresholds
    big_m = 10 * max(thresholds, default=Decimal(1))
    big_m = max(big_m, abs(R) * 10)
    lowers = (Decimal(0),) + thresholds
    uppers = thresholds + (big_m,)
    active = 0
    for b, (lo, hi) in enumerate(zip(lowers, uppers), start=1):
        y = 1 if b == sol.bracket_index else 0
        active += y
        lo_eff = (-big_m if b == 1 else lo) * y - big_m * (1 - y)
        if not lo_eff <= R <= hi * y + big_m * (1 - y):
            raise SolutionInvariantError(f"bracket constraint {b} violated for R={R}")
        if y and b > 1 and not R >= lo:
            raise SolutionInvariantError(f"R={R} below bracket {b} lower bound {lo}")
        if y and b < len(lowers) and not R < hi:
            raise SolutionInvariantError(f"R={R} not below bracket {b} upper bound {hi}")
    if active != 1:
        raise SolutionInvariantError("exactly one bracket must be active")
    if R > 0 and sol.z1 != (1 - sol.tax_rate) * R:
        raise SolutionInvariantError("z1 != (1 - T) * R")
