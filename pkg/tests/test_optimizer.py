from decimal import Decimal

import numpy as np
import pytest

from filmfolio._accel import NUMBA_AVAILABLE
from filmfolio.optimizer import (
    DEFAULT_TAX_SCHEDULE,
    Instance,
    InvalidInstanceError,
    Project,
    ScaleError,
    TaxSchedule,
    budget_grid,
    check_feasible,
    enumerate_pareto,
    evaluate_portfolio,
    nondominated,
    single_objective_optima,
    solve_scalarized,
    sweep_budget,
    sweep_weight,
    validate_solution,
)
from filmfolio.optimizer import kernels
from oracles import brute_force_front, brute_force_points, brute_force_zw

BACKENDS = ["numpy"] + (["numba"] if NUMBA_AVAILABLE else [])


def random_instance(rng, n, *, losses=True, scale=1_000_000):
    projects = []
    for i in range(n):
        cost = int(rng.integers(1, scale // 4))
        margin = rng.uniform(-0.5 if losses else 0.1, 6.0)
        revenue = max(0, int(cost * (1 + margin)))
        projects.append(Project(i + 1, f"p{i + 1}", revenue, cost, round(float(rng.uniform(0, 0.3)), 3)))
    budget = int(rng.integers(scale // 4, scale))
    t = sorted(set(int(x) for x in rng.integers(1, 3 * scale, size=3)))
    rates = sorted(round(float(r), 2) for r in rng.uniform(0.05, 0.45, size=len(t) + 1))
    tax = TaxSchedule.from_pairs(list(zip(t + [None], rates)))
    return Instance(tuple(projects), budget, tax)


def single(profit):
    return Instance((Project(1, "one", profit, 0, 0.5),), 10)


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

def test_whole_profit_taxation_is_not_monotone():
    lo = evaluate_portfolio((True,), single(99_999))
    hi = evaluate_portfolio((True,), single(100_000))
    assert lo.z1 == Decimal("89999.1")
    assert hi.z1 == Decimal("80000.0")
    assert (lo.bracket_index, hi.bracket_index) == (1, 2)


def test_bracket_boundaries_are_lower_inclusive():
    tax = DEFAULT_TAX_SCHEDULE
    assert tax.bracket_of(0) == 1
    assert tax.bracket_of(99_999) == 1
    assert tax.bracket_of(100_000) == 2
    assert tax.bracket_of(1_000_000) == 3
    assert tax.bracket_of(100_000_000) == 4


def test_losses_are_untaxed():
    sol = evaluate_portfolio((True,), Instance((Project(1, "flop", 10, 500, 0.1),), 1000))
    assert sol.profit_before_tax == Decimal(-490)
    assert sol.tax_paid == 0
    assert sol.z1 == Decimal(-490)


def test_empty_portfolio():
    sol = evaluate_portfolio((False,), single(5))
    assert sol.z1 == 0 and sol.z2 == 0 and sol.selected_ids == ()


@pytest.mark.parametrize("pairs", [
    [(100_000, "0.1"), (100_000, "0.2"), (None, "0.3")],
    [(100_000, "0.1"), (50_000, "0.2"), (None, "0.3")],
])
def test_non_increasing_thresholds_rejected(pairs):
    with pytest.raises(InvalidInstanceError, match="non-increasing thresholds"):
        TaxSchedule.from_pairs(pairs)


@pytest.mark.parametrize("pairs, msg", [
    ([(100, "0.1"), (200, "0.2")], "unbounded"),
    ([(100, "1.2"), (None, "0.2")], "rate"),
])
def test_bad_tax_schedules(pairs, msg):
    with pytest.raises(InvalidInstanceError, match=msg):
        TaxSchedule.from_pairs(pairs)


def test_duplicate_project_ids_rejected():
    p = Project(1, "a", 10, 1, 0.1)
    with pytest.raises(InvalidInstanceError, match="duplicate"):
        Instance((p, p), 10)


def test_negative_budget_rejected():
    with pytest.raises(InvalidInstanceError):
        Instance((Project(1, "a", 10, 1, 0.1),), -1)


def test_validate_solution_catches_tampering(tp1):
    sol = solve_scalarized(tp1, 0.5)
    validate_solution(sol, tp1)
    from dataclasses import replace
    from filmfolio.optimizer import SolutionInvariantError
    with pytest.raises(SolutionInvariantError):
        validate_solution(replace(sol, tax_paid=sol.tax_paid + 1), tp1)


# ---------------------------------------------------------------------------
# test problems
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("backend", BACKENDS)
def test_test_problem_1(tp1, backend):
    sol = solve_scalarized(tp1, 0.5, backend=backend)
    assert sol.selected_ids == (2, 3)
    assert sol.profit_before_tax == Decimal(10_873_002)
    assert sol.tax_paid == Decimal("3261900.6")
    assert sol.z1 == Decimal("7611101.4")
    assert sol.z2 == pytest.approx(0.418, abs=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_test_problem_2(tp2, backend):
    sol = solve_scalarized(tp2, 0.5, backend=backend)
    assert sol.selected_ids == (5, 6, 9)
    assert sol.z1 == Decimal("51464519.4")
    assert sol.tax_paid == Decimal("22056222.6")


@pytest.mark.parametrize("backend", BACKENDS)
def test_test_problem_3(tp3, backend):
    sol = solve_scalarized(tp3, 0.5, backend=backend)
    assert sol.selected_ids == (2, 6, 7, 18, 19)
    assert sol.z1 == Decimal("89485524.0")
    assert sol.tax_paid == Decimal("59657016.0")


def test_branch_and_bound_matches_enumeration_on_test_problems(tp1, tp2, tp3):
    for inst in (tp1, tp2, tp3):
        for w in (0.0, 0.25, 0.5, 0.75, 1.0):
            a = solve_scalarized(inst, w, method="enumerate")
            b = solve_scalarized(inst, w, method="bnb")
            assert a.selection == b.selection


def test_test_problem_1_front_is_two_points(tp1):
    front = enumerate_pareto(tp1)
    assert [s.selected_ids for s in front] == [(2, 3), (2, 4)]
    assert [s.z1 for s in front] == [Decimal("7611101.4"), Decimal("3181762.5")]


# ---------------------------------------------------------------------------
# against the brute-force oracle
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(25))
def test_scalarized_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, int(rng.integers(1, 11)))
    pts = brute_force_points(inst)
    for w in (0.0, 0.3, 0.5, 0.9, 1.0):
        zs = brute_force_zw(pts, w)
        best = min(z for z, _ in zs)
        ties = [sel for z, sel in zs if z <= best + 1e-12]
        for backend in BACKENDS:
            for method in ("enumerate", "bnb"):
                sol = solve_scalarized(inst, w, method=method, backend=backend)
                assert check_feasible(sol.selection, inst)
                assert sol.zw == pytest.approx(best, abs=1e-12)
                # ties go to the lexicographically smallest selection
                assert sol.selection == min(ties)


@pytest.mark.parametrize("seed", range(10))
def test_single_objective_optima_match_brute_force(seed):
    rng = np.random.default_rng(100 + seed)
    inst = random_instance(rng, int(rng.integers(1, 11)))
    pts = brute_force_points(inst)
    z1s, z2s = single_objective_optima(inst)
    assert z1s == max(p[1] for p in pts)
    assert z2s == pytest.approx(max(p[2] for p in pts), abs=1e-12)
    z1b, z2b = single_objective_optima(inst, method="bnb")
    assert (z1b, z2b) == pytest.approx((z1s, z2s))


@pytest.mark.parametrize("seed", range(15))
def test_enumerate_pareto_matches_brute_force(seed):
    rng = np.random.default_rng(200 + seed)
    inst = random_instance(rng, int(rng.integers(1, 11)))
    want = {(z1, round(z2, 12)) for _, z1, z2 in brute_force_front(brute_force_points(inst))}
    got = {(s.z1, round(s.z2, 12)) for s in enumerate_pareto(inst)}
    assert got == want


@pytest.mark.parametrize("seed", range(5))
def test_bnb_beyond_enumeration_limit_matches_enumeration(seed):
    rng = np.random.default_rng(300 + seed)
    inst = random_instance(rng, 22, scale=3_000_000)
    for w in (0.2, 0.5, 0.8):
        a = solve_scalarized(inst, w, method="enumerate")
        b = solve_scalarized(inst, w, method="bnb")
        assert a.selection == b.selection


def test_scale_limit():
    projects = tuple(Project(i, f"p{i}", 10, 1, 0.01) for i in range(41))
    with pytest.raises(ScaleError):
        solve_scalarized(Instance(projects, 5), 0.5)
    with pytest.raises(ScaleError):
        enumerate_pareto(Instance(projects[:26], 5))


def test_weight_outside_unit_interval(tp1):
    with pytest.raises(ValueError):
        solve_scalarized(tp1, 1.5)


# ---------------------------------------------------------------------------
# kernels and backends
# ---------------------------------------------------------------------------

def test_mask_round_trip():
    for n in (1, 5, 12):
        for mask in (0, 1, (1 << n) - 1, 5 % (1 << n)):
            assert kernels.selection_to_mask(kernels.mask_to_selection(mask, n)) == mask


def test_mask_order_is_lexicographic():
    sels = [kernels.mask_to_selection(m, 4) for m in range(16)]
    assert sels == sorted(sels)


@pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba disabled")
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree_on_extrema(seed):
    rng = np.random.default_rng(400 + seed)
    arrays = random_instance(rng, 18).arrays()
    assert kernels.scan_extrema(arrays, "numba") == kernels.scan_extrema(arrays, "numpy")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def test_sweep_weight_returns_nondominated_points(tp1):
    pts = sweep_weight(tp1, 51)
    assert [s.selected_ids for s in pts] == [(2, 3), (2, 4)]
    assert sum(len(s.weights_producing) for s in pts) == 51
    assert nondominated(pts) == pts


def test_budget_grid_inclusive():
    g = budget_grid(0, 3_750_000, 250_000)
    assert len(g) == 16 and g[0] == 0 and g[-1] == 3_750_000
    with pytest.raises(ValueError):
        budget_grid(0, 10, 0)


def test_budget_sweep_monotone_optimum(tp1):
    rows = sweep_budget(tp1, budget_grid(0, 600_000, 50_000))
    assert rows[0].solution.selected_ids == ()
    stars = [r.z1_star for r in rows]
    assert stars == sorted(stars)
    for r in rows:
        assert r.solution.total_cost <= r.budget
