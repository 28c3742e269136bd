"""Bi-objective 0-1 portfolio selection under whole-profit bracket taxation."""

from .model import (
    DEFAULT_TAX_SCHEDULE,
    Bracket,
    Instance,
    InvalidInstanceError,
    PortfolioSolution,
    Project,
    SolutionInvariantError,
    TaxSchedule,
    check_feasible,
    evaluate_portfolio,
    validate_solution,
)
from .solve import (
    ENUMERATION_LIMIT,
    MAX_PROJECTS,
    BudgetRow,
    ScaleError,
    budget_grid,
    enumerate_pareto,
    nondominated,
    single_objective_optima,
    solve_scalarized,
    sweep_budget,
    sweep_weight,
)
