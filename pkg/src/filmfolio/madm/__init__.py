"""Criterion weighting (BWM, Bayesian BWM) and WASPAS project scoring."""

from .bbwm import sample_bbwm
from .bwm import BWMConvergenceError, bwm_objective, solve_bwm
from .types import (
    BENEFICIAL,
    NON_BENEFICIAL,
    BestWorstPreference,
    CriterionSpec,
    DecisionMatrix,
    InvalidMatrixError,
    InvalidPreferenceError,
    MCMCConfig,
    WaspasResult,
    WeightPosterior,
    WeightResult,
)
from .waspas import normalize_matrix, score_waspas, wpm, wsm
