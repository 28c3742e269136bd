"""WASPAS scoring: a per-alternative blend of weighted sum and weighted product."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .types import BENEFICIAL, CriterionSpec, DecisionMatrix, InvalidMatrixError, WaspasResult

# relative standard deviation assumed for each normalised performance
RELATIVE_SD = 0.05


def normalize_matrix(m: DecisionMatrix, mode: str = "standard") -> DecisionMatrix:
    """Column-wise linear normalisation.

    ``standard``: beneficial ``x / max x``, non-beneficial ``min x / x``.
    ``paper``: beneficial ``x / min x``, the unbounded literal variant of the
    model; values then exceed 1 and the result is not flagged normalized.
    """
    if m.normalized:
        raise InvalidMatrixError("matrix is already normalized")
    x = m.values
    out = np.empty_like(x)
    for j, c in enumerate(m.criteria):
        col = x[:, j]
        if c.beneficial:
            out[:, j] = col / (col.max() if mode == "standard" else col.min())
        else:
            out[:, j] = col.min() / col
    if mode == "standard":
        # x / max(x) hits exactly 1 at the argmax; guard the upper bound anyway
        np.minimum(out, 1.0, out=out)
        return DecisionMatrix(m.alternatives, m.criteria, out, normalized=True)
    if mode == "paper":
        return DecisionMatrix(m.alternatives, m.criteria, out, normalized=False)
    raise ValueError(f"unknown normalization mode {mode!r}")


def renormalize_beneficial(m: DecisionMatrix) -> DecisionMatrix:
    """Normalise an already-normalised matrix treating every column as beneficial."""
    crit = tuple(CriterionSpec(c.id, c.name, BENEFICIAL) for c in m.criteria)
    raw = DecisionMatrix(m.alternatives, crit, m.values, normalized=False)
    return normalize_matrix(raw)


def wsm(xbar: np.ndarray, w: np.ndarray) -> np.ndarray:
    return xbar @ w


def wpm(xbar: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.prod(xbar ** w, axis=1)


def score_variances(xbar: np.ndarray, w: np.ndarray, q2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First-order variances of the WSM and WPM scores.

    Each normalised entry has variance ``(0.05 * xbar)**2``. The WSM
    gradient w.r.t. ``xbar_ij`` is ``w_j``; the WPM gradient is
    ``w_j * Q2_i / xbar_ij``.
    """
    var_x = (RELATIVE_SD * xbar) ** 2
    var_q1 = (w**2 * var_x).sum(axis=1)
    grad2 = w * q2[:, None] / xbar
    var_q2 = (grad2**2 * var_x).sum(axis=1)
    return var_q1, var_q2


def _rank(q: np.ndarray) -> tuple[int, ...]:
    # stable sort on -q keeps input row order among ties
    return tuple(int(i) for i in np.argsort(-q, kind="stable"))


def score_waspas(m: DecisionMatrix, w: Sequence[float],
                 lam: Union[str, float] = "optimal", normalization: str = "standard") -> WaspasResult:
    """Score alternatives with WASPAS.

    Parameters
    ----------
    m : DecisionMatrix
        Raw or normalised performances; raw matrices are normalised first.
    w : sequence of float
        Criterion weights on the simplex.
    lam : "optimal" or float
        ``"optimal"`` picks a variance-minimising blend per alternative,
        ``lambda_i = var(Q2_i) / (var(Q1_i) + var(Q2_i))``. A number applies
        one fixed blend to every alternative.
    normalization : {"standard", "paper"}
        Normalisation applied to a raw matrix, see :func:`normalize_matrix`.
    """
    w = np.asarray(w, dtype=float)
    xbar = m.values if m.normalized else normalize_matrix(m, normalization).values
    if w.shape != (xbar.shape[1],):
        raise InvalidMatrixError(f"{w.size} weights for {xbar.shape[1]} criteria")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidMatrixError("weights must be non-negative and sum to 1")
    if np.any(xbar <= 0):
        raise InvalidMatrixError("normalized matrix has a zero entry")

    q1 = wsm(xbar, w)
    q2 = wpm(xbar, w)
    var_q1, var_q2 = score_variances(xbar, w, q2)
    if isinstance(lam, str):
        if lam != "optimal":
            raise ValueError(f"unknown lambda mode {lam!r}")
        total = var_q1 + var_q2
        lam_i = np.where(total > 0, var_q2 / np.where(total > 0, total, 1.0), 0.5)
    else:
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lambda {lam} outside [0, 1]")
        lam_i = np.full(q1.shape, lam)
    if isinstance(lam, float) and lam in (0.0, 1.0):
        # exact reductions: no blending arithmetic on the unused score
        q = (q1 if lam == 1.0 else q2).copy()
    else:
        q = lam_i * q1 + (1.0 - lam_i) * q2
    return WaspasResult(
        alternatives=m.alternatives,
        q1=q1, q2=q2, lam=lam_i, q=q,
        var_q1=var_q1, var_q2=var_q2,
        ranking=_rank(q),
    )
