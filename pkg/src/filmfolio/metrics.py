"""Validation metrics for externally supplied box-office predictions.

Classification metrics are computed one-vs-rest per class and averaged with
weights proportional to each class's support in the ground truth.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ingestion.common import InputError, Source, read_source, strip_version_comment

CLASS_LABELS = (1, 2, 3)
CLASS_THRESHOLDS = (100_000_000, 1_000_000_000)

CLASSIFICATION_COLUMNS = ("accuracy", "precision", "recall", "f1", "mcc")
REGRESSION_COLUMNS = ("mae", "mse", "rmse", "mape", "r2")


def assign_box_office_class(box_office) -> int:
    """Bucket 1 below 1e8, 2 for [1e8, 1e9), 3 from 1e9; lower bounds inclusive."""
    if box_office < 0:
        raise ValueError(f"box office must be nonnegative, got {box_office}")
    if box_office < CLASS_THRESHOLDS[0]:
        return 1
    if box_office < CLASS_THRESHOLDS[1]:
        return 2
    return 3


@dataclass(frozen=True)
class ClassCounts:
    label: int
    tp: int
    tn: int
    fp: int
    fn: int
    support: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    mcc: float


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    mcc: float
    per_class: tuple[ClassCounts, ...]
    n: int

    def row(self) -> dict:
        return {k: getattr(self, k) for k in CLASSIFICATION_COLUMNS}


@dataclass(frozen=True)
class RegressionMetrics:
    mae: float
    mse: float
    rmse: float
    mape: Optional[float]
    r2: Optional[float]
    n: int
    diagnostics: tuple[str, ...] = field(default=())

    def row(self) -> dict:
        return {k: getattr(self, k) for k in REGRESSION_COLUMNS}


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def _binary(label: int, truth: np.ndarray, pred: np.ndarray) -> ClassCounts:
    t, p = truth == label, pred == label
    tp = int(np.sum(t & p))
    tn = int(np.sum(~t & ~p))
    fp = int(np.sum(~t & p))
    fn = int(np.sum(t & ~p))
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if den:
        mcc = (tp * tn - fp * fn) / math.sqrt(den)
    else:
        # a degenerate margin with no errors is a perfect one-vs-rest split
        mcc = 1.0 if fp == 0 and fn == 0 else 0.0
    return ClassCounts(label, tp, tn, fp, fn, int(t.sum()), (tp + tn) / len(truth), precision, recall, f1, mcc)


def _labels(values: Sequence, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    bad = [v for v in arr.tolist() if v not in CLASS_LABELS]
    if bad:
        raise ValueError(f"{name} label {bad[0]!r} outside {{1, 2, 3}}")
    return arr.astype(np.int64)


def classification_report(truth: Sequence[int], predicted: Sequence[int]) -> ClassificationMetrics:
    if len(truth) != len(predicted):
        raise ValueError(f"length mismatch: {len(truth)} truth vs {len(predicted)} predicted")
    if len(truth) == 0:
        raise ValueError("empty input")
    t = _labels(truth, "truth")
    p = _labels(predicted, "predicted")
    present = sorted(set(t.tolist()) | set(p.tolist()))
    per_class = tuple(_binary(c, t, p) for c in present)
    support = np.array([c.support for c in per_class], dtype=float)
    weights = support / support.sum()
    avg = {k: float(np.dot(weights, [getattr(c, k) for c in per_class])) for k in CLASSIFICATION_COLUMNS}
    return ClassificationMetrics(n=len(t), per_class=per_class, **avg)


def regression_report(truth: Sequence[float], predicted: Sequence[float]) -> RegressionMetrics:
    y = np.asarray(truth, dtype=float)
    yhat = np.asarray(predicted, dtype=float)
    if y.shape != yhat.shape or y.ndim != 1:
        raise ValueError(f"length mismatch: {y.size} truth vs {yhat.size} predicted")
    if y.size == 0:
        raise ValueError("empty input")
    err = y - yhat
    mae = float(np.mean(np.abs(err)))
    mse = float(np.mean(err * err))
    rmse = math.sqrt(mse)
    diagnostics = []
    if np.any(y == 0):
        mape = None
        diagnostics.append("MAPE omitted: some actual values are zero")
    else:
        mape = float(np.mean(np.abs(err / y)) * 100.0)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        r2 = None
        diagnostics.append("R2 omitted: all actual values are equal")
    else:
        r2 = 1.0 - float(np.sum(err * err)) / ss_tot
    return RegressionMetrics(mae, mse, rmse, mape, r2, int(y.size), tuple(diagnostics))


@dataclass(frozen=True)
class Predictions:
    ids: tuple[str, ...]
    actual: np.ndarray
    predicted: np.ndarray


def load_predictions(source: Source) -> Predictions:
    """Delimited file with header ``id,actual,predicted``."""
    text, name = read_source(source)
    lines = strip_version_comment(text.splitlines(), name)
    rows = [(i, r) for i, r in enumerate(csv.reader(lines), start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty predictions file", source=name)
    header_line, header = rows[0]
    if [h.strip().lower() for h in header] != ["id", "actual", "predicted"]:
        raise InputError("header must be id,actual,predicted", source=name, line=header_line)
    ids, actual, predicted = [], [], []
    for line, row in rows[1:]:
        if len(row) != 3:
            raise InputError(f"expected 3 columns, found {len(row)}", source=name, line=line)
        ids.append(row[0].strip())
        for col, cell, out in (("actual", row[1], actual), ("predicted", row[2], predicted)):
            try:
                v = float(cell.strip().replace(",", ""))
            except ValueError:
                raise InputError(f"malformed number {cell.strip()!r}", source=name, line=line,
                                 field=col) from None
            if not math.isfinite(v):
                raise InputError(f"non-finite number {cell.strip()!r}", source=name, line=line, field=col)
            out.append(v)
    if not ids:
        raise InputError("predictions file has no rows", source=name)
    return Predictions(tuple(ids), np.array(actual), np.array(predicted))
