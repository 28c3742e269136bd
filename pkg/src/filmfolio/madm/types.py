from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

BENEFICIAL = "beneficial"
NON_BENEFICIAL = "non-beneficial"


class InvalidPreferenceError(ValueError):
    pass


class InvalidMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class CriterionSpec:
    id: str
    name: str = ""
    direction: str = BENEFICIAL
    categorical_map: Optional[Mapping[str, float]] = None

    def __post_init__(self):
        if self.direction not in (BENEFICIAL, NON_BENEFICIAL):
            raise InvalidMatrixError(f"criterion {self.id}: unknown direction {self.direction!r}")
        if self.categorical_map is not None:
            for label, score in self.categorical_map.items():
                if not 0 <= score <= 10:
                    raise InvalidMatrixError(
                        f"criterion {self.id}: category {label!r} scored {score}, outside [0, 10]"
                    )

    @property
    def beneficial(self) -> bool:
        return self.direction == BENEFICIAL

    def encode(self, value) -> float:
        """Numeric performance for a raw cell, via the categorical map if any."""
        if self.categorical_map is not None and isinstance(value, str):
            try:
                return float(self.categorical_map[value])
            except KeyError:
                raise InvalidMatrixError(f"criterion {self.id}: unknown category {value!r}") from None
        return float(value)


def check_unique_ids(criteria: Sequence[CriterionSpec]) -> None:
    seen = set()
    for c in criteria:
        if c.id in seen:
            raise InvalidMatrixError(f"duplicate criterion id {c.id!r}")
        seen.add(c.id)


@dataclass(frozen=True)
class BestWorstPreference:
    """One expert's best-to-others and others-to-worst comparison vectors.

    ``best`` and ``worst`` are 0-based criterion indices. ``criteria`` holds
    the criterion ids when known and is only used for messages and export.
    """

    expert_id: str
    best: int
    worst: int
    a_best: tuple[int, ...]
    a_worst: tuple[int, ...]
    criteria: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a_best", tuple(self.a_best))
        object.__setattr__(self, "a_worst", tuple(self.a_worst))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        n = len(self.a_best)
        label = self._label
        if len(self.a_worst) != n:
            raise InvalidPreferenceError(
                f"expert {self.expert_id}: a_best has {n} entries, a_worst {len(self.a_worst)}"
            )
        if self.criteria and len(self.criteria) != n:
            raise InvalidPreferenceError(
                f"expert {self.expert_id}: {len(self.criteria)} criteria but {n} comparisons"
            )
        if n < 2:
            raise InvalidPreferenceError(f"expert {self.expert_id}: need at least two criteria")
        if not (0 <= self.best < n and 0 <= self.worst < n):
            raise InvalidPreferenceError(f"expert {self.expert_id}: best/worst index out of range")
        if self.best == self.worst:
            raise InvalidPreferenceError(f"expert {self.expert_id}: best and worst are the same criterion")
        for name, vec in (("a_best", self.a_best), ("a_worst", self.a_worst)):
            for j, v in enumerate(vec):
                if isinstance(v, bool) or int(v) != v:
                    raise InvalidPreferenceError(
                        f"expert {self.expert_id}: {name}[{label(j)}] = {v} is not an integer"
                    )
                if not 1 <= v <= 9:
                    raise InvalidPreferenceError(
                        f"expert {self.expert_id}: {name}[{label(j)}] = {v} outside [1, 9]"
                    )
        object.__setattr__(self, "a_best", tuple(int(v) for v in self.a_best))
        object.__setattr__(self, "a_worst", tuple(int(v) for v in self.a_worst))
        if self.a_best[self.best] != 1:
            raise InvalidPreferenceError(
                f"expert {self.expert_id}: a_best[{label(self.best)}] must be 1 (best vs itself)"
            )
        if self.a_worst[self.worst] != 1:
            raise InvalidPreferenceError(
                f"expert {self.expert_id}: a_worst[{label(self.worst)}] must be 1 (worst vs itself)"
            )
        if self.a_worst[self.best] != self.a_best[self.worst]:
            raise InvalidPreferenceError(
                f"expert {self.expert_id}: a_worst[{label(self.best)}] = {self.a_worst[self.best]} "
                f"differs from a_best[{label(self.worst)}] = {self.a_best[self.worst]}"
            )

    def _label(self, j: int) -> str:
        return self.criteria[j] if self.criteria else str(j)

    @property
    def n(self) -> int:
        return len(self.a_best)

    @property
    def a_bw(self) -> int:
        return self.a_best[self.worst]

    def is_consistent(self) -> bool:
        return all(ab * aw == self.a_bw for ab, aw in zip(self.a_best, self.a_worst))

    def permuted(self, order: Sequence[int]) -> "BestWorstPreference":
        """Relabel criteria so that new criterion ``i`` is old ``order[i]``."""
        inv = {old: new for new, old in enumerate(order)}
        return BestWorstPreference(
            self.expert_id,
            inv[self.best],
            inv[self.worst],
            tuple(self.a_best[o] for o in order),
            tuple(self.a_worst[o] for o in order),
            tuple(self.criteria[o] for o in order) if self.criteria else (),
        )


@dataclass(frozen=True)
class WeightResult:
    weights: np.ndarray
    xi_star: float
    consistent: bool


@dataclass(frozen=True)
class MCMCConfig:
    chains: int = 3
    iterations: int = 20_000
    burn_in: int = 10_000
    thinning: int = 10
    seed: int = 0
    gamma_shape: float = 0.1
    gamma_rate: float = 0.1
    dirichlet_alpha: float = 1.0

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in ("gamma_shape", "gamma_rate", "dirichlet_alpha"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def retained_per_chain(self) -> int:
        return len(range(self.burn_in, self.iterations, self.thinning))


@dataclass(frozen=True)
class WeightPosterior:
    agg_samples: np.ndarray
    agg_mean: np.ndarray
    expert_means: np.ndarray
    gamma_samples: np.ndarray
    acceptance_rate: float
    config: MCMCConfig
    expert_samples: np.ndarray = field(repr=False, default=None)

    @property
    def n_draws(self) -> int:
        return self.agg_samples.shape[0]

    def summary(self) -> dict:
        return {
            "agg_mean": self.agg_mean.tolist(),
            "expert_means": self.expert_means.tolist(),
            "gamma_mean": float(self.gamma_samples.mean()),
            "acceptance_rate": self.acceptance_rate,
            "draws": self.n_draws,
        }


@dataclass(frozen=True)
class DecisionMatrix:
    alternatives: tuple[str, ...]
    criteria: tuple[CriterionSpec, ...]
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2:
            raise InvalidMatrixError("decision matrix must be two-dimensional")
        m, n = vals.shape
        if m == 0 or n == 0:
            raise InvalidMatrixError("decision matrix is empty")
        if len(self.alternatives) != m:
            raise InvalidMatrixError(f"{len(self.alternatives)} labels for {m} rows")
        if len(self.criteria) != n:
            raise InvalidMatrixError(f"{len(self.criteria)} criteria for {n} columns")
        check_unique_ids(self.criteria)
        if not np.all(np.isfinite(vals)):
            raise InvalidMatrixError("decision matrix contains non-finite values")
        if self.normalized:
            if np.any(vals <= 0) or np.any(vals > 1):
                raise InvalidMatrixError("normalized values must lie in (0, 1]")
        elif np.any(vals <= 0):
            i, j = map(int, np.argwhere(vals <= 0)[0])
            raise InvalidMatrixError(
                f"non-positive entry {vals[i, j]} at ({self.alternatives[i]}, {self.criteria[j].id})"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class WaspasResult:
    alternatives: tuple[str, ...]
    q1: np.ndarray
    q2: np.ndarray
    lam: np.ndarray
    q: np.ndarray
    var_q1: np.ndarray
    var_q2: np.ndarray
    ranking: tuple[int, ...]

    def ranked_labels(self) -> list[str]:
        return [self.alternatives[i] for i in self.ranking]
