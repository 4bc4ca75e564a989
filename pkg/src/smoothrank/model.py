"""Problem instances, the stacked working matrix, and solver configuration.

The working object of the whole package is the stacked matrix
``Z = [labels | features | 1]`` of shape ``n x (t + d + 1)``: soft labels in
the first ``t`` columns, features in the next ``d``, and a trailing all-ones
column. Both solvers operate on this matrix; everything else (bounds,
objective, evaluation) is defined relative to its column zones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInstanceError

__all__ = [
    "ProblemInstance",
    "StackedMatrix",
    "SolverConfig",
    "SolverReport",
    "stack",
    "unstack",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    """Copy to a C-contiguous float array and lock it against writes."""
    out = np.array(a, dtype=float, copy=True, order="C")
    out.flags.writeable = False
    return out


def _frozen_bool(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=bool, copy=True, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ProblemInstance:
    """Partially observed features and hard labels.

    Parameters
    ----------
    features : (n, d) float array
        Feature matrix; entries outside ``observed_features`` are ignored
        (conventionally 0).
    labels : (n, t) float array
        Hard labels in {-1, 0, +1}: +-1 on observed entries, 0 elsewhere.
    observed_features : (n, d) bool array
        Observation mask for ``features``.
    observed_labels : (n, t) bool array
        Observation mask for ``labels``.
    """

    features: np.ndarray
    labels: np.ndarray
    observed_features: np.ndarray
    observed_labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen(self.features))
        object.__setattr__(self, "labels", _frozen(self.labels))
        object.__setattr__(self, "observed_features", _frozen_bool(self.observed_features))
        object.__setattr__(self, "observed_labels", _frozen_bool(self.observed_labels))
        if self.features.ndim != 2 or self.labels.ndim != 2:
            raise InvalidInstanceError("features and labels must be 2-D")
        n, d = self.features.shape
        n2, t = self.labels.shape
        if n != n2:
            raise InvalidInstanceError(f"row mismatch: features has {n} rows, labels has {n2}")
        if self.observed_features.shape != (n, d):
            raise InvalidInstanceError("observed_features mask shape must match features")
        if self.observed_labels.shape != (n, t):
            raise InvalidInstanceError("observed_labels mask shape must match labels")
        obs = self.labels[self.observed_labels]
        if not np.all(np.isin(obs, (-1.0, 1.0))):
            raise InvalidInstanceError("observed labels must be exactly -1 or +1")
        if np.any(self.labels[~self.observed_labels] != 0.0):
            raise InvalidInstanceError("unobserved labels must be 0")
        if not np.all(np.isfinite(self.features[self.observed_features])):
            raise InvalidInstanceError("observed features must be finite")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def t(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class StackedMatrix:
    """The n x (t + d + 1) working matrix with column-zone semantics."""

    entries: np.ndarray
    label_width: int
    feature_width: int

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        if self.entries.ndim != 2:
            raise InvalidInstanceError("stacked matrix must be 2-D")
        t, d = self.label_width, self.feature_width
        if t < 0 or d < 0:
            raise InvalidInstanceError("zone widths must be nonnegative")
        if self.entries.shape[1] != t + d + 1:
            raise InvalidInstanceError(
                f"expected {t + d + 1} columns (t={t}, d={d}), got {self.entries.shape[1]}"
            )
        if not np.all(self.entries[:, -1] == 1.0):
            raise InvalidInstanceError("last column must be identically 1")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def label_zone(self) -> np.ndarray:
        return self.entries[:, : self.label_width]

    @property
    def feature_zone(self) -> np.ndarray:
        return self.entries[:, self.label_width : self.label_width + self.feature_width]

    def with_entries(self, entries: np.ndarray) -> "StackedMatrix":
        """Same zone widths, new values."""
        return StackedMatrix(entries, self.label_width, self.feature_width)


@dataclass(frozen=True)
class SolverConfig:
    """Shared configuration for both solvers.

    ``step_size`` is the fixed gradient-ascent step of the plain projected
    gradient solver. The spectral solver ignores it and instead uses
    Barzilai-Borwein steps clamped to ``[alpha_min, alpha_max]``, a
    nonmonotone acceptance test over the last ``memory_size`` objective
    values with sufficient-increase parameter ``sufficient_decrease``, and
    geometric backtracking by ``backtrack_factor``. Smoothing starts at
    ``delta_init_factor`` times the largest singular value of the start
    matrix and shrinks by ``delta_decay`` per annealing stage.
    """

    step_size: float = 3.0
    delta_decay: float = 0.7
    delta_init_factor: float = 25.0
    inner_tol: float = 1e-4
    outer_tol: float = 1e-3
    max_inner_iters: int = 200
    max_outer_iters: int = 60
    alpha_min: float = 0.1
    alpha_max: float = 3.0
    memory_size: int = 5
    sufficient_decrease: float = 0.1
    backtrack_factor: float = 0.35

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if not 0 < self.delta_decay < 1:
            raise ValueError("delta_decay must be in (0, 1)")
        if self.delta_init_factor <= 0:
            raise ValueError("delta_init_factor must be positive")
        if self.inner_tol <= 0 or self.outer_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_inner_iters < 1 or self.max_outer_iters < 1:
            raise ValueError("iteration limits must be positive")
        if self.alpha_min <= 0 or self.alpha_max < self.alpha_min:
            raise ValueError("need 0 < alpha_min <= alpha_max")
        if self.memory_size < 1:
            raise ValueError("memory_size must be >= 1")
        if not 0 <= self.sufficient_decrease < 1:
            raise ValueError("sufficient_decrease must be in [0, 1)")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must be in (0, 1)")


@dataclass(frozen=True)
class SolverReport:
    """Converged stacked matrix plus per-stage telemetry."""

    solution: StackedMatrix
    objective_trace: tuple  # of (delta, final objective value) per stage
    inner_iterations: tuple  # of int, per stage
    wall_time: float
    converged: bool
    stage_solutions: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "objective_trace", tuple(self.objective_trace))
        object.__setattr__(self, "inner_iterations", tuple(self.inner_iterations))
        if len(self.objective_trace) != len(self.inner_iterations):
            raise ValueError("objective_trace and inner_iterations lengths must agree")

    @property
    def stages(self) -> int:
        return len(self.inner_iterations)


def stack(instance: ProblemInstance) -> StackedMatrix:
    """Assemble the working matrix ``[labels | features | 1]``.

    Unobserved entries are carried as 0, which is the warm start both
    solvers expect.
    """
    n, d, t = instance.n, instance.d, instance.t
    if n == 0:
        raise InvalidInstanceError("instance has no rows")
    z = np.zeros((n, t + d + 1))
    z[:, :t][instance.observed_labels] = instance.labels[instance.observed_labels]
    z[:, t : t + d][instance.observed_features] = instance.features[instance.observed_features]
    z[:, -1] = 1.0
    return StackedMatrix(z, label_width=t, feature_width=d)


def unstack(z: StackedMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Split a stacked matrix into (soft_labels, completed_features).

    Hard labels, when needed, are the signs of the soft labels.
    """
    return np.array(z.label_zone), np.array(z.feature_zone)
