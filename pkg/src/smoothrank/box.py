"""Box constraints on the stacked matrix and Euclidean projection onto them.

Every constraint of the completion problem is an interval on a single entry:
observed features pin their entry to the observed value, observed labels
restrict their entry to the half-line matching the label sign, the trailing
column is pinned to 1, and everything else is free. Projection is therefore
an entrywise median (clip), which is what both solvers call every iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInstanceError
from .model import ProblemInstance, StackedMatrix

__all__ = ["BoxBounds", "build_bounds", "project", "is_feasible"]


@dataclass(frozen=True)
class BoxBounds:
    """Per-entry interval bounds, with IEEE infinities for free directions."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.shape != hi.shape:
            raise InvalidInstanceError("bound matrices must share a shape")
        if np.any(lo > hi):
            raise InvalidInstanceError("lower bound exceeds upper bound somewhere")


def build_bounds(instance: ProblemInstance) -> BoxBounds:
    """Translate an instance's observations into entrywise intervals.

    Label +1 gives [0, inf), label -1 gives (-inf, 0], an observed feature
    gives the degenerate interval at its value, the ones column is pinned,
    and unobserved entries are unconstrained. Zero is feasible for either
    label sign, so the box is never empty.
    """
    n, d, t = instance.n, instance.d, instance.t
    width = t + d + 1
    lower = np.full((n, width), -np.inf)
    upper = np.full((n, width), np.inf)

    pos = instance.observed_labels & (instance.labels > 0)
    neg = instance.observed_labels & (instance.labels < 0)
    lower[:, :t][pos] = 0.0
    upper[:, :t][neg] = 0.0

    feat_lo = lower[:, t : t + d]
    feat_hi = upper[:, t : t + d]
    feat_lo[instance.observed_features] = instance.features[instance.observed_features]
    feat_hi[instance.observed_features] = instance.features[instance.observed_features]

    lower[:, -1] = 1.0
    upper[:, -1] = 1.0
    return BoxBounds(lower, upper)


def project(z: StackedMatrix, bounds: BoxBounds) -> StackedMatrix:
    """Entrywise median of (lower, value, upper), i.e. clip onto the box."""
    if bounds.lower.shape != z.entries.shape:
        raise InvalidInstanceError("bounds shape does not match matrix shape")
    return z.with_entries(np.clip(z.entries, bounds.lower, bounds.upper))


def is_feasible(z: StackedMatrix, bounds: BoxBounds, tol: float = 0.0) -> bool:
    """True iff every entry lies in [lower - tol, upper + tol]."""
    if bounds.lower.shape != z.entries.shape:
        raise InvalidInstanceError("bounds shape does not match matrix shape")
    e = z.entries
    return bool(np.all(e >= bounds.lower - tol) and np.all(e <= bounds.upper + tol))
