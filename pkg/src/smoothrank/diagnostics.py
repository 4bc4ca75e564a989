"""Checks that connect the solver to its recovery guarantees.

The pieces here answer three practical questions about an instance:

* which coordinates does the observation process actually pin
  (:class:`AffineObservationOperator`),
* how well-conditioned is that operator for low-rank recovery, measured by
  a sampled upper bound on its spherical section constant
  (:func:`spherical_section_estimate`),
* how small must the smoothing width be before the annealed solution is
  provably close to the ground truth (:func:`alpha_delta`,
  :func:`recovery_bound`).

A fourth helper, :func:`qra_check`, numerically audits the properties the
surrogate function must satisfy for any of this to apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundUndefinedError, TrivialNullSpaceError
from .model import ProblemInstance
from .objective import QraProfile, qra_value

__all__ = [
    "AffineObservationOperator",
    "RecoveryBound",
    "QraCheckReport",
    "alpha_delta",
    "recovery_bound",
    "rank_assumption_holds",
    "spherical_section_estimate",
    "qra_check",
]


@dataclass(frozen=True)
class AffineObservationOperator:
    """Coordinate-keeping operator of a completion instance.

    The operator retains the equality-constrained coordinates: the observed
    feature entries and the trailing all-ones column. Label coordinates are
    never kept, because sign constraints pin a half-line rather than a value.
    Its null space is the set of matrices supported on the free coordinates.
    """

    shape: tuple[int, int]
    fixed_coords: frozenset[tuple[int, int]]

    def __post_init__(self):
        n1, n2 = self.shape
        if n1 < 1 or n2 < 1:
            raise ValueError("shape must be positive in both dimensions")
        object.__setattr__(self, "fixed_coords", frozenset(self.fixed_coords))
        for i, j in self.fixed_coords:
            if not (0 <= i < n1 and 0 <= j < n2):
                raise ValueError(f"fixed coordinate {(i, j)} outside shape {self.shape}")

    @classmethod
    def from_instance(cls, instance: ProblemInstance) -> "AffineObservationOperator":
        n, d, t = instance.n, instance.d, instance.t
        fixed = {(i, t + j) for i, j in zip(*np.nonzero(instance.observed_features))}
        fixed.update((i, t + d) for i in range(n))
        return cls(shape=(n, t + d + 1), fixed_coords=frozenset(fixed))

    @property
    def free_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        for i, j in self.fixed_coords:
            mask[i, j] = False
        return mask


@dataclass(frozen=True)
class RecoveryBound:
    """Worst-case distance between the annealed solution and the truth.

    ``bound = n * alpha_delta / (sqrt(D) - sqrt(ceil(D - 1)))`` where ``D``
    is the spherical section constant. The bound shrinks linearly with the
    smoothing width, which is what makes annealing consistent.
    """

    delta: float
    n: int
    spherical_constant: float
    alpha_delta: float
    bound: float


@dataclass(frozen=True)
class QraCheckReport:
    """Outcome of the four surrogate-function property checks."""

    symmetric: bool
    unit_only_at_zero: bool
    concave_near_zero: bool
    tail_decays: bool

    @property
    def all_pass(self) -> bool:
        return self.symmetric and self.unit_only_at_zero and self.concave_near_zero and self.tail_decays


def alpha_delta(profile: QraProfile, n: int) -> float:
    """Width of the surrogate's influence zone: where f drops to 1/n.

    For the Gaussian family this is ``delta * sqrt(2 ln n)``. Singular values
    larger than this contribute less than 1/n to the surrogate sum, so they
    are effectively invisible to the rank estimate.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n == 1:
        return 0.0
    return profile.delta * math.sqrt(2.0 * math.log(n))


def rank_assumption_holds(rank: int, spherical_constant: float) -> bool:
    """Advisory check of the recovery hypothesis: twice the true rank must
    stay below the spherical section constant."""
    if rank < 0:
        raise ValueError("rank must be nonnegative")
    return 2 * rank < spherical_constant


def recovery_bound(profile: QraProfile, n: int, spherical_constant: float) -> RecoveryBound:
    """Evaluate the worst-case recovery error at one smoothing width.

    Raises :class:`BoundUndefinedError` when the denominator
    ``sqrt(D) - sqrt(ceil(D - 1))`` is not positive, in which case the
    hypothesis behind the bound fails and no guarantee exists.
    """
    if spherical_constant <= 0:
        raise ValueError("spherical_constant must be positive")
    alpha = alpha_delta(profile, n)
    ceil_term = max(0, math.ceil(spherical_constant - 1.0))
    denominator = math.sqrt(spherical_constant) - math.sqrt(ceil_term)
    if denominator <= 0.0:
        raise BoundUndefinedError(
            f"denominator sqrt({spherical_constant}) - sqrt({ceil_term}) is not positive"
        )
    return RecoveryBound(
        delta=profile.delta,
        n=int(n),
        spherical_constant=float(spherical_constant),
        alpha_delta=alpha,
        bound=int(n) * alpha / denominator,
    )


def spherical_section_estimate(
    op: AffineObservationOperator, samples: int = 1000, seed: int = 0
) -> float:
    """Sampled upper bound on the spherical section constant of ``op``.

    Draws random matrices supported on the free coordinates (the null space
    of the coordinate-keeping map) and returns the smallest observed ratio
    ``nuclear_norm(Z)^2 / frobenius_norm(Z)^2``. The true constant is the
    infimum over the whole null space, so sampling can only overestimate it.
    The estimate never drops below 1 and is deterministic given ``seed``.
    """
    if samples < 1:
        raise ValueError("samples must be a positive integer")
    free = op.free_mask
    n_free = int(free.sum())
    if n_free == 0:
        raise TrivialNullSpaceError("operator keeps every coordinate; null space is {0}")
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((samples, n_free))
    best = math.inf
    z = np.zeros(op.shape)
    for row in draws:
        z[free] = row
        s = np.linalg.svd(z, compute_uv=False)
        ratio = float(np.sum(s) ** 2 / np.sum(s**2))
        best = min(best, ratio)
    return best


def qra_check(profile: QraProfile, grid) -> QraCheckReport:
    """Audit the surrogate on a symmetric grid of evaluation points.

    Checks that the function is even, peaks at 1 only at the origin, is
    concave in the core region ``|x| <= delta/2``, and has decayed below
    0.01 at the grid edge (which must reach at least four widths out for
    the tail check to count).
    """
    x = np.sort(np.asarray(grid, dtype=float))
    if x.size < 3:
        raise ValueError("grid needs at least three points")
    if not np.allclose(x, -x[::-1], atol=1e-12 * max(1.0, float(np.max(np.abs(x))))):
        raise ValueError("grid must be symmetric around 0")
    f = np.asarray(qra_value(profile, x))

    symmetric = bool(np.allclose(f, f[::-1], rtol=0, atol=1e-12))

    at_zero = np.isclose(x, 0.0, atol=1e-15)
    unit = np.isclose(f, 1.0, rtol=0, atol=1e-12)
    unit_only_at_zero = bool(np.all(unit == at_zero)) and bool(np.any(at_zero))

    core = np.abs(x) <= profile.delta / 2 + 1e-15
    concave = True
    idx = np.nonzero(core)[0]
    for k in idx:
        if k == 0 or k == x.size - 1:
            continue
        h1, h2 = x[k] - x[k - 1], x[k + 1] - x[k]
        second = (f[k + 1] - f[k]) / h2 - (f[k] - f[k - 1]) / h1
        if second > 1e-12:
            concave = False
            break

    x_max = float(np.max(np.abs(x)))
    tail_decays = x_max >= 4 * profile.delta and float(f[0]) < 0.01 and float(f[-1]) < 0.01

    return QraCheckReport(
        symmetric=symmetric,
        unit_only_at_zero=unit_only_at_zero,
        concave_near_zero=concave,
        tail_decays=tail_decays,
    )
