"""Smoothed rank surrogate and its gradient.

The rank of a matrix is the number of nonzero singular values, a count that
no gradient method can see. Replacing the indicator "sigma != 0" with a
smooth bump ``f_delta(x) = exp(-x^2 / (2 delta^2))`` gives the surrogate

    F_delta(Z) = sum_i f_delta(sigma_i(Z)),

so ``n - F_delta(Z)`` approximates rank(Z) and converges to it pointwise as
delta shrinks. F_delta is differentiable wherever the singular values are
distinct, with gradient ``U diag(f_delta'(sigma)) V^T`` in terms of the thin
SVD ``Z = U diag(sigma) V^T``. At exact ties the same formula is used as a
subgradient surrogate; ties are measure-zero under random inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError
from .model import StackedMatrix

__all__ = [
    "QraFamily",
    "QraProfile",
    "SpectralDecomposition",
    "decompose",
    "qra_value",
    "qra_derivative",
    "smoothed_rank",
    "smoothed_rank_gradient",
    "approx_rank",
]


class QraFamily(enum.Enum):
    """Available smoothing families. Only the Gaussian bump is implemented."""

    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class QraProfile:
    """A smoothing family together with its current width delta.

    Parameters
    ----------
    delta : float
        Smoothing width, strictly positive. Small delta makes the surrogate
        sharper (closer to true rank) but harder to optimize.
    family : QraFamily
        Which bump to use. Defaults to the Gaussian ``exp(-x^2/2)``.
    """

    delta: float
    family: QraFamily = QraFamily.GAUSSIAN

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise ValueError(f"delta must be positive and finite, got {self.delta}")
        if not isinstance(self.family, QraFamily):
            raise TypeError("family must be a QraFamily member")

    def rescaled(self, delta: float) -> "QraProfile":
        """Same family, new width. Used by the annealing loop."""
        return QraProfile(delta, self.family)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Thin SVD ``Z = U diag(s) V^T`` with orthonormality checked on entry."""

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.left_vectors, dtype=float)
        s = np.asarray(self.singular_values, dtype=float)
        v = np.asarray(self.right_vectors, dtype=float)
        object.__setattr__(self, "left_vectors", u)
        object.__setattr__(self, "singular_values", s)
        object.__setattr__(self, "right_vectors", v)
        k = s.shape[0]
        if u.ndim != 2 or v.ndim != 2 or u.shape[1] != k or v.shape[1] != k:
            raise DecompositionError("factor shapes inconsistent with singular value count")
        if np.any(s < 0) or np.any(s[:-1] < s[1:]):
            raise DecompositionError("singular values must be nonnegative and nonincreasing")
        if not np.allclose(u.T @ u, np.eye(k), atol=1e-10):
            raise DecompositionError("left vectors are not orthonormal")
        if not np.allclose(v.T @ v, np.eye(k), atol=1e-10):
            raise DecompositionError("right vectors are not orthonormal")


def _entries(z) -> np.ndarray:
    if isinstance(z, StackedMatrix):
        return z.entries
    return np.asarray(z, dtype=float)


def _svd(a: np.ndarray):
    """Thin SVD (u, s, vt) with the backend failure wrapped."""
    try:
        return np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed: {exc}") from exc


def decompose(z) -> SpectralDecomposition:
    """Thin SVD of a stacked matrix or plain 2-D array.

    Raises
    ------
    DecompositionError
        If the underlying iteration fails to converge.
    """
    u, s, vt = _svd(_entries(z))
    return SpectralDecomposition(u, s, vt.T)


def qra_value(profile: QraProfile, x):
    """Evaluate ``f_delta(x) = exp(-x^2 / (2 delta^2))``, elementwise.

    Symmetric in ``x``, equals 1 exactly at ``x = 0``, and decays to 0 in
    the tails; accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    out = np.exp(-(x * x) / (2.0 * profile.delta**2))
    return out if out.ndim else float(out)


def qra_derivative(profile: QraProfile, x):
    """Evaluate ``f_delta'(x) = -(x / delta^2) exp(-x^2 / (2 delta^2))``.

    Odd in ``x`` and zero at the origin; accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    d2 = profile.delta**2
    out = -(x / d2) * np.exp(-(x * x) / (2.0 * d2))
    return out if out.ndim else float(out)


def smoothed_rank(profile: QraProfile, z) -> float:
    """Sum of ``f_delta`` over the singular values of ``z``.

    Lies in (0, n] where n = min(z.shape); equals n exactly when z = 0.
    ``n - smoothed_rank`` is the rank surrogate.
    """
    a = _entries(z)
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed: {exc}") from exc
    return float(np.sum(qra_value(profile, s)))


def smoothed_rank_gradient(profile: QraProfile, z) -> np.ndarray:
    """Gradient of ``smoothed_rank`` with respect to the matrix entries.

    Computes ``G = U diag(theta) V^T`` with ``theta_i = f_delta'(sigma_i)``
    from the thin SVD. G is the ascent direction for the surrogate; both
    solvers step along +G.
    """
    u, s, vt = _svd(_entries(z))
    theta = qra_derivative(profile, s)
    return (u * theta) @ vt


def approx_rank(profile: QraProfile, z) -> float:
    """Rank surrogate ``n - smoothed_rank(z)``; tends to rank(z) as delta -> 0."""
    a = _entries(z)
    n = min(a.shape)
    return n - smoothed_rank(profile, a)
