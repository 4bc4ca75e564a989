"""Dataset loading, missing-data masks, standardization, synthetic instances.

File formats:

* CSV: UTF-8, comma separated, mandatory header row; label columns are the
  ones whose header starts with ``label:``, everything else is a numeric
  feature. Labels may arrive as {-1,+1} or {0,1}; zeros are remapped to -1.
* ARFF: numeric feature attributes followed by a trailing block of {0,1}
  nominal label attributes (the usual layout of multi-label benchmark
  files). Sparse ARFF, string, date and relational attributes are rejected.
* Mask files: text lines ``X i j`` / ``Y i j`` with zero-based indices,
  one observed entry per line.
"""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path
from dataclasses import dataclass

import numpy as np
from scipy.io import arff

from .errors import (
    DegenerateColumnError,
    EmptyTrainingError,
    ParseError,
    SchemaError,
    UnsupportedAttributeError,
)

__all__ = [
    "Dataset",
    "MaskSpec",
    "SyntheticModel",
    "ColumnTransform",
    "load_csv",
    "load_arff",
    "standardize",
    "mcar_mask",
    "block_loss",
    "synthesize",
    "save_masks",
    "load_masks",
]

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dataset:
    """A fully observed multi-label dataset: features plus {-1,+1} labels."""

    name: str
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.features, dtype=float)
        l = np.asarray(self.labels, dtype=float)
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "labels", l)
        if f.ndim != 2 or l.ndim != 2 or f.shape[0] != l.shape[0]:
            raise SchemaError("features and labels must be 2-D with matching rows")
        if not np.all(np.isin(l, (-1.0, 1.0))):
            raise SchemaError("labels must be -1 or +1")

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
class MaskSpec:
    """Observation rate, optional block-loss fraction, and the mask seed."""

    observation_rate: float
    block_loss_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.observation_rate <= 1.0:
            raise ValueError("observation_rate must be in (0, 1]")
        if not 0.0 <= self.block_loss_fraction < 1.0:
            raise ValueError("block_loss_fraction must be in [0, 1)")


@dataclass(frozen=True)
class SyntheticModel:
    """Ground truth behind a synthetic instance: soft labels are X0 W^T + b."""

    weight: np.ndarray
    bias: np.ndarray
    pre_features: np.ndarray


@dataclass(frozen=True)
class ColumnTransform:
    """Per-column affine transform recorded by standardize, invertible."""

    mean: np.ndarray
    scale: np.ndarray

    def apply(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.scale

    def invert(self, standardized: np.ndarray) -> np.ndarray:
        return standardized * self.scale + self.mean


def _binary_labels(raw: np.ndarray, source: str) -> np.ndarray:
    """Map a label column to {-1,+1}, accepting the {0,1} convention."""
    values = set(np.unique(raw).tolist())
    if values <= {-1.0, 1.0}:
        return raw
    if values <= {0.0, 1.0}:
        _log.info("%s: {0,1} labels mapped to {-1,+1}", source)
        return np.where(raw == 0.0, -1.0, 1.0)
    raise SchemaError(f"{source}: label values must be binary, got {sorted(values)}")


def load_csv(path) -> Dataset:
    """Read a header-and-rows CSV file into a Dataset.

    Label columns are recognized by the ``label:`` header prefix; every
    other column must parse as a float feature.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]

    def _is_float(cell: str) -> bool:
        try:
            float(cell)
            return True
        except ValueError:
            return False

    if all(_is_float(c) for c in header):
        raise SchemaError(f"{path}: missing header row")
    label_cols = [j for j, name in enumerate(header) if name.startswith("label:")]
    if not label_cols:
        raise SchemaError(f"{path}: no label columns (expected 'label:' prefix)")
    feature_cols = [j for j in range(len(header)) if j not in label_cols]

    parsed = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: line {i} has {len(row)} cells, expected {len(header)}", row=i)
        for j, cell in enumerate(row):
            try:
                parsed[i - 2, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric value {cell.strip()!r} at line {i}, column {header[j]!r}",
                    row=i,
                    column=header[j],
                ) from None

    features = parsed[:, feature_cols]
    labels = np.column_stack(
        [_binary_labels(parsed[:, j], f"{path}:{header[j]}") for j in label_cols]
    )
    return Dataset(name=Path(path).stem, features=features, labels=labels)


def load_arff(path, label_count: int | None = None) -> Dataset:
    """Read an attribute-relation file into a Dataset.

    The label block is the trailing run of {0,1}-nominal attributes, or the
    last ``label_count`` attributes when given explicitly.
    """
    try:
        data, meta = arff.loadarff(path)
    except (arff.ParseArffError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    names = list(meta.names())
    types = [meta[name][0] for name in names]
    for name, kind in zip(names, types):
        if kind not in ("numeric", "nominal"):
            raise UnsupportedAttributeError(f"{path}: attribute {name!r} has type {kind!r}")

    def _is_binary_nominal(name: str) -> bool:
        kind, values = meta[name]
        return kind == "nominal" and values is not None and set(values) <= {"0", "1"}

    if label_count is None:
        label_count = 0
        for name in reversed(names):
            if _is_binary_nominal(name):
                label_count += 1
            else:
                break
        if label_count == 0:
            raise SchemaError(f"{path}: no trailing {{0,1}} nominal label attributes")
    if not 0 < label_count < len(names):
        raise SchemaError(f"{path}: label_count {label_count} out of range for {len(names)} attributes")

    feat_names = names[: len(names) - label_count]
    label_names = names[len(names) - label_count :]
    for name in feat_names:
        if meta[name][0] != "numeric":
            raise UnsupportedAttributeError(f"{path}: non-numeric feature attribute {name!r}")

    def _column(name: str) -> np.ndarray:
        col = data[name]
        if col.dtype.kind == "S":
            try:
                return col.astype(float)
            except ValueError:
                raise SchemaError(f"{path}: attribute {name!r} has non-numeric nominal values") from None
        return col.astype(float)

    features = np.column_stack([_column(name) for name in feat_names])
    labels = np.column_stack(
        [_binary_labels(_column(name), f"{path}:{name}") for name in label_names]
    )
    return Dataset(name=Path(path).stem, features=features, labels=labels)


def standardize(features: np.ndarray, observed: np.ndarray):
    """Shift and scale each column to observed-entry mean 0 and sd 1.

    Statistics use only observed entries (sample standard deviation);
    columns with zero observed variance are centered but not scaled. The
    transform applies to the whole column so unobserved positions move
    consistently, and is returned for inversion.

    Returns
    -------
    (standardized, transform) : (ndarray, ColumnTransform)
    """
    features = np.asarray(features, dtype=float)
    observed = np.asarray(observed, dtype=bool)
    if features.shape != observed.shape:
        raise ValueError("observed mask shape must match features")
    n, d = features.shape
    counts = observed.sum(axis=0)
    if np.any(counts < 2):
        bad = int(np.argmin(counts))
        raise DegenerateColumnError(
            f"column {bad} has {int(counts[bad])} observed entries; need at least 2"
        )
    mean = np.empty(d)
    scale = np.empty(d)
    for j in range(d):
        vals = features[observed[:, j], j]
        mean[j] = vals.mean()
        sd = vals.std(ddof=1)
        scale[j] = sd if sd > 0 else 1.0
    transform = ColumnTransform(mean=mean, scale=scale)
    return transform.apply(features), transform


def mcar_mask(n: int, d: int, t: int, spec: MaskSpec):
    """Independent entrywise observation over the concatenated data.

    Each of the ``n * (d + t)`` feature-and-label positions is observed
    with probability ``observation_rate``, from one seeded draw over the
    concatenation (features first, then labels).

    Returns
    -------
    (observed_features, observed_labels) : (bool (n, d), bool (n, t))
    """
    rng = np.random.default_rng(spec.seed)
    joint = rng.random((n, d + t)) < spec.observation_rate
    return joint[:, :d].copy(), joint[:, d:].copy()


def block_loss(observed_labels: np.ndarray, n: int, t: int, fraction: float, seed: int):
    """Remove every label observation in a random block of rows.

    Selects ``ceil(fraction * n)`` rows without replacement and clears
    their label observations; those rows are the scenario's test set.

    Returns
    -------
    (observed_labels, block_rows) : (bool (n, t), int array)
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    observed_labels = np.asarray(observed_labels, dtype=bool)
    if observed_labels.shape != (n, t):
        raise ValueError("mask shape must be (n, t)")
    k = math.ceil(fraction * n)
    if k >= n:
        raise EmptyTrainingError(f"block of {k} rows would leave no training rows out of {n}")
    rng = np.random.default_rng(seed)
    block_rows = np.sort(rng.choice(n, size=k, replace=False))
    out = observed_labels.copy()
    out[block_rows, :] = False
    return out, block_rows


def synthesize(n: int, d: int, t: int, r: int, noise_sd: float, seed: int):
    """Draw a rank-r instance from the linear soft-label model.

    ``X0 = A B`` with standard-normal factors, soft labels
    ``Y0 = X0 W^T + 1 b^T``, hard labels their signs (re-drawn in the
    measure-zero event of an exact zero), features ``X0`` plus optional
    Gaussian noise. The stacked ground truth [Y0, X0, 1] has rank <= r + 1.

    Returns
    -------
    (dataset, model) : (Dataset, SyntheticModel)
    """
    if r > min(n, d):
        raise ValueError("rank r cannot exceed min(n, d)")
    rng = np.random.default_rng(seed)
    pre = rng.standard_normal((n, r)) @ rng.standard_normal((r, d))
    while True:
        weight = rng.standard_normal((t, d))
        bias = rng.standard_normal(t)
        soft = pre @ weight.T + bias
        if np.all(soft != 0.0):
            break
    hard = np.sign(soft)
    features = pre + noise_sd * rng.standard_normal((n, d)) if noise_sd > 0 else pre.copy()
    ds = Dataset(name=f"synthetic(n={n},d={d},t={t},r={r},seed={seed})", features=features, labels=hard)
    return ds, SyntheticModel(weight=weight, bias=bias, pre_features=pre)


def save_masks(path, observed_features: np.ndarray, observed_labels: np.ndarray) -> None:
    """Write observed positions as ``X i j`` / ``Y i j`` lines, zero-based."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in zip(*np.nonzero(observed_features)):
            fh.write(f"X {i} {j}\n")
        for i, j in zip(*np.nonzero(observed_labels)):
            fh.write(f"Y {i} {j}\n")


def load_masks(path, n: int, d: int, t: int):
    """Read a mask file back into boolean (n, d) and (n, t) arrays."""
    obs_x = np.zeros((n, d), dtype=bool)
    obs_y = np.zeros((n, t), dtype=bool)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3 or parts[0] not in ("X", "Y"):
                raise ParseError(f"{path}: bad mask line {lineno}: {line.strip()!r}", row=lineno)
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"{path}: bad indices on line {lineno}", row=lineno) from None
            target, cols = (obs_x, d) if parts[0] == "X" else (obs_y, t)
            if not (0 <= i < n and 0 <= j < cols):
                raise ParseError(f"{path}: index out of range on line {lineno}", row=lineno)
            target[i, j] = True
    return obs_x, obs_y
