"""Scoring, cross-validation, experiment grids, and report rendering.

The evaluation protocol treats completed soft labels as ranking scores.
AUC is computed by pooling every test (score, truth) pair across label
columns (micro averaging); a macro variant averages per-label AUC over the
labels where both classes appear. Feature error is RMSE in standardized
units so it is comparable across datasets.
"""

from __future__ import annotations

import io
import csv
import itertools
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import rankdata

from .data import Dataset, MaskSpec, block_loss, mcar_mask, standardize
from .errors import SmoothRankError, UndefinedAUCError
from .model import ProblemInstance, SolverConfig, StackedMatrix
from .solvers import Method, anneal

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "auc",
    "evaluate_labels",
    "feature_rmse",
    "build_instance",
    "cross_validate",
    "run_experiment",
    "render_report",
    "rows_from_csv",
    "method_name",
]

_log = logging.getLogger(__name__)

_METHOD_NAMES = {Method.PG: "srf1", Method.SPG: "srf2"}
_METHOD_BY_NAME = {v: k for k, v in _METHOD_NAMES.items()}

SCENARIOS = ("random", "block")
BLOCK_FRACTION = 0.10


def method_name(method: Method) -> str:
    return _METHOD_NAMES[method]


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment grid: dataset x method x scenario x observation rates."""

    dataset: Dataset
    method: Method
    scenario: str
    observation_rates: tuple
    trials: int = 10
    base_seed: int = 0
    config: SolverConfig = field(default_factory=SolverConfig)
    standardize: bool = True
    macro: bool = False

    def __post_init__(self):
        object.__setattr__(self, "observation_rates", tuple(self.observation_rates))
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not all(0.0 < r <= 1.0 for r in self.observation_rates):
            raise ValueError("observation rates must lie in (0, 1]")


@dataclass(frozen=True)
class ResultRow:
    """Aggregated outcome of one (dataset, method, rate) cell."""

    method: str
    dataset: str
    omega: float
    auc_mean: float
    auc_std: float
    time_mean: float
    failures: int = 0

    def __post_init__(self):
        if not 0.0 <= self.auc_mean <= 100.0:
            raise ValueError("auc_mean is a percentage in [0, 100]")


def auc(scores, truth) -> float:
    """Probability that a random positive outranks a random negative.

    Ties count one half; equals the Mann-Whitney U statistic normalized by
    the number of positive-negative pairs.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if scores.shape != truth.shape:
        raise ValueError("scores and truth must have the same length")
    if not np.all(np.isin(truth, (-1.0, 1.0))):
        raise ValueError("truth must be -1 or +1")
    pos = truth > 0
    n_pos = int(pos.sum())
    n_neg = truth.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError("AUC needs both a positive and a negative example")
    ranks = rankdata(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def evaluate_labels(
    solution: StackedMatrix,
    instance: ProblemInstance,
    test_mask: np.ndarray,
    truth_labels: np.ndarray,
    macro: bool = False,
) -> float:
    """AUC of the completed soft labels on the test entries.

    ``test_mask`` marks the evaluated entries of the label zone and must be
    disjoint from the instance's observed labels; ``truth_labels`` supplies
    the ground truth there. Micro averaging pools every test pair; macro
    averages per-label AUC over label columns where both classes appear.
    """
    test_mask = np.asarray(test_mask, dtype=bool)
    if test_mask.shape != instance.observed_labels.shape:
        raise ValueError("test mask shape must match the label zone")
    if np.any(test_mask & instance.observed_labels):
        raise ValueError("test entries overlap observed labels")
    if not test_mask.any():
        raise UndefinedAUCError("empty test set")
    scores = solution.label_zone
    truth_labels = np.asarray(truth_labels, dtype=float)
    if not macro:
        return auc(scores[test_mask], truth_labels[test_mask])
    per_label = []
    for j in range(test_mask.shape[1]):
        sel = test_mask[:, j]
        if not sel.any():
            continue
        col_truth = truth_labels[sel, j]
        if np.all(col_truth > 0) or np.all(col_truth < 0):
            continue
        per_label.append(auc(scores[sel, j], col_truth))
    if not per_label:
        raise UndefinedAUCError("no label column has both classes in the test set")
    return float(np.mean(per_label))


def feature_rmse(
    solution: StackedMatrix,
    instance: ProblemInstance,
    ground_truth: np.ndarray,
    holdout: np.ndarray,
) -> float:
    """Root-mean-square feature error over held-out entries."""
    holdout = np.asarray(holdout, dtype=bool)
    if holdout.shape != instance.observed_features.shape:
        raise ValueError("holdout mask shape must match the feature zone")
    if np.any(holdout & instance.observed_features):
        raise ValueError("holdout entries overlap observed features")
    if not holdout.any():
        raise ValueError("empty holdout set")
    diff = solution.feature_zone[holdout] - np.asarray(ground_truth, dtype=float)[holdout]
    return float(np.sqrt(np.mean(diff * diff)))


def build_instance(
    dataset: Dataset,
    observed_features: np.ndarray,
    observed_labels: np.ndarray,
    standardize_features: bool = True,
):
    """Assemble a ProblemInstance from a dataset and observation masks.

    Feature statistics for standardization come from observed entries only.

    Returns
    -------
    (instance, transform) : (ProblemInstance, ColumnTransform or None)
    """
    feats = dataset.features
    transform = None
    if standardize_features:
        feats, transform = standardize(feats, observed_features)
    labels = np.where(observed_labels, dataset.labels, 0.0)
    instance = ProblemInstance(
        features=feats,
        labels=labels,
        observed_features=observed_features,
        observed_labels=observed_labels,
    )
    return instance, transform


def _trial_masks(dataset: Dataset, scenario: str, rate: float, seed: int):
    """Masks plus the label-zone test mask for one trial."""
    obs_x, obs_y = mcar_mask(dataset.n, dataset.d, dataset.t, MaskSpec(rate, seed=seed))
    if scenario == "block":
        obs_y, rows = block_loss(obs_y, dataset.n, dataset.t, BLOCK_FRACTION, seed)
        test = np.zeros_like(obs_y)
        test[rows, :] = True
    else:
        test = ~obs_y
    return obs_x, obs_y, test


def run_experiment(spec: ExperimentSpec):
    """Run the full grid and aggregate one ResultRow per observation rate.

    Trial ``i`` uses seed ``base_seed + i`` for its masks. A failed trial is
    logged with its seed and excluded from the aggregate; the failure count
    is carried on the row.
    """
    rows = []
    name = method_name(spec.method)
    for rate in spec.observation_rates:
        aucs, times = [], []
        failures = 0
        for trial in range(spec.trials):
            seed = spec.base_seed + trial
            try:
                obs_x, obs_y, test = _trial_masks(spec.dataset, spec.scenario, rate, seed)
                instance, _ = build_instance(spec.dataset, obs_x, obs_y, spec.standardize)
                report = anneal(instance, spec.config, spec.method)
                score = evaluate_labels(
                    report.solution, instance, test, spec.dataset.labels, macro=spec.macro
                )
            except SmoothRankError as exc:
                failures += 1
                _log.warning(
                    "trial failed (dataset=%s method=%s omega=%.2f seed=%d): %s",
                    spec.dataset.name, name, rate, seed, exc,
                )
                continue
            aucs.append(100.0 * score)
            times.append(report.wall_time)
        if not aucs:
            raise SmoothRankError(
                f"every trial failed for dataset={spec.dataset.name} omega={rate}"
            )
        std = float(np.std(aucs, ddof=1)) if len(aucs) > 1 else 0.0
        rows.append(
            ResultRow(
                method=name,
                dataset=spec.dataset.name,
                omega=float(rate),
                auc_mean=float(np.mean(aucs)),
                auc_std=std,
                time_mean=float(np.mean(times)),
                failures=failures,
            )
        )
    return rows


def cross_validate(spec: ExperimentSpec, ranges=None) -> SolverConfig:
    """Pick the config maximizing validation AUC over a small grid.

    Holds out 20% of the observed label entries of one trial instance
    (first observation rate, base seed), solves with every grid point, and
    returns the best-scoring config; ties go to the earlier grid point.
    Default grids: step_size (or alpha_max for the spectral solver) in
    {1, 2, 3, 5} and delta_decay in {0.5, 0.7, 0.9}.
    """
    if ranges is None:
        knob = "step_size" if spec.method is Method.PG else "alpha_max"
        ranges = {knob: (1.0, 2.0, 3.0, 5.0), "delta_decay": (0.5, 0.7, 0.9)}
    keys = list(ranges)
    rate = spec.observation_rates[0]
    dataset = spec.dataset
    obs_x, obs_y, _ = _trial_masks(dataset, spec.scenario, rate, spec.base_seed)

    rng = np.random.default_rng(spec.base_seed)
    observed_positions = np.argwhere(obs_y)
    k = max(1, int(round(0.2 * len(observed_positions))))
    held = observed_positions[rng.choice(len(observed_positions), size=k, replace=False)]
    val_mask = np.zeros_like(obs_y)
    val_mask[held[:, 0], held[:, 1]] = True
    train_obs_y = obs_y & ~val_mask

    instance, _ = build_instance(dataset, obs_x, train_obs_y, spec.standardize)
    best = None
    for combo in itertools.product(*(ranges[k] for k in keys)):
        config = replace(spec.config, **dict(zip(keys, combo)))
        report = anneal(instance, config, spec.method)
        try:
            score = evaluate_labels(
                report.solution, instance, val_mask, dataset.labels, macro=spec.macro
            )
        except UndefinedAUCError:
            continue
        if best is None or score > best[0]:
            best = (score, config)
    if best is None:
        raise UndefinedAUCError("no grid point produced a defined validation AUC")
    return best[1]


def render_report(rows) -> tuple[str, str]:
    """Aligned text table plus machine-readable CSV for the same rows."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to render")
    header = ("dataset", "method", "omega", "auc", "time_s")
    cells = [
        (
            row.dataset,
            row.method,
            f"{100.0 * row.omega:.0f}%",
            f"{row.auc_mean:.1f} ({row.auc_std:.1f})",
            f"{row.time_mean:.2f}",
        )
        for row in rows
    ]
    widths = [max(len(header[j]), *(len(c[j]) for c in cells)) for j in range(len(header))]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    table = "\n".join(lines)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "dataset", "omega", "auc_mean", "auc_std", "time_mean", "failures"])
    for row in rows:
        writer.writerow(
            [
                row.method,
                row.dataset,
                repr(row.omega),
                repr(row.auc_mean),
                repr(row.auc_std),
                repr(row.time_mean),
                row.failures,
            ]
        )
    return table, buf.getvalue()


def rows_from_csv(text: str):
    """Parse render_report's CSV back into ResultRow objects."""
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for rec in reader:
        rows.append(
            ResultRow(
                method=rec["method"],
                dataset=rec["dataset"],
                omega=float(rec["omega"]),
                auc_mean=float(rec["auc_mean"]),
                auc_std=float(rec["auc_std"]),
                time_mean=float(rec["time_mean"]),
                failures=int(rec["failures"]),
            )
        )
    return rows
