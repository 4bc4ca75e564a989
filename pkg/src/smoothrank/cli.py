"""Command-line entry points.

Four subcommands cover the package's workflows:

* ``complete``: solve one instance and write the completed matrix plus
  label predictions.
* ``experiment``: run a scenario grid from a spec file and render the
  result table.
* ``diagnose``: report surrogate-property checks and recovery-bound
  numbers for an instance.
* ``synth``: generate a synthetic low-rank instance with ground truth.

Exit codes: 0 on success, 2 on input errors (bad files, schemas, or
arguments), 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

import numpy as np

from .box import build_bounds, project
from .data import (
    Dataset,
    MaskSpec,
    block_loss,
    load_arff,
    load_csv,
    load_masks,
    mcar_mask,
    save_masks,
    synthesize,
)
from .diagnostics import (
    AffineObservationOperator,
    alpha_delta,
    qra_check,
    rank_assumption_holds,
    recovery_bound,
    spherical_section_estimate,
)
from .errors import (
    BoundUndefinedError,
    DecompositionError,
    DegenerateInstanceError,
    DivergenceError,
    SmoothRankError,
    TrivialNullSpaceError,
    UndefinedAUCError,
)
from .evaluation import (
    ExperimentSpec,
    build_instance,
    method_name,
    render_report,
    run_experiment,
)
from .model import SolverConfig, stack
from .objective import QraProfile, approx_rank
from .solvers import Method, anneal

_INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    json.JSONDecodeError,
    ValueError,
    TypeError,
    KeyError,
)
_NUMERICAL_ERRORS = (
    DivergenceError,
    DecompositionError,
    DegenerateInstanceError,
    UndefinedAUCError,
    BoundUndefinedError,
    TrivialNullSpaceError,
)


def _method(name: str) -> Method:
    return Method.PG if name == "srf1" else Method.SPG


def _load_dataset(path: str) -> Dataset:
    p = Path(path)
    if p.suffix.lower() == ".arff":
        return load_arff(p)
    return load_csv(p)


def _load_config(path: str | None) -> SolverConfig:
    if path is None:
        return SolverConfig()
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a JSON object of solver settings")
    known = {f.name for f in dataclass_fields(SolverConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown solver settings: {sorted(unknown)}")
    return SolverConfig(**raw)


def _masks_for(args, ds: Dataset):
    """Observed-feature and observed-label masks from a file or a seeded draw."""
    n, d, t = ds.features.shape[0], ds.features.shape[1], ds.labels.shape[1]
    if args.masks is not None:
        return load_masks(Path(args.masks), n, d, t)
    if args.omega is None:
        raise ValueError("provide either --masks or --omega to define the observed entries")
    obs_x, obs_y = mcar_mask(n, d, t, MaskSpec(args.omega, seed=args.seed))
    if args.scenario == "block":
        obs_y, _ = block_loss(obs_y, n, t, 0.10, args.seed)
    return obs_x, obs_y


def _write_csv(path: Path, header: list[str], rows: np.ndarray) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows.tolist())


def _cmd_complete(args) -> int:
    ds = _load_dataset(args.data)
    obs_x, obs_y = _masks_for(args, ds)
    config = _load_config(args.config)
    instance, transform = build_instance(ds, obs_x, obs_y, standardize_features=not args.no_standardize)
    report = anneal(instance, config, _method(args.method))
    soft = report.solution.label_zone
    completed = report.solution.feature_zone
    if transform is not None:
        completed = transform.invert(completed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d, t = instance.d, instance.t
    _write_csv(out / "completed_features.csv", [f"f{j}" for j in range(d)], completed)
    _write_csv(out / "predictions.csv", [f"label:l{j}" for j in range(t)], soft)
    save_masks(out / "masks.txt", obs_x, obs_y)
    summary = (
        f"method: {args.method}\n"
        f"stages: {report.stages}\n"
        f"inner iterations: {sum(report.inner_iterations)}\n"
        f"wall time: {report.wall_time:.3f} s\n"
        f"converged: {report.converged}\n"
    )
    (out / "summary.txt").write_text(summary, encoding="utf-8")
    sys.stdout.write(summary)
    return 0


def _cmd_experiment(args) -> int:
    raw = {}
    if args.spec is not None:
        raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValueError("experiment spec file must hold a JSON object")
    data_path = args.data or raw.get("dataset")
    if data_path is None:
        raise ValueError("no dataset given; use --data or a spec file with a 'dataset' entry")
    ds = _load_dataset(data_path)

    method = args.method or raw.get("method", "srf2")
    scenario = args.scenario or raw.get("scenario", "random")
    rates = [args.omega] if args.omega is not None else raw.get("rates", [0.8, 0.6, 0.4, 0.2])
    config = _load_config(args.config) if args.config else SolverConfig(**raw.get("config", {}))
    spec = ExperimentSpec(
        dataset=ds,
        method=_method(method),
        scenario=scenario,
        observation_rates=tuple(rates),
        trials=args.trials if args.trials is not None else int(raw.get("trials", 10)),
        base_seed=args.seed if args.seed is not None else int(raw.get("seed", 0)),
        config=config,
        standardize=not args.no_standardize and raw.get("standardize", True),
        macro=args.macro or bool(raw.get("macro", False)),
    )
    rows = run_experiment(spec)
    table, csv_text = render_report(rows)
    sys.stdout.write(table + "\n")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(table + "\n", encoding="utf-8")
        (out / "report.csv").write_text(csv_text, encoding="utf-8")
    return 0


def _cmd_diagnose(args) -> int:
    ds = _load_dataset(args.data)
    obs_x, obs_y = _masks_for(args, ds)
    instance, _ = build_instance(ds, obs_x, obs_y, standardize_features=not args.no_standardize)
    op = AffineObservationOperator.from_instance(instance)
    z0 = project(stack(instance), build_bounds(instance))
    sigma1 = float(np.linalg.svd(z0.entries, compute_uv=False)[0])
    profile = QraProfile(1e-4 * sigma1)
    n_side = min(z0.entries.shape)

    grid = np.linspace(-5 * profile.delta, 5 * profile.delta, 101)
    checks = qra_check(profile, grid)
    delta_hat = spherical_section_estimate(op, samples=args.samples, seed=args.seed or 0)
    lines = [
        f"instance: {instance.n} rows, {instance.d} features, {instance.t} labels",
        f"surrogate width delta = 1e-4 * sigma_1 = {profile.delta:.6g}",
        f"surrogate checks: symmetric={checks.symmetric} unit_only_at_zero={checks.unit_only_at_zero} "
        f"concave_near_zero={checks.concave_near_zero} tail_decays={checks.tail_decays}",
        f"approximate rank at this width: {approx_rank(profile, z0):.2f}",
        f"sampled spherical-section upper bound ({args.samples} draws): {delta_hat:.4f}",
        f"influence-zone width alpha_delta(n={n_side}): {alpha_delta(profile, n_side):.6g}",
    ]
    try:
        rb = recovery_bound(profile, n_side, delta_hat)
        lines.append(f"recovery-error bound at this width: {rb.bound:.6g}")
    except BoundUndefinedError as exc:
        lines.append(f"recovery-error bound undefined: {exc}")
    if args.rank is not None:
        ok = rank_assumption_holds(args.rank, delta_hat)
        lines.append(f"rank assumption 2r < Delta with r={args.rank}: {'holds' if ok else 'fails'} (advisory)")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "diagnose.txt").write_text(text, encoding="utf-8")
    return 0


def _cmd_synth(args) -> int:
    ds, model = synthesize(args.n, args.d, args.t, args.rank, args.noise, args.seed or 0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = [f"f{j}" for j in range(args.d)] + [f"label:l{j}" for j in range(args.t)]
    body = np.hstack([ds.features, ds.labels])
    _write_csv(out / "synthetic.csv", header, body)
    _write_csv(out / "truth_features.csv", [f"f{j}" for j in range(args.d)], model.pre_features)
    soft = model.pre_features @ model.weight.T + model.bias
    _write_csv(out / "truth_soft_labels.csv", [f"label:l{j}" for j in range(args.t)], soft)
    if args.omega is not None:
        obs_x, obs_y = mcar_mask(args.n, args.d, args.t, MaskSpec(args.omega, seed=args.seed or 0))
        if args.scenario == "block":
            obs_y, _ = block_loss(obs_y, args.n, args.t, 0.10, args.seed or 0)
        save_masks(out / "masks.txt", obs_x, obs_y)
    sys.stdout.write(f"wrote synthetic instance (n={args.n}, d={args.d}, t={args.t}, rank={args.rank}) to {out}\n")
    return 0


def _add_common(parser: argparse.ArgumentParser, *, masks: bool = True) -> None:
    parser.add_argument("--method", choices=["srf1", "srf2"], default=None, help="solver: srf1 fixed-step, srf2 spectral-step")
    parser.add_argument("--omega", type=float, default=None, help="observation rate in (0, 1]")
    parser.add_argument("--scenario", choices=["random", "block"], default=None, help="missing-data scenario")
    parser.add_argument("--seed", type=int, default=None, help="base random seed")
    parser.add_argument("--config", default=None, help="JSON file of solver settings")
    parser.add_argument("--no-standardize", action="store_true", help="skip mask-aware feature standardization")
    parser.add_argument("--out", default=None, help="output directory")
    if masks:
        parser.add_argument("--masks", default=None, help="mask file of observed entries")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smoothrank", description="Transductive multi-label completion by smoothed rank minimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complete", help="solve one instance and write completions")
    p.add_argument("--data", required=True, help="dataset file (.csv or .arff)")
    _add_common(p)
    p.set_defaults(func=_cmd_complete, method="srf2", scenario="random", seed=0, out=".")

    p = sub.add_parser("experiment", help="run a scenario grid and render the report")
    p.add_argument("--spec", default=None, help="JSON experiment spec file")
    p.add_argument("--data", default=None, help="dataset file (overrides spec)")
    p.add_argument("--trials", type=int, default=None, help="trials per observation rate")
    p.add_argument("--macro", action="store_true", help="macro-average AUC over labels")
    _add_common(p, masks=False)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("diagnose", help="surrogate and recovery-bound report")
    p.add_argument("--data", required=True, help="dataset file (.csv or .arff)")
    p.add_argument("--samples", type=int, default=200, help="spherical-section sample count")
    p.add_argument("--rank", type=int, default=None, help="assumed true rank for the advisory check")
    _add_common(p)
    p.set_defaults(func=_cmd_diagnose, scenario="random", seed=0)

    p = sub.add_parser("synth", help="generate a synthetic instance with ground truth")
    p.add_argument("--n", type=int, required=True, help="instances")
    p.add_argument("--d", type=int, required=True, help="features")
    p.add_argument("--t", type=int, required=True, help="labels")
    p.add_argument("--rank", type=int, required=True, help="rank of the feature matrix")
    p.add_argument("--noise", type=float, default=0.0, help="feature noise standard deviation")
    _add_common(p, masks=False)
    p.set_defaults(func=_cmd_synth, out="synthetic", scenario="random")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (SmoothRankError, *_INPUT_ERRORS) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
