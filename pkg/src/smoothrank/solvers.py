"""Two ascent solvers for the smoothed rank surrogate, plus the annealing loop.

Both solvers maximize ``F_delta`` over the box (maximizing the surrogate sum
minimizes the rank estimate ``n - F_delta``):

* ``pg_inner``: plain projected gradient with a fixed step ``mu``.
* ``spg_inner``: spectral projected gradient. The trial step starts at a
  Barzilai-Borwein length clamped to ``[alpha_min, alpha_max]`` and backtracks
  geometrically until a nonmonotone sufficient-increase test over the last
  ``memory_size`` objective values accepts it.

``anneal`` wraps either inner solver in the smoothing schedule: start at
``delta = delta_init_factor * sigma_1(Z0)``, solve, shrink delta by
``delta_decay``, warm-start the next stage from the current solution. Large
delta gives an almost-concave landscape whose solution tracks into the sharp
small-delta problem that actually counts rank.
"""

from __future__ import annotations

import enum
import logging
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .box import BoxBounds, build_bounds, project
from .errors import DegenerateInstanceError, DivergenceError
from .model import ProblemInstance, SolverConfig, SolverReport, StackedMatrix, stack
from .objective import QraProfile, _svd, qra_derivative, qra_value, smoothed_rank

__all__ = [
    "Method",
    "SpgState",
    "PgStepRecord",
    "SpgStepRecord",
    "initial_delta",
    "pg_inner",
    "bb_step_length",
    "nonmonotone_accept",
    "spg_inner",
    "anneal",
]

_log = logging.getLogger(__name__)

# Step lengths below this are treated as underflow: give up backtracking and
# take one plain projected-gradient step instead so the iteration always moves.
_STEP_UNDERFLOW = 1e-12


class Method(enum.Enum):
    """Inner solver selector."""

    PG = "pg"
    SPG = "spg"


@dataclass(frozen=True)
class PgStepRecord:
    """One projected-gradient iteration, for telemetry and regression tests."""

    stage: int
    iteration: int
    objective: float | None
    rel_change: float


@dataclass(frozen=True)
class SpgStepRecord:
    """One SPG trial step.

    ``candidate`` counts backtracks within the iteration (0 is the first
    trial). ``reference`` is the worst remembered objective, ``prod`` the
    directional-increase term of the acceptance test. ``fallback`` marks the
    plain gradient step taken after step-length underflow.
    """

    stage: int
    iteration: int
    candidate: int
    step_length: float
    objective: float
    reference: float
    prod: float
    accepted: bool
    fallback: bool


@dataclass
class SpgState:
    """Mutable per-run state of the spectral solver.

    Holds the clamped step length, the ring buffer of the last
    ``memory_size`` objective values, and the (step, gradient-change) pair
    the Barzilai-Borwein formula divides.
    """

    current_alpha: float
    memory_size: int
    objective_memory: deque = field(default_factory=deque)
    last_step: np.ndarray | None = None
    last_grad_change: np.ndarray | None = None

    def __post_init__(self):
        if self.memory_size < 1:
            raise ValueError("memory_size must be >= 1")
        self.objective_memory = deque(self.objective_memory, maxlen=self.memory_size)

    def remember(self, value: float) -> None:
        self.objective_memory.append(float(value))


def _entries(z) -> np.ndarray:
    if isinstance(z, StackedMatrix):
        return z.entries
    return np.asarray(z, dtype=float)


def initial_delta(z0, factor: float = 25.0) -> float:
    """Starting smoothing width: ``factor`` times the top singular value."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    a = _entries(z0)
    top = float(np.linalg.svd(a, compute_uv=False)[0]) if a.size else 0.0
    if top == 0.0:
        raise DegenerateInstanceError("zero start matrix leaves the smoothing width undefined")
    return factor * top


def _value_and_gradient(profile: QraProfile, a: np.ndarray):
    u, s, vt = _svd(a)
    value = float(np.sum(qra_value(profile, s)))
    grad = (u * qra_derivative(profile, s)) @ vt
    return value, grad


def pg_inner(
    z: StackedMatrix,
    bounds: BoxBounds,
    profile: QraProfile,
    mu: float,
    tol: float = 1e-4,
    max_iters: int = 200,
    trace: list | None = None,
    stage_index: int = 0,
    record_objectives: bool = False,
) -> StackedMatrix:
    """Fixed-step projected gradient ascent at one smoothing width.

    Iterates ``Z <- clip(Z + mu * delta^2 * G(Z))`` until the relative
    Frobenius change drops below ``tol`` or ``max_iters`` is hit. The step
    ``mu`` is measured in units of ``delta^2`` because the gradient scale
    grows like ``1/delta^2``: the curvature of the surrogate is bounded by
    ``1/delta^2``, so ``mu <= 1`` guarantees ascent at every width, whereas
    any step fixed in absolute units blows up small singular components as
    soon as ``delta^2`` drops below it. Objective values are only computed
    when asked for (``record_objectives`` or debug logging), since the
    update itself never needs them.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    want_obj = record_objectives or _log.isEnabledFor(logging.DEBUG)
    step = mu * profile.delta**2
    cur = z.entries
    prev_obj = None
    for i in range(max_iters):
        u, s, vt = _svd(cur)
        grad = (u * qra_derivative(profile, s)) @ vt
        new = np.clip(cur + step * grad, bounds.lower, bounds.upper)
        obj = None
        if want_obj:
            vals = np.linalg.svd(new, compute_uv=False)
            obj = float(np.sum(qra_value(profile, vals)))
            if not np.isfinite(obj):
                raise DivergenceError("objective became non-finite", iteration=i)
            if prev_obj is not None and obj < prev_obj - 1e-9:
                _log.debug(
                    "objective decreased at iteration %d: %.12g -> %.12g", i, prev_obj, obj
                )
            prev_obj = obj
        elif not np.all(np.isfinite(new)):
            raise DivergenceError("iterate became non-finite", iteration=i)
        rel = float(np.linalg.norm(new - cur) / max(1.0, np.linalg.norm(cur)))
        if trace is not None:
            trace.append(PgStepRecord(stage_index, i, obj, rel))
        cur = new
        if rel < tol:
            break
    return z.with_entries(cur)


def bb_step_length(state: SpgState, alpha_min: float, alpha_max: float) -> float:
    """Barzilai-Borwein step from the stored (step, gradient-change) pair.

    Returns ``alpha_max`` when the curvature estimate ``<S, Y>`` is not
    positive (including the zero-step case), otherwise ``<S, S> / <S, Y>``
    clamped to ``[alpha_min, alpha_max]``.
    """
    if state.last_step is None or state.last_grad_change is None:
        raise ValueError("step history not populated yet")
    a = float(np.vdot(state.last_step, state.last_step))
    b = float(np.vdot(state.last_step, state.last_grad_change))
    if b <= 0.0:
        return float(alpha_max)
    return float(min(alpha_max, max(alpha_min, a / b)))


def nonmonotone_accept(candidate_obj: float, memory, prod: float, gamma: float) -> bool:
    """Accept a candidate that beats the worst remembered value by ``gamma * prod``.

    ``memory`` holds objective values of recent accepted iterates; ``prod``
    is the directional-increase term ``<Z_new - Z, G(Z)>`` (nonnegative for a
    projected ascent step).
    """
    if len(memory) == 0:
        raise ValueError("objective memory must be nonempty")
    return bool(candidate_obj >= min(memory) + gamma * prod)


def spg_inner(
    z: StackedMatrix,
    bounds: BoxBounds,
    profile: QraProfile,
    config: SolverConfig,
    trace: list | None = None,
    stage_index: int = 0,
) -> StackedMatrix:
    """Spectral projected gradient ascent at one smoothing width.

    Each iteration tries ``clip(Z + lambda * G(Z))`` with ``lambda`` starting
    at the Barzilai-Borwein step, backtracking ``lambda <- backtrack_factor *
    lambda`` until the nonmonotone test accepts. If ``lambda`` underflows,
    one plain gradient step with ``mu = alpha_min`` is taken instead.
    """
    cur = z.entries
    f_cur, g_cur = _value_and_gradient(profile, cur)
    if not np.isfinite(f_cur):
        raise DivergenceError("objective not finite at the start matrix", iteration=0)
    state = SpgState(current_alpha=config.alpha_max, memory_size=config.memory_size)
    state.remember(f_cur)
    for i in range(config.max_inner_iters):
        lam = state.current_alpha
        reference = min(state.objective_memory)
        candidate = 0
        fallback = False
        while True:
            new = np.clip(cur + lam * g_cur, bounds.lower, bounds.upper)
            nu, ns, nvt = _svd(new)
            f_new = float(np.sum(qra_value(profile, ns)))
            if not np.isfinite(f_new):
                raise DivergenceError("objective became non-finite", iteration=i)
            prod = float(np.vdot(new - cur, g_cur))
            ok = nonmonotone_accept(f_new, state.objective_memory, prod, config.sufficient_decrease)
            if trace is not None:
                trace.append(
                    SpgStepRecord(stage_index, i, candidate, lam, f_new, reference, prod, ok, False)
                )
            if ok:
                break
            shrunk = config.backtrack_factor * lam
            if shrunk < _STEP_UNDERFLOW:
                fallback = True
                lam = config.alpha_min
                new = np.clip(cur + lam * g_cur, bounds.lower, bounds.upper)
                nu, ns, nvt = _svd(new)
                f_new = float(np.sum(qra_value(profile, ns)))
                if not np.isfinite(f_new):
                    raise DivergenceError("objective became non-finite", iteration=i)
                prod = float(np.vdot(new - cur, g_cur))
                if trace is not None:
                    trace.append(
                        SpgStepRecord(
                            stage_index, i, candidate + 1, lam, f_new, reference, prod, False, True
                        )
                    )
                break
            lam = shrunk
            candidate += 1
        g_new = (nu * qra_derivative(profile, ns)) @ nvt
        state.last_step = new - cur
        # BB curvature pair for an ascent run: store the change of the
        # descent gradient -G, so <S, Y> is positive exactly where the
        # surrogate is locally concave and the quotient measures curvature.
        state.last_grad_change = g_cur - g_new
        state.current_alpha = bb_step_length(state, config.alpha_min, config.alpha_max)
        state.remember(f_new)
        rel = float(np.linalg.norm(new - cur) / max(1.0, np.linalg.norm(cur)))
        cur, f_cur, g_cur = new, f_new, g_new
        if rel < config.inner_tol:
            break
    return z.with_entries(cur)


def anneal(
    instance: ProblemInstance,
    config: SolverConfig | None = None,
    method: Method = Method.SPG,
    keep_stages: bool = False,
    trace: list | None = None,
) -> SolverReport:
    """Full solve: stack, project, then run the shrinking-delta schedule.

    Each stage warm-starts from the previous solution. The schedule stops on
    (a) an exactly stationary stage, (b) relative change below ``outer_tol``
    after some earlier stage moved at least that much (at very wide delta the
    surrogate is flat and nothing has happened yet, so a quiet stage only
    counts once the schedule has been in motion), (c) delta underflowing
    ``1e-6 * sigma_1(Z0)``, or (d) ``max_outer_iters`` stages; only (d)
    reports ``converged=False``.
    """
    if config is None:
        config = SolverConfig()
    if not isinstance(method, Method):
        raise TypeError("method must be a Method member")
    start = time.perf_counter()
    bounds = build_bounds(instance)
    z = project(stack(instance), bounds)
    sigma1 = float(np.linalg.svd(z.entries, compute_uv=False)[0])
    if sigma1 == 0.0:
        raise DegenerateInstanceError("zero start matrix leaves the smoothing width undefined")
    delta = config.delta_init_factor * sigma1
    floor = 1e-6 * sigma1

    objective_trace = []
    inner_iterations = []
    stages = []
    converged = False
    moved = False
    for k in range(config.max_outer_iters):
        profile = QraProfile(delta)
        stage_trace: list = []
        if method is Method.PG:
            z_next = pg_inner(
                z,
                bounds,
                profile,
                config.step_size,
                config.inner_tol,
                config.max_inner_iters,
                trace=stage_trace,
                stage_index=k,
            )
        else:
            z_next = spg_inner(z, bounds, profile, config, trace=stage_trace, stage_index=k)
        if trace is not None:
            trace.extend(stage_trace)
        objective_trace.append((delta, smoothed_rank(profile, z_next.entries)))
        inner_iterations.append(stage_trace[-1].iteration + 1 if stage_trace else 0)
        if keep_stages:
            stages.append(z_next)
        rel = float(
            np.linalg.norm(z_next.entries - z.entries) / max(1.0, np.linalg.norm(z.entries))
        )
        z = z_next
        if rel == 0.0 or (moved and rel < config.outer_tol):
            converged = True
            break
        if rel >= config.outer_tol:
            moved = True
        delta *= config.delta_decay
        if delta < floor:
            converged = True
            break
    wall = time.perf_counter() - start
    return SolverReport(
        solution=z,
        objective_trace=tuple(objective_trace),
        inner_iterations=tuple(inner_iterations),
        wall_time=wall,
        converged=converged,
        stage_solutions=tuple(stages) if keep_stages else None,
    )
