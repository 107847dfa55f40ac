"""Variance-reduced shuffling gradient descent-ascent and its baselines.

The core algorithm processes one epoch of n inner steps.  At the epoch start
the full gradients (h0, d0) are taken at the anchor (x_t, y_t); inner step j
then uses the control-variate estimates

    h_j = h0 + grad_x f_pi(j)(x_j, y_j) - grad_x f_pi(j)(x_t, y_t)
    d_j = d0 + grad_y f_pi(j)(x_j, y_j) - grad_y f_pi(j)(x_t, y_t)

    x_{j+1} = P_x(x_j - eta1/n * h_j),   y_{j+1} = P_y(y_j + eta2/n * d_j).

Both per-sample gradients are evaluated at the pre-update iterate (Jacobi
coupling); a Gauss-Seidel toggle evaluates the dual gradient at the already
updated x instead.  Baselines: deterministic two-timescale GDA and
with-replacement minibatch SGDA, sized so that one "epoch" of either consumes
2n per-sample evaluations for fair oracle-budget comparisons.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgument, NumericFailure, ResourceExhausted
from .oracle import AnchorCache, CountingProblem, full_gradient, per_sample_gradient_cache
from .shuffle import ShufflingScheme, permutation_for_epoch, rng_for

ALGO_VR = "vr-shuffle"
ALGO_SGDA = "sgda"
ALGO_GDA = "gda"
ALGORITHMS = (ALGO_VR, ALGO_SGDA, ALGO_GDA)

THEOREM_LAMBDA = 4.0


@dataclass
class OptimizerConfig:
    """One run's algorithm choice and hyperparameters.

    epochs is the outer-loop bound T: a run executes epochs T+1 passes
    (t = 0..T inclusive), matching the convergence bound's average.
    """

    algorithm: str
    eta1: float
    eta2: float
    epochs: int
    scheme: ShufflingScheme | None = None
    batch_size: int = 1
    seed: int = 0
    cache_anchors: bool = False
    enforce_theory: bool = False
    gauss_seidel: bool = False
    divergence_limit: float = 1e12
    metric_cadence: int = 1
    label: str | None = None  # display name for records (e.g. "vr-rr")

    def __post_init__(self):
        if self.metric_cadence < 1:
            raise InvalidArgument("metric_cadence must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise InvalidArgument(f"unknown algorithm {self.algorithm!r}, expected one of {ALGORITHMS}")
        if self.eta1 <= 0 or self.eta2 <= 0:
            raise InvalidArgument("step sizes must be positive")
        if self.epochs < 0:
            raise InvalidArgument("epochs must be >= 0")
        if self.batch_size < 1:
            raise InvalidArgument("batch_size must be >= 1")
        if self.algorithm == ALGO_VR and self.scheme is None:
            raise InvalidArgument("vr-shuffle needs a ShufflingScheme")


@dataclass
class EpochState:
    """Iterates plus the per-epoch anchor bookkeeping of one epoch.

    deviation_accum is sum_j ||x_t - x_t^j||^2 + ||y_t - y_t^j||^2 over the
    pre-update inner iterates (= B_t once inner_index reaches n).
    oracle_calls counts the per-sample per-block evaluations the epoch
    consumed, anchor pass included.
    """

    epoch: int
    x: np.ndarray
    y: np.ndarray
    anchor_x: np.ndarray
    anchor_y: np.ndarray
    anchor_gx: np.ndarray
    anchor_gy: np.ndarray
    inner_index: int = 0
    deviation_accum: float = 0.0
    oracle_calls: int = 0


def theory_conditions(eta1: float, eta2: float, l: float, mu: float, lam: float = THEOREM_LAMBDA) -> dict[str, bool]:
    """The step-size conditions behind the per-epoch descent guarantee,
    each evaluated with a hair of relative tolerance for float round-off."""
    kappa = l / mu
    tol = 1.0 + 1e-9
    return {
        "eta2 <= 1/(8l)": eta2 <= tol / (8.0 * l),
        "eta2/eta1 >= 14 kappa^2": eta2 / eta1 >= 14.0 * kappa * kappa / tol,
        "eta1 <= lam/(((lam+1)(kappa+1)+1) l)": eta1 <= tol * lam / (((lam + 1.0) * (kappa + 1.0) + 1.0) * l),
        "eta2 <= 1/l": eta2 <= tol / l,
        "eta1^2 + eta2^2 <= 1/(4 l^2)": eta1**2 + eta2**2 <= tol / (4.0 * l**2),
    }


def theorem1_step_sizes(
    l: float, mu: float, eta2_fraction: float = 1.0, r_multiplier: float = 1.0
) -> tuple[float, float, float]:
    """Step sizes satisfying the convergence theorem's premises.

    eta2 = eta2_fraction / (8 l), r = r_multiplier * 14 kappa^2,
    eta1 = eta2 / r, lam = 4.  All required inequalities are re-checked
    before returning.
    """
    if mu <= 0:
        raise InvalidArgument("mu must be positive")
    if l < mu:
        raise InvalidArgument(f"l={l} < mu={mu} gives kappa < 1, contradicting strong concavity")
    if not 0.0 < eta2_fraction <= 1.0:
        raise InvalidArgument("eta2_fraction must lie in (0, 1]")
    if r_multiplier < 1.0:
        raise InvalidArgument("r_multiplier must be >= 1")
    kappa = l / mu
    eta2 = eta2_fraction / (8.0 * l)
    r = r_multiplier * (14.0 * kappa * kappa)
    eta1 = eta2 / r
    conditions = theory_conditions(eta1, eta2, l, mu)
    if not all(conditions.values()):
        failed = [name for name, ok in conditions.items() if not ok]
        raise NumericFailure(f"constructed step sizes violate {failed}")
    return eta1, eta2, THEOREM_LAMBDA


def _guard(vec: np.ndarray, limit: float, *, epoch=None, inner_index=None, sample=None, label: str):
    peak = float(np.abs(vec).max()) if vec.size else 0.0
    if not peak < limit:  # catches NaN as well
        raise NumericFailure(
            f"{label} iterate diverged or went non-finite (max |entry| = {peak!r})",
            epoch=epoch,
            inner_index=inner_index,
            sample=sample,
        )


def gda_step(problem, x, y, eta1: float, eta2: float) -> tuple[np.ndarray, np.ndarray]:
    """One simultaneous full-gradient step: x' = P_x(x - eta1 gx),
    y' = P_y(y + eta2 gy).  Costs n per-sample evaluations per block."""
    pair = full_gradient(problem, x, y)
    x_new = problem.apply_project_x(x - eta1 * pair.gx)
    y_new = problem.apply_project_y(y + eta2 * pair.gy)
    _guard(x_new, math.inf, label="primal")
    _guard(y_new, math.inf, label="dual")
    return x_new, y_new


def default_index_sampler(rng: np.random.Generator, n: int, batch_size: int) -> np.ndarray:
    """Uniform sampling with replacement."""
    return rng.integers(0, n, size=batch_size)


def sgda_epoch(
    problem,
    x,
    y,
    cfg: OptimizerConfig,
    rng: np.random.Generator,
    index_sampler: Callable[[np.random.Generator, int, int], np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """ceil(n / batch_size) with-replacement minibatch steps, so one epoch
    consumes about 2n per-sample evaluations (n per block), cost-aligned with
    the variance-reduced epoch."""
    n = problem.n
    b = cfg.batch_size
    if not 1 <= b <= n:
        raise InvalidArgument(f"batch_size must be in [1, {n}], got {b}")
    sampler = index_sampler if index_sampler is not None else default_index_sampler
    steps = math.ceil(n / b)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    for s in range(steps):
        idx = sampler(rng, n, b)
        gx = np.zeros(problem.dim_x)
        gy = np.zeros(problem.dim_y)
        for i in idx:
            gx += problem.grad_x_i(int(i), x, y)
            gy += problem.grad_y_i(int(i), x, y)
        gx /= len(idx)
        gy /= len(idx)
        x = problem.apply_project_x(x - cfg.eta1 * gx)
        y = problem.apply_project_y(y + cfg.eta2 * gy)
        _guard(x, cfg.divergence_limit, inner_index=s, label="primal")
        _guard(y, cfg.divergence_limit, inner_index=s, label="dual")
    return x, y


InnerHook = Callable[[int, int, np.ndarray, np.ndarray, np.ndarray, np.ndarray], None]


def vr_shuffle_epoch(
    problem,
    state: EpochState,
    perm: np.ndarray,
    cfg: OptimizerConfig,
    anchor_cache: AnchorCache | None = None,
    inner_hook: InnerHook | None = None,
) -> EpochState:
    """One inner pass of the variance-reduced shuffling algorithm.

    state must carry the epoch anchors and their full gradients (the caller
    computes them first).  The correction term is formed as
    h0 + (g_iterate - g_anchor) so that it cancels exactly - bit for bit -
    whenever the iterate still sits on the anchor.

    inner_hook, when given, observes (j, sample, h_j, d_j, x_j, y_j) at each
    step with the pre-update iterate; tests use it to transcribe the inner
    sequence.
    """
    n = problem.n
    perm = np.asarray(perm)
    if perm.shape != (n,):
        raise InvalidArgument(f"permutation has shape {perm.shape}, expected ({n},)")
    eta1_n = cfg.eta1 / n
    eta2_n = cfg.eta2 / n
    x = state.x.copy()
    y = state.y.copy()
    ax, ay = state.anchor_x, state.anchor_y
    h0, d0 = state.anchor_gx, state.anchor_gy
    proj_x = problem.project_x
    proj_y = problem.project_y
    grad_x_i = problem.grad_x_i
    grad_y_i = problem.grad_y_i
    limit = cfg.divergence_limit
    dev = 0.0
    calls = state.oracle_calls
    for j in range(n):
        i = int(perm[j])
        ddx = ax - x
        ddy = ay - y
        dev += float(ddx @ ddx) + float(ddy @ ddy)
        gxi = grad_x_i(i, x, y)
        if anchor_cache is None:
            agx = grad_x_i(i, ax, ay)
            agy = grad_y_i(i, ax, ay)
            calls += 4
        else:
            agx = anchor_cache.gx[i]
            agy = anchor_cache.gy[i]
            calls += 2
        h = h0 + (gxi - agx)
        if cfg.gauss_seidel:
            x_new = x - eta1_n * h
            if proj_x is not None:
                x_new = proj_x(x_new)
            d = d0 + (grad_y_i(i, x_new, y) - agy)
        else:
            d = d0 + (grad_y_i(i, x, y) - agy)
            x_new = x - eta1_n * h
            if proj_x is not None:
                x_new = proj_x(x_new)
        y_new = y + eta2_n * d
        if proj_y is not None:
            y_new = proj_y(y_new)
        if inner_hook is not None:
            inner_hook(j, i, h, d, x, y)
        _guard(x_new, limit, epoch=state.epoch, inner_index=j, sample=i, label="primal")
        _guard(y_new, limit, epoch=state.epoch, inner_index=j, sample=i, label="dual")
        x = x_new
        y = y_new
    return EpochState(
        epoch=state.epoch,
        x=x,
        y=y,
        anchor_x=ax,
        anchor_y=ay,
        anchor_gx=h0,
        anchor_gy=d0,
        inner_index=n,
        deviation_accum=dev,
        oracle_calls=calls,
    )


@dataclass(frozen=True)
class MetricContext:
    """What a metric hook gets to look at after each epoch (or at t=0)."""

    problem: object  # the bare (uncounted) problem
    x: np.ndarray
    y: np.ndarray
    epoch: int
    algorithm: str
    seed: int
    eta1: float
    eta2: float
    b_t: float
    state: EpochState | None


MetricHook = Callable[[MetricContext], dict]


@dataclass
class TrajectoryRecord:
    """One metrics row: the iterate's diagnostics after a given epoch."""

    epoch: int
    oracle_calls: int
    wall_ms: float
    b_t: float
    seed: int
    algorithm: str
    metrics: dict = field(default_factory=dict)


def _validate_theory(problem, cfg: OptimizerConfig):
    if cfg.algorithm != ALGO_VR:
        return
    if problem.strong_concavity_mu is None or problem.is_constrained:
        if cfg.enforce_theory:
            raise InvalidArgument(
                "enforce_theory requires an unconstrained problem with a declared strong-concavity constant"
            )
        return
    conditions = theory_conditions(cfg.eta1, cfg.eta2, problem.smoothness_l, problem.strong_concavity_mu)
    failed = [name for name, ok in conditions.items() if not ok]
    if failed:
        if cfg.enforce_theory:
            raise InvalidArgument(f"step sizes violate the convergence-theorem conditions: {failed}")
        warnings.warn(f"step sizes violate the convergence-theorem conditions: {failed}", stacklevel=3)


def run(
    problem,
    cfg: OptimizerConfig,
    x0,
    y0,
    metric_hooks: Sequence[MetricHook] = (),
) -> list[TrajectoryRecord]:
    """Execute cfg.epochs+1 epochs from (x0, y0), recording one metrics row
    for the initial point and one after every epoch (epochs+2 rows total).

    Deterministic given (cfg.seed, x0, y0).  A non-finite iterate or metric
    aborts with NumericFailure carrying the epoch index.  Metric hooks see
    the bare problem, so their evaluations never count against the run's
    oracle budget.
    """
    x = np.array(x0, dtype=np.float64, copy=True)
    y = np.array(y0, dtype=np.float64, copy=True)
    if x.shape != (problem.dim_x,) or y.shape != (problem.dim_y,):
        raise InvalidArgument("x0/y0 shapes do not match the problem dimensions")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidArgument("x0 and y0 must be finite")
    if cfg.algorithm == ALGO_SGDA and not 1 <= cfg.batch_size <= problem.n:
        raise InvalidArgument(f"batch_size must be in [1, {problem.n}]")
    _validate_theory(problem, cfg)

    counting = CountingProblem(problem)
    records: list[TrajectoryRecord] = []
    started = time.perf_counter()
    label = cfg.label or cfg.algorithm

    def emit(epoch: int, b_t: float, state: EpochState | None):
        wall_ms = (time.perf_counter() - started) * 1e3
        ctx = MetricContext(
            problem=problem,
            x=x,
            y=y,
            epoch=epoch,
            algorithm=label,
            seed=cfg.seed,
            eta1=cfg.eta1,
            eta2=cfg.eta2,
            b_t=b_t,
            state=state,
        )
        metrics: dict = {}
        for hook in metric_hooks:
            try:
                metrics.update(hook(ctx))
            except NumericFailure as exc:
                if exc.epoch is None:
                    exc.epoch = epoch
                raise
        records.append(
            TrajectoryRecord(
                epoch=epoch,
                oracle_calls=counting.counter.total,
                wall_ms=wall_ms,
                b_t=b_t,
                seed=cfg.seed,
                algorithm=label,
                metrics=metrics,
            )
        )

    try:
        emit(0, math.nan, None)
    except NumericFailure as exc:
        exc.records = records
        raise
    last_epoch = cfg.epochs + 1
    cache_anchors = cfg.cache_anchors
    for t in range(cfg.epochs + 1):
        try:
            if cfg.algorithm == ALGO_VR:
                before = counting.counter.total
                cache = None
                if cache_anchors:
                    try:
                        cache = per_sample_gradient_cache(counting, x, y)
                        h0, d0 = cache.mean_pair()
                    except ResourceExhausted:
                        warnings.warn("anchor cache allocation failed; falling back to recomputation")
                        cache_anchors = False
                if cache is None:
                    pair = full_gradient(counting, x, y)
                    h0, d0 = pair.gx, pair.gy
                state = EpochState(
                    epoch=t,
                    x=x,
                    y=y,
                    anchor_x=x.copy(),
                    anchor_y=y.copy(),
                    anchor_gx=h0,
                    anchor_gy=d0,
                    oracle_calls=counting.counter.total - before,
                )
                perm = permutation_for_epoch(cfg.scheme, t, problem.n)
                state = vr_shuffle_epoch(counting, state, perm, cfg, anchor_cache=cache)
                x, y = state.x, state.y
                b_t = state.deviation_accum
            elif cfg.algorithm == ALGO_SGDA:
                x, y = sgda_epoch(counting, x, y, cfg, rng_for(cfg.seed, t))
                state, b_t = None, math.nan
            else:
                x, y = gda_step(counting, x, y, cfg.eta1, cfg.eta2)
                state, b_t = None, math.nan
        except NumericFailure as exc:
            if exc.epoch is None:
                exc.epoch = t
            exc.records = records  # partial trajectory for the diagnostic record
            raise
        try:
            _guard(x, cfg.divergence_limit, epoch=t, label="primal")
            _guard(y, cfg.divergence_limit, epoch=t, label="dual")
            if (t + 1) % cfg.metric_cadence == 0 or (t + 1) == last_epoch:
                emit(t + 1, b_t, state)
        except NumericFailure as exc:
            exc.records = records
            raise
    return records
