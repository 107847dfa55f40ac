"""Diagnostics tied to the convergence theory.

Evaluates the primal function Phi(x) = max_y f(x, y) and its gradient (closed
form when the problem provides an exact inner maximizer, projected gradient
ascent otherwise), the stationarity measure ||grad Phi||, the shifted
potential used for descent monitoring, the per-epoch deviation bound, the
game-stationarity gap, and the Euclidean projection onto the simplex.

Metric evaluations never touch a run's oracle counter: they are diagnostics,
not part of the algorithm's gradient budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericFailure

DEFAULT_PHI_TOL = 1e-8


def simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {y >= 0, sum y = 1} by sort-and-threshold.

    Sort descending, take rho = max{k : v_(k) - (sum_{j<=k} v_(j) - 1)/k > 0},
    threshold tau = (sum_{j<=rho} v_(j) - 1)/rho, output max(v - tau, 0).
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise InvalidArgument("simplex_project expects a nonempty 1-d vector")
    if not np.all(np.isfinite(v)):
        raise InvalidArgument("simplex_project expects finite input")
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    rho = int(np.nonzero(u - cssv / ks > 0)[0][-1])  # k=1 always qualifies
    tau = cssv[rho] / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


@dataclass
class PhiEstimate:
    """Phi(x), its gradient, and how good the inner maximization was."""

    phi: float
    grad_phi: np.ndarray
    residual: float  # projected-gradient residual of the inner solve
    converged: bool
    iterations: int
    y_star: np.ndarray


def default_inner_iterations(problem, tol: float) -> int:
    """10 * kappa * log(1/tol), the inner-solver budget used when none is given."""
    return int(math.ceil(10.0 * problem.kappa * math.log(1.0 / tol)))


def _ascent_residual(problem, x, y, step):
    """Gradient-mapping norm: l * ||y - P(y + (1/l) grad_y f)||; reduces to
    ||grad_y f|| when the dual is unconstrained."""
    gy = problem.full_grad_y(x, y)
    y_next = problem.apply_project_y(y + step * gy)
    return float(np.linalg.norm(y_next - y) / step), y_next, gy


def estimate_phi(
    problem,
    x,
    tol: float = DEFAULT_PHI_TOL,
    max_iters: int | None = None,
    use_exact: bool = True,
    y0: np.ndarray | None = None,
) -> PhiEstimate:
    """Phi(x) = f(x, y*(x)) and grad Phi(x) = grad_x f(x, y*(x)).

    Uses the problem's exact inner maximizer when present (and use_exact),
    otherwise projected gradient ascent on f(x, .) with step 1/l until the
    residual drops below tol or the iteration budget runs out.  An exhausted
    budget is not fatal: the estimate is flagged as not converged and the
    residual is recorded.
    """
    if tol <= 0:
        raise InvalidArgument("tol must be positive")
    x = np.asarray(x, dtype=np.float64)
    step = 1.0 / problem.smoothness_l
    if use_exact and problem.exact_dual_max is not None:
        y_star = problem.exact_dual_max(x)
        residual, _, _ = _ascent_residual(problem, x, y_star, step)
        return PhiEstimate(
            phi=float(problem.value(x, y_star)),
            grad_phi=problem.full_grad_x(x, y_star),
            residual=residual,
            converged=True,
            iterations=0,
            y_star=y_star,
        )
    if max_iters is None:
        max_iters = default_inner_iterations(problem, tol)
    y = np.zeros(problem.dim_y) if y0 is None else np.asarray(y0, dtype=np.float64).copy()
    y = problem.apply_project_y(y)
    residual = math.inf
    iters = 0
    for iters in range(1, max_iters + 1):
        residual, y_next, _ = _ascent_residual(problem, x, y, step)
        y = y_next
        if residual <= tol:
            break
    if not np.all(np.isfinite(y)):
        raise NumericFailure("inner maximization diverged")
    return PhiEstimate(
        phi=float(problem.value(x, y)),
        grad_phi=problem.full_grad_x(x, y),
        residual=residual,
        converged=residual <= tol,
        iterations=iters,
        y_star=y,
    )


def potential_shifted(problem, x, y, lam: float = 4.0, tol: float = DEFAULT_PHI_TOL) -> float:
    """Shifted potential (lam+1) * Phi(x) - f(x, y).

    Differs from the exact potential lam*(Phi(x) - Phi*) + Phi(x) - f(x, y)
    by the constant lam*Phi*, so descent of one is descent of the other.
    """
    if lam <= 0:
        raise InvalidArgument("lam must be positive")
    est = estimate_phi(problem, x, tol=tol)
    return (lam + 1.0) * est.phi - float(problem.value(x, y))


def potential_exact(problem, x, y, lam: float = 4.0, tol: float = DEFAULT_PHI_TOL) -> float:
    """Exact potential lam*(Phi(x) - Phi*) + Phi(x) - f(x, y), for problems
    exposing a closed-form Phi* (the synthetic quadratic).  Nonnegative up to
    float noise; a materially negative value means the problem is broken."""
    phi_star = getattr(problem, "phi_star", None)
    if phi_star is None:
        raise InvalidArgument("problem does not expose a closed-form phi_star")
    est = estimate_phi(problem, x, tol=tol)
    value = lam * (est.phi - phi_star) + est.phi - float(problem.value(x, y))
    if value < -1e-9 * (1.0 + abs(phi_star)):
        raise NumericFailure(f"exact potential is negative: {value}")
    return max(value, 0.0)  # float noise below zero is provably noise


@dataclass(frozen=True)
class DeviationCheck:
    """Outcome of the per-epoch deviation bound test."""

    applicable: bool
    passed: bool
    b_t: float
    bound: float
    slack: float  # bound / b_t, inf when b_t == 0


def deviation_bound_check(problem, epoch_stats, eta1: float, eta2: float) -> DeviationCheck:
    """Check B_t <= 4n(eta1^2 ||grad_x f(x_t,y_t)||^2 + eta2^2 ||grad_y f(x_t,y_t)||^2).

    Applies only when eta1^2 + eta2^2 <= 1/(4 l^2); otherwise reported as
    not-applicable.  epoch_stats must carry deviation_accum and the anchor
    full gradients (anchor_gx, anchor_gy), as EpochState does.
    """
    l = problem.smoothness_l
    if eta1**2 + eta2**2 > 1.0 / (4.0 * l**2):
        return DeviationCheck(applicable=False, passed=True, b_t=float(epoch_stats.deviation_accum), bound=math.nan, slack=math.nan)
    b_t = float(epoch_stats.deviation_accum)
    gx2 = float(np.dot(epoch_stats.anchor_gx, epoch_stats.anchor_gx))
    gy2 = float(np.dot(epoch_stats.anchor_gy, epoch_stats.anchor_gy))
    bound = 4.0 * problem.n * (eta1**2 * gx2 + eta2**2 * gy2)
    slack = math.inf if b_t == 0.0 else bound / b_t
    return DeviationCheck(applicable=True, passed=b_t <= bound, b_t=b_t, bound=bound, slack=slack)


@dataclass(frozen=True)
class GameStationarity:
    """||grad f(x, y)|| over both blocks, plus the projected residual for
    constrained problems (||z - P(z -/+ grad)|| with unit step)."""

    grad_norm: float
    projected_residual: float


def game_stationarity(problem, x, y) -> GameStationarity:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    gx = problem.full_grad_x(x, y)
    gy = problem.full_grad_y(x, y)
    raw = math.hypot(float(np.linalg.norm(gx)), float(np.linalg.norm(gy)))
    rx = np.linalg.norm(x - problem.apply_project_x(x - gx))
    ry = np.linalg.norm(y - problem.apply_project_y(y + gy))
    return GameStationarity(grad_norm=raw, projected_residual=math.hypot(float(rx), float(ry)))


def constant_estimates(problem, probe_pairs: int = 50, seed: int = 0) -> tuple[float, float, float]:
    """(l, mu, kappa) from the problem's analytic bounds, plus a random-pair
    probe: no sampled pair may violate the smoothness bound.  A violation is
    a construction bug, raised as NumericFailure.

    Probe points are drawn near the origin and pushed through the problem's
    projections, so constrained problems are probed on their feasible sets.
    """
    l = float(problem.smoothness_l)
    mu = problem.strong_concavity_mu
    if mu is None:
        raise InvalidArgument("problem does not declare a strong-concavity constant")
    kappa = l / mu
    rng = np.random.default_rng(seed)
    for _ in range(probe_pairs):
        i = int(rng.integers(problem.n))
        x1 = problem.apply_project_x(rng.standard_normal(problem.dim_x))
        x2 = problem.apply_project_x(rng.standard_normal(problem.dim_x))
        y1 = problem.apply_project_y(rng.standard_normal(problem.dim_y))
        y2 = problem.apply_project_y(rng.standard_normal(problem.dim_y))
        dg = np.concatenate(
            [
                problem.grad_x_i(i, x1, y1) - problem.grad_x_i(i, x2, y2),
                problem.grad_y_i(i, x1, y1) - problem.grad_y_i(i, x2, y2),
            ]
        )
        dz = np.linalg.norm(x1 - x2) + np.linalg.norm(y1 - y2)
        if np.linalg.norm(dg) > l * dz * (1.0 + 1e-9):
            raise NumericFailure(
                f"smoothness probe violated: ||dgrad||={np.linalg.norm(dg):.6g} > l*dz={l * dz:.6g}",
                sample=i,
            )
    return l, float(mu), kappa


@dataclass(frozen=True)
class StationarityReport:
    """One iterate's worth of stationarity diagnostics."""

    grad_phi_norm: float
    grad_f_norm: float
    phi: float
    potential_shifted: float
    lam: float
    inner_solver_residual: float


def stationarity_report(problem, x, y, lam: float = 4.0, tol: float = DEFAULT_PHI_TOL) -> StationarityReport:
    est = estimate_phi(problem, x, tol=tol)
    gs = game_stationarity(problem, x, y)
    f_xy = float(problem.value(x, y))
    return StationarityReport(
        grad_phi_norm=float(np.linalg.norm(est.grad_phi)),
        grad_f_norm=gs.grad_norm,
        phi=est.phi,
        potential_shifted=(lam + 1.0) * est.phi - f_xy,
        lam=lam,
        inner_solver_residual=est.residual,
    )
