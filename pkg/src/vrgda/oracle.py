"""Finite-sum minimax problem abstraction and its first-order oracles.

A problem is an n-term finite sum f(x, y) = (1/n) sum_i f_i(x, y), nonconvex
in x and strongly concave in y, exposing per-sample gradients in both blocks.
Problems are immutable after construction and safe to share between runs;
oracle-call counters belong to the caller (see CountingProblem).

Accounting unit: one oracle call = one per-sample gradient evaluation of one
variable block.  A full-gradient pair therefore consumes n calls per block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericFailure, ResourceExhausted


class MinimaxProblem:
    """Base oracle for (1/n) sum_i f_i(x, y).

    Subclasses must set n, dim_x, dim_y, smoothness_l and strong_concavity_mu
    (None when the problem does not satisfy strong concavity, e.g. the data
    poisoning game), and implement value / grad_x_i / grad_y_i.  Vectorized
    full gradients may be overridden for speed; the defaults average the
    per-sample oracles in index order 0..n-1.

    project_x / project_y are feasible-set projections (None = identity).
    exact_dual_max, when overridden, returns the closed-form y*(x).
    """

    n: int
    dim_x: int
    dim_y: int
    smoothness_l: float
    strong_concavity_mu: float | None
    project_x = None
    project_y = None
    exact_dual_max = None

    @property
    def kappa(self) -> float:
        if self.strong_concavity_mu is None:
            raise InvalidArgument("problem does not declare a strong-concavity constant")
        return self.smoothness_l / self.strong_concavity_mu

    def value(self, x, y) -> float:
        raise NotImplementedError

    def value_i(self, i, x, y) -> float:
        """Component value f_i(x, y); (1/n) sum_i value_i == value."""
        raise NotImplementedError

    def grad_x_i(self, i, x, y) -> np.ndarray:
        raise NotImplementedError

    def grad_y_i(self, i, x, y) -> np.ndarray:
        raise NotImplementedError

    def full_grad_x(self, x, y) -> np.ndarray:
        acc = np.zeros(self.dim_x)
        for i in range(self.n):
            acc += self.grad_x_i(i, x, y)
        return acc / self.n

    def full_grad_y(self, x, y) -> np.ndarray:
        acc = np.zeros(self.dim_y)
        for i in range(self.n):
            acc += self.grad_y_i(i, x, y)
        return acc / self.n

    def apply_project_x(self, x: np.ndarray) -> np.ndarray:
        return x if self.project_x is None else self.project_x(x)

    def apply_project_y(self, y: np.ndarray) -> np.ndarray:
        return y if self.project_y is None else self.project_y(y)

    @property
    def is_constrained(self) -> bool:
        return self.project_x is not None or self.project_y is not None

    def default_init(self, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Problem-appropriate starting point; overridden where the setup pins one."""
        rng = np.random.default_rng(seed)
        x0 = rng.standard_normal(self.dim_x)
        y0 = rng.standard_normal(self.dim_y)
        return self.apply_project_x(x0), self.apply_project_y(y0)


@dataclass(frozen=True)
class FullGradientPair:
    """Both full gradients at one point.

    oracle_calls counts per-sample evaluations per variable block (= n for a
    full pass), so the pair as a whole consumed 2 * oracle_calls evaluations.
    """

    gx: np.ndarray
    gy: np.ndarray
    oracle_calls: int


def _check_point(problem, x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (problem.dim_x,):
        raise InvalidArgument(f"x has shape {x.shape}, expected ({problem.dim_x},)")
    if y.shape != (problem.dim_y,):
        raise InvalidArgument(f"y has shape {y.shape}, expected ({problem.dim_y},)")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise InvalidArgument("x and y must be finite")
    return x, y


def _locate_nonfinite(problem, x, y, block: str) -> int:
    """Slow rescan to name the sample whose gradient went non-finite."""
    grad = problem.grad_x_i if block == "x" else problem.grad_y_i
    for i in range(problem.n):
        if not np.all(np.isfinite(grad(i, x, y))):
            return i
    return -1


def full_gradient(problem: MinimaxProblem, x, y) -> FullGradientPair:
    """(1/n) sum_i grad f_i(x, y) for both blocks; costs n calls per block."""
    x, y = _check_point(problem, x, y)
    gx = problem.full_grad_x(x, y)
    gy = problem.full_grad_y(x, y)
    if not np.all(np.isfinite(gx)):
        raise NumericFailure("non-finite x-gradient", sample=_locate_nonfinite(problem, x, y, "x"))
    if not np.all(np.isfinite(gy)):
        raise NumericFailure("non-finite y-gradient", sample=_locate_nonfinite(problem, x, y, "y"))
    return FullGradientPair(gx=gx, gy=gy, oracle_calls=problem.n)


@dataclass
class AnchorCache:
    """Per-sample gradients memoized at the epoch anchor.

    Row i equals grad_*_i(i, x_anchor, y_anchor) bit-for-bit: rows are filled
    by the per-sample oracle itself, one call per sample, never by a separate
    vectorized path.
    """

    x_anchor: np.ndarray
    y_anchor: np.ndarray
    gx: np.ndarray  # (n, dim_x)
    gy: np.ndarray  # (n, dim_y)

    def mean_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """Anchor full gradients, averaged over rows in index order."""
        return self.gx.mean(axis=0), self.gy.mean(axis=0)


def per_sample_gradient_cache(problem: MinimaxProblem, x_anchor, y_anchor) -> AnchorCache:
    """Memoize every per-sample gradient at (x_anchor, y_anchor).

    Memory is n * (dim_x + dim_y) floats; an allocation failure surfaces as
    ResourceExhausted so the caller can fall back to recomputation.
    Costs n oracle calls per block.
    """
    x_anchor, y_anchor = _check_point(problem, x_anchor, y_anchor)
    try:
        gx = np.empty((problem.n, problem.dim_x))
        gy = np.empty((problem.n, problem.dim_y))
    except MemoryError as exc:
        raise ResourceExhausted(
            f"cannot allocate anchor cache of {problem.n} x ({problem.dim_x}+{problem.dim_y}) floats"
        ) from exc
    for i in range(problem.n):
        gx[i] = problem.grad_x_i(i, x_anchor, y_anchor)
        gy[i] = problem.grad_y_i(i, x_anchor, y_anchor)
    return AnchorCache(x_anchor=x_anchor.copy(), y_anchor=y_anchor.copy(), gx=gx, gy=gy)


@dataclass
class OracleCounter:
    """Per-run accumulator of per-sample gradient evaluations, by block."""

    calls_x: int = 0
    calls_y: int = 0

    @property
    def total(self) -> int:
        return self.calls_x + self.calls_y


class CountingProblem:
    """Delegating wrapper that makes oracle accounting exact by construction.

    Every per-sample evaluation routed through the wrapper increments the
    counter; full gradients add n per block.  Metric code evaluates the bare
    problem instead, so diagnostics never distort a run's oracle budget.
    """

    def __init__(self, problem: MinimaxProblem, counter: OracleCounter | None = None):
        self.problem = problem
        self.counter = counter if counter is not None else OracleCounter()

    def __getattr__(self, name):
        return getattr(self.problem, name)

    def value(self, x, y):
        return self.problem.value(x, y)

    def grad_x_i(self, i, x, y):
        self.counter.calls_x += 1
        return self.problem.grad_x_i(i, x, y)

    def grad_y_i(self, i, x, y):
        self.counter.calls_y += 1
        return self.problem.grad_y_i(i, x, y)

    def full_grad_x(self, x, y):
        self.counter.calls_x += self.problem.n
        return self.problem.full_grad_x(x, y)

    def full_grad_y(self, x, y):
        self.counter.calls_y += self.problem.n
        return self.problem.full_grad_y(x, y)

    def apply_project_x(self, x):
        return self.problem.apply_project_x(x)

    def apply_project_y(self, y):
        return self.problem.apply_project_y(y)
