"""Concrete minimax problem instances.

Three problems cover the test and experiment surface:

* QuadraticNCSC - a synthetic nonconvex-strongly-concave quadratic whose
  primal function Phi, its gradient, and its minimum are all closed form, so
  every theory diagnostic can be checked exactly.
* DROLogistic   - distributionally robust logistic regression with a simplex
  dual, a quadratic divergence penalty, and a nonconvex coordinate-wise
  regularizer.
* PoisonLogistic - the data-poisoning game against logistic regression: the
  attacker perturbs a fixed fraction of the training rows inside an
  l-infinity ball; the learner fits the poisoned data.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import expit

from .data import DatasetMatrix, make_gaussian_features, make_synthetic_classification, train_test_split
from .errors import ConstructionFailure, InvalidArgument, NumericFailure
from .metrics import simplex_project
from .oracle import MinimaxProblem
from .shuffle import rng_for

_EIG_FLOOR = 0.1  # required lower bound on eigenvalues of H = Qbar + Abar Abar^T / mu

# generator stream ids, far above any epoch index (see data module)
_STREAM_QUAD = 1 << 42
_STREAM_POISON_THETA = (1 << 41) + 1
_STREAM_POISON_NOISE = (1 << 41) + 2
_STREAM_POISON_PICK = (1 << 41) + 3


def _log1pexp(a):
    """log(1 + e^a), stable for large |a|."""
    return np.logaddexp(0.0, a)


# ---------------------------------------------------------------------------
# Synthetic nonconvex-strongly-concave quadratic
# ---------------------------------------------------------------------------


class QuadraticNCSC(MinimaxProblem):
    """f_i(x,y) = 1/2 x'Q_i x + x'A_i y - mu/2 ||y||^2 + a_i'x + b_i'y.

    The mean matrix Qbar must have a negative eigenvalue (nonconvex in x)
    while H = Qbar + Abar Abar'/mu stays positive definite (Phi bounded
    below), which gives closed forms:

        y*(x)   = (Abar' x + bbar) / mu
        Phi(x)  = 1/2 x'H x + c'x + ||bbar||^2/(2 mu),  c = abar + Abar bbar / mu
        Phi*    = Phi(-H^{-1} c)
    """

    def __init__(self, Qs, As, a_offsets, b_offsets, mu):
        Qs = np.asarray(Qs, dtype=np.float64)
        As = np.asarray(As, dtype=np.float64)
        a_offsets = np.asarray(a_offsets, dtype=np.float64)
        b_offsets = np.asarray(b_offsets, dtype=np.float64)
        if Qs.ndim != 3 or Qs.shape[1] != Qs.shape[2]:
            raise InvalidArgument("Qs must have shape (n, dim_x, dim_x)")
        n, dx = Qs.shape[0], Qs.shape[1]
        dy = As.shape[2]
        if As.shape != (n, dx, dy):
            raise InvalidArgument("As must have shape (n, dim_x, dim_y)")
        if a_offsets.shape != (n, dx) or b_offsets.shape != (n, dy):
            raise InvalidArgument("offset shapes must be (n, dim_x) and (n, dim_y)")
        if not np.allclose(Qs, np.swapaxes(Qs, 1, 2), atol=1e-12):
            raise InvalidArgument("each Q_i must be symmetric")
        if mu <= 0:
            raise InvalidArgument("mu must be positive")

        self.n = n
        self.dim_x = dx
        self.dim_y = dy
        self.mu = float(mu)
        self.strong_concavity_mu = float(mu)
        self.Qs, self.As = Qs, As
        self.a_offsets, self.b_offsets = a_offsets, b_offsets

        self.Q_bar = Qs.mean(axis=0)
        self.A_bar = As.mean(axis=0)
        self.a_bar = a_offsets.mean(axis=0)
        self.b_bar = b_offsets.mean(axis=0)
        self.H = self.Q_bar + self.A_bar @ self.A_bar.T / self.mu
        self.c = self.a_bar + self.A_bar @ self.b_bar / self.mu
        self.phi_const = float(self.b_bar @ self.b_bar) / (2.0 * self.mu)

        q_norms = np.linalg.norm(Qs, ord=2, axis=(1, 2))
        a_norms = np.linalg.norm(As, ord=2, axis=(1, 2))
        self.smoothness_l = float(np.max(q_norms + a_norms) + self.mu)

        eig_q = np.linalg.eigvalsh(self.Q_bar)
        eig_h = np.linalg.eigvalsh(self.H)
        if eig_q[0] >= 0:
            raise InvalidArgument(f"Qbar must have a negative eigenvalue, got lambda_min={eig_q[0]:.6g}")
        if eig_h[0] < _EIG_FLOOR - 1e-9:
            raise InvalidArgument(f"H must satisfy lambda_min >= {_EIG_FLOOR}, got {eig_h[0]:.6g}")
        if self.kappa < 1.0:
            raise InvalidArgument("condition number below 1 contradicts the problem assumptions")

        try:
            self.x_star = np.linalg.solve(self.H, -self.c)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure("H is numerically singular") from exc
        self.phi_star = self.phi(self.x_star)

    # closed forms -----------------------------------------------------------

    def phi(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(0.5 * x @ self.H @ x + self.c @ x + self.phi_const)

    def grad_phi(self, x) -> np.ndarray:
        return self.H @ np.asarray(x, dtype=np.float64) + self.c

    def exact_dual_max(self, x) -> np.ndarray:
        return (self.A_bar.T @ np.asarray(x, dtype=np.float64) + self.b_bar) / self.mu

    # oracle -----------------------------------------------------------------

    def value(self, x, y) -> float:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        return float(
            0.5 * x @ self.Q_bar @ x
            + x @ self.A_bar @ y
            - 0.5 * self.mu * (y @ y)
            + self.a_bar @ x
            + self.b_bar @ y
        )

    def value_i(self, i, x, y) -> float:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        return float(
            0.5 * x @ self.Qs[i] @ x
            + x @ self.As[i] @ y
            - 0.5 * self.mu * (y @ y)
            + self.a_offsets[i] @ x
            + self.b_offsets[i] @ y
        )

    def grad_x_i(self, i, x, y):
        return self.Qs[i] @ x + self.As[i] @ y + self.a_offsets[i]

    def grad_y_i(self, i, x, y):
        return self.As[i].T @ x - self.mu * y + self.b_offsets[i]

    def full_grad_x(self, x, y):
        return self.Q_bar @ x + self.A_bar @ y + self.a_bar

    def full_grad_y(self, x, y):
        return self.A_bar.T @ x - self.mu * y + self.b_bar


def quadratic_phi(problem: QuadraticNCSC, x) -> tuple[float, np.ndarray, float]:
    """(Phi(x), grad Phi(x), Phi*) in closed form."""
    return problem.phi(x), problem.grad_phi(x), problem.phi_star


def make_quadratic(
    dim_x: int,
    dim_y: int,
    n: int,
    target_kappa: float,
    seed: int,
    mu: float = 1.0,
    max_attempts: int = 40,
) -> QuadraticNCSC:
    """Sample a QuadraticNCSC whose condition number hits target_kappa.

    The mean matrices are laid out first (Qbar mildly indefinite, Abar with
    equal singular values so that H = Qbar + Abar Abar'/mu clears the 0.1
    eigenvalue floor), then zero-sum per-sample deviations are scaled by
    bisection until max_i(||Q_i|| + ||A_i||) + mu equals target_kappa * mu.
    Instances failing the eigenvalue checks are resampled from a derived
    seed; an infeasible target (kappa too close to 1 for the floor) fails
    with ConstructionFailure.
    """
    if target_kappa < 1.0:
        raise InvalidArgument(f"target_kappa must be >= 1, got {target_kappa}")
    if min(dim_x, dim_y, n) < 1:
        raise InvalidArgument("dim_x, dim_y and n must be positive")
    budget = (target_kappa - 1.0) * mu  # max_i(||Q_i|| + ||A_i||) must land here
    sigma_a = 0.6 * budget
    q_norm = min(0.15 * budget, 0.5 * (sigma_a**2 / mu - _EIG_FLOOR))
    if q_norm <= 0.0:
        raise ConstructionFailure(
            f"target_kappa={target_kappa} leaves no budget for an indefinite Qbar "
            f"with lambda_min(H) >= {_EIG_FLOOR}; increase target_kappa"
        )

    for attempt in range(max_attempts):
        rng = rng_for(seed, _STREAM_QUAD + attempt)

        w, _ = np.linalg.qr(rng.standard_normal((dim_x, dim_x)))
        eigs = np.linspace(-1.0, 1.0, dim_x) if dim_x > 1 else np.array([-1.0])
        Q_bar = q_norm * (w * eigs) @ w.T

        u, _ = np.linalg.qr(rng.standard_normal((dim_x, dim_x)))
        v, _ = np.linalg.qr(rng.standard_normal((dim_y, dim_y)))
        A_bar = sigma_a * u @ np.eye(dim_x, dim_y) @ v

        a_bar = rng.standard_normal(dim_x)
        b_bar = rng.standard_normal(dim_y)

        dQ = rng.standard_normal((n, dim_x, dim_x))
        dQ = 0.5 * (dQ + np.swapaxes(dQ, 1, 2))
        dQ -= dQ.mean(axis=0)
        dA = rng.standard_normal((n, dim_x, dim_y))
        dA -= dA.mean(axis=0)
        da = rng.standard_normal((n, dim_x))
        da -= da.mean(axis=0)
        db = rng.standard_normal((n, dim_y))
        db -= db.mean(axis=0)

        if n == 1:
            # Zero-sum deviations vanish for a single term; scale the means
            # themselves onto the smoothness budget instead.
            scale = budget / (q_norm + sigma_a)
            Q_bar *= scale
            A_bar *= scale

        def spread(s):
            return float(
                np.max(
                    np.linalg.norm(Q_bar + s * dQ, ord=2, axis=(1, 2))
                    + np.linalg.norm(A_bar + s * dA, ord=2, axis=(1, 2))
                )
            )

        if spread(0.0) >= budget or n == 1:
            s_star = 0.0
        else:
            s_hi = 1.0
            for _ in range(80):
                if spread(s_hi) > budget:
                    break
                s_hi *= 2.0
            s_lo = 0.0
            for _ in range(80):
                mid = 0.5 * (s_lo + s_hi)
                if spread(mid) > budget:
                    s_hi = mid
                else:
                    s_lo = mid
            s_star = s_lo

        try:
            problem = QuadraticNCSC(
                Qs=Q_bar + s_star * dQ,
                As=A_bar + s_star * dA,
                a_offsets=a_bar + da,
                b_offsets=b_bar + db,
                mu=mu,
            )
        except InvalidArgument:
            continue
        if abs(problem.kappa - target_kappa) <= 0.05 * target_kappa:
            return problem
    raise ConstructionFailure(f"could not hit target_kappa={target_kappa} within {max_attempts} attempts")


# ---------------------------------------------------------------------------
# Distributionally robust logistic regression
# ---------------------------------------------------------------------------


class DROLogistic(MinimaxProblem):
    """f(x,y) = sum_i y_i l_i(x) - V(y) + g(x) over y in the simplex, with

        l_i(x) = log(1 + exp(-t_i z_i'x))       (logistic loss)
        V(y)   = (lambda1/2) ||n y - 1||^2      (divergence penalty)
        g(x)   = lambda2 sum_j alpha x_j^2 / (1 + alpha x_j^2)

    split into f_i(x,y) = n y_i l_i(x) - V(y) + g(x).  Every f_i is exactly
    (lambda1 n^2)-strongly concave in y, so mu = lambda1 n^2 (= 1 with the
    default lambda1 = 1/n^2).  The inner maximum is the Euclidean projection
    of l(x)/(lambda1 n^2) + 1/n onto the simplex.
    """

    def __init__(self, dataset: DatasetMatrix, lambda1: float | None = None, lambda2: float = 1e-3, alpha: float = 10.0):
        self.dataset = dataset
        self.Z = dataset.features
        self.t = dataset.labels
        n, d = dataset.n, dataset.d
        self.n = n
        self.dim_x = d
        self.dim_y = n
        self.lambda1 = float(lambda1) if lambda1 is not None else 1.0 / n**2
        self.lambda2 = float(lambda2)
        self.alpha = float(alpha)
        self.strong_concavity_mu = self.lambda1 * n**2
        self.project_y = simplex_project
        self._loss_cache: tuple[bytes, np.ndarray] | None = None

        # Smoothness bound, valid on the feasible set (y_i <= 1 on the simplex):
        # the xx block is at most n*max||z||^2/4 + 2*alpha*lambda2, the coupling
        # block n*max||z||, the yy block exactly mu.
        row_norms = np.linalg.norm(self.Z, axis=1)
        max_z = float(row_norms.max()) if n else 0.0
        self.smoothness_l = max(
            n * max_z**2 / 4.0 + 2.0 * self.alpha * self.lambda2 + n * max_z,
            n * max_z + self.strong_concavity_mu,
        )

    # pieces -----------------------------------------------------------------

    def losses(self, x) -> np.ndarray:
        """l_i(x) for every sample; memoized on the last x seen, since the
        inner maximization evaluates thousands of y's at one fixed x."""
        x = np.asarray(x, dtype=np.float64)
        key = x.tobytes()
        if self._loss_cache is None or self._loss_cache[0] != key:
            self._loss_cache = (key, _log1pexp(-self.t * (self.Z @ x)))
        return self._loss_cache[1]

    def _loss_i(self, i, x) -> float:
        return float(_log1pexp(-self.t[i] * (self.Z[i] @ x)))

    def _grad_loss_i(self, i, x) -> np.ndarray:
        m = -self.t[i] * (self.Z[i] @ x)
        return (-self.t[i] * expit(m)) * self.Z[i]

    def _grad_g(self, x) -> np.ndarray:
        ax2 = self.alpha * x * x
        return self.lambda2 * 2.0 * self.alpha * x / (1.0 + ax2) ** 2

    def _grad_v(self, y) -> np.ndarray:
        return self.lambda1 * self.n * (self.n * y - 1.0)

    # oracle -----------------------------------------------------------------

    def value(self, x, y) -> float:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        ny1 = self.n * y - 1.0
        ax2 = self.alpha * x * x
        g = self.lambda2 * float(np.sum(ax2 / (1.0 + ax2)))
        return float(y @ self.losses(x)) - 0.5 * self.lambda1 * float(ny1 @ ny1) + g

    def value_i(self, i, x, y) -> float:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        ny1 = self.n * y - 1.0
        ax2 = self.alpha * x * x
        g = self.lambda2 * float(np.sum(ax2 / (1.0 + ax2)))
        return self.n * float(y[i]) * self._loss_i(i, x) - 0.5 * self.lambda1 * float(ny1 @ ny1) + g

    def grad_x_i(self, i, x, y):
        return (self.n * y[i]) * self._grad_loss_i(i, x) + self._grad_g(x)

    def grad_y_i(self, i, x, y):
        g = -self._grad_v(y)
        g[i] += self.n * self._loss_i(i, x)
        return g

    def full_grad_x(self, x, y):
        m = -self.t * (self.Z @ x)
        w = -y * self.t * expit(m)
        return self.Z.T @ w + self._grad_g(x)

    def full_grad_y(self, x, y):
        return self.losses(x) - self._grad_v(y)

    def exact_dual_max(self, x) -> np.ndarray:
        c = self.losses(x) / (self.lambda1 * self.n**2) + 1.0 / self.n
        return simplex_project(c)

    def default_init(self, seed: int = 0):
        return np.zeros(self.dim_x), np.full(self.dim_y, 1.0 / self.n)


def dro_exact_dual_max(problem: DROLogistic, x) -> np.ndarray:
    """Closed-form inner maximizer over the simplex (projection of
    l(x)/(lambda1 n^2) + 1/n), with its first-order optimality verified:
    on the support the reduced gradient must be constant."""
    y_star = problem.exact_dual_max(np.asarray(x, dtype=np.float64))
    grad = problem.full_grad_y(x, y_star)
    support = y_star > 0
    if support.any():
        g_sup = grad[support]
        if float(g_sup.max() - g_sup.min()) > 1e-8 * (1.0 + float(np.abs(g_sup).max())):
            raise NumericFailure("projected point violates first-order optimality on its support")
    return y_star


def make_dro_logistic(dataset: DatasetMatrix, lambda1=None, lambda2=1e-3, alpha=10.0) -> DROLogistic:
    return DROLogistic(dataset, lambda1=lambda1, lambda2=lambda2, alpha=alpha)


# ---------------------------------------------------------------------------
# Data poisoning against logistic regression
# ---------------------------------------------------------------------------


class PoisonLogistic(MinimaxProblem):
    """Poisoning game mapped into the library's min-max convention.

    The learner's weights theta are the primal (min) block; the attacker's
    perturbation is the dual (max) block, clamped to ||.||_inf <= epsilon.
    The objective is the sum of the averaged cross-entropies of the poisoned
    subset (inputs z_i + x) and the clean subset (inputs z_i):

        f(theta, x) = F(x, theta; D_poisoned) + F(0, theta; D_clean)

    split over the m training rows as f_i = m * w_i * ce_i with w_i the
    subset-averaging weight.  Strong concavity in the dual does NOT hold for
    this game; it runs exactly as the experiment does, tracked by the
    game-stationarity gap and test accuracy only (strong_concavity_mu=None).
    """

    def __init__(self, dataset: DatasetMatrix, poison_mask: np.ndarray, epsilon: float, theta_star: np.ndarray):
        if dataset.train_idx is None:
            raise InvalidArgument("poisoning needs a dataset with a train/test split")
        self.dataset = dataset
        self.epsilon = float(epsilon)
        self.theta_star = np.asarray(theta_star, dtype=np.float64)

        train = dataset.train
        self.Z = train.features
        self.t01 = train.labels01
        m, d = train.n, train.d
        self.n = m
        self.dim_x = d  # model weights theta
        self.dim_y = d  # perturbation
        self.poison_mask = np.asarray(poison_mask, dtype=bool)
        if self.poison_mask.shape != (m,):
            raise InvalidArgument("poison_mask must align with the training rows")
        n_poison = int(self.poison_mask.sum())
        if n_poison == 0 or n_poison == m:
            raise InvalidArgument("poisoned subset must be a proper nonempty subset")
        self.weights = np.where(self.poison_mask, 1.0 / n_poison, 1.0 / (m - n_poison))
        self.strong_concavity_mu = None

        # Heuristic curvature bound on the region ||x||_inf <= eps, ||theta|| <= 10:
        # only metric defaults consume it, never the convergence theory.
        row = np.linalg.norm(self.Z, axis=1).max() + self.epsilon * math.sqrt(d)
        self.smoothness_l = float(m * self.weights.max() * (0.25 * row**2 + 10.0 * row + 1.0))

        eps = self.epsilon
        self.project_y = lambda v: np.clip(v, -eps, eps)

    def _inputs(self, i, x_pert):
        return self.Z[i] + x_pert if self.poison_mask[i] else self.Z[i]

    def value(self, theta, x_pert) -> float:
        theta = np.asarray(theta, dtype=np.float64)
        x_pert = np.asarray(x_pert, dtype=np.float64)
        inputs = self.Z + np.where(self.poison_mask[:, None], x_pert, 0.0)
        a = inputs @ theta
        ce = _log1pexp(a) - self.t01 * a
        return float(np.sum(self.weights * ce))

    def value_i(self, i, theta, x_pert) -> float:
        z = self._inputs(i, x_pert)
        a = float(z @ np.asarray(theta, dtype=np.float64))
        return self.n * self.weights[i] * (float(np.logaddexp(0.0, a)) - self.t01[i] * a)

    def grad_x_i(self, i, theta, x_pert):
        z = self._inputs(i, x_pert)
        p = expit(z @ theta)
        return (self.n * self.weights[i] * (p - self.t01[i])) * z

    def grad_y_i(self, i, theta, x_pert):
        if not self.poison_mask[i]:
            return np.zeros(self.dim_y)
        z = self.Z[i] + x_pert
        p = expit(z @ theta)
        return (self.n * self.weights[i] * (p - self.t01[i])) * theta

    def full_grad_x(self, theta, x_pert):
        inputs = self.Z + np.where(self.poison_mask[:, None], x_pert, 0.0)
        p = expit(inputs @ theta)
        return inputs.T @ (self.weights * (p - self.t01))

    def full_grad_y(self, theta, x_pert):
        mask = self.poison_mask
        inputs = self.Z[mask] + x_pert
        p = expit(inputs @ theta)
        coeff = float(np.sum(self.weights[mask] * (p - self.t01[mask])))
        return coeff * np.asarray(theta, dtype=np.float64)

    def default_init(self, seed: int = 0):
        return np.zeros(self.dim_x), np.zeros(self.dim_y)


def make_poisoning_instance(
    seed: int,
    n: int = 1000,
    d: int = 100,
    poison_fraction: float = 0.10,
    epsilon: float = 2.0,
    train_fraction: float = 0.7,
    label_noise_var: float = 1e-3,
) -> PoisonLogistic:
    """Synthetic poisoning setup: n standard-Gaussian feature vectors in R^d,
    labels thresholded from a random base model theta* with small logit noise,
    a seeded train/test split, and poison_fraction of the training rows
    marked as attackable inside the epsilon-ball."""
    features = make_gaussian_features(n, d, seed)
    theta_star = rng_for(seed, _STREAM_POISON_THETA).standard_normal(d)
    nu = rng_for(seed, _STREAM_POISON_NOISE).normal(0.0, math.sqrt(label_noise_var), size=n)
    labels = np.where(expit(features @ theta_star + nu) > 0.5, 1.0, -1.0)
    dataset = train_test_split(DatasetMatrix(features, labels), train_fraction, seed)

    m = dataset.train_idx.size
    n_poison = int(round(poison_fraction * m))
    if n_poison < 1 or n_poison >= m:
        raise InvalidArgument(f"poison_fraction={poison_fraction} yields a degenerate subset")
    order = rng_for(seed, _STREAM_POISON_PICK).permutation(m)
    mask = np.zeros(m, dtype=bool)
    mask[order[:n_poison]] = True
    return PoisonLogistic(dataset, mask, epsilon, theta_star)


def prediction_accuracy(theta, dataset: DatasetMatrix) -> float:
    """Fraction of rows with 1{sigmoid(z'theta) > 0.5} matching the label.

    The tie sigmoid = 0.5 predicts class 0 (strict inequality)."""
    if dataset.n == 0:
        raise InvalidArgument("empty dataset")
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (dataset.d,):
        raise InvalidArgument(f"theta has shape {theta.shape}, expected ({dataset.d},)")
    predicted = (expit(dataset.features @ theta) > 0.5).astype(np.float64)
    return float(np.mean(predicted == dataset.labels01))


# ---------------------------------------------------------------------------
# Problem registry
# ---------------------------------------------------------------------------

PROBLEM_NAMES = ("quadratic", "dro-logistic", "poison-logistic")


def make_problem(name: str, seed: int = 0, **params) -> MinimaxProblem:
    """Problem lookup by name for the harness and CLI.

    quadratic:        dim_x, dim_y, n, target_kappa, mu
    dro-logistic:     dataset (DatasetMatrix) or synthetic (n, d); lambda1/2, alpha
    poison-logistic:  n, d, poison_fraction, epsilon, train_fraction
    """
    if name == "quadratic":
        return make_quadratic(
            dim_x=params.pop("dim_x", 10),
            dim_y=params.pop("dim_y", 10),
            n=params.pop("n", 50),
            target_kappa=params.pop("target_kappa", 10.0),
            seed=seed,
            mu=params.pop("mu", 1.0),
        )
    if name == "dro-logistic":
        dataset = params.pop("dataset", None)
        if dataset is None:
            dataset = make_synthetic_classification(
                n=params.pop("n", 500), d=params.pop("d", 123), seed=seed
            )
        return make_dro_logistic(
            dataset,
            lambda1=params.pop("lambda1", None),
            lambda2=params.pop("lambda2", 1e-3),
            alpha=params.pop("alpha", 10.0),
        )
    if name == "poison-logistic":
        return make_poisoning_instance(
            seed,
            n=params.pop("n", 1000),
            d=params.pop("d", 100),
            poison_fraction=params.pop("poison_fraction", 0.10),
            epsilon=params.pop("epsilon", 2.0),
            train_fraction=params.pop("train_fraction", 0.7),
        )
    raise InvalidArgument(f"unknown problem {name!r}, expected one of {PROBLEM_NAMES}")
