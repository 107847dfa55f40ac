import numpy as np
import pytest
from scipy.special import expit

from helpers import central_diff, rel_err, simplex_grid_argmin
from vrgda.data import make_synthetic_classification
from vrgda.errors import ConstructionFailure, InvalidArgument
from vrgda.problems import (
    DROLogistic,
    PoisonLogistic,
    dro_exact_dual_max,
    make_dro_logistic,
    make_poisoning_instance,
    make_problem,
    make_quadratic,
    prediction_accuracy,
    quadratic_phi,
)

# ---------------------------------------------------------------------------
# QuadraticNCSC
# ---------------------------------------------------------------------------


def test_make_quadratic_rejects_kappa_below_one():
    with pytest.raises(InvalidArgument):
        make_quadratic(2, 2, 3, 0.5, seed=0)


def test_make_quadratic_kappa_one_is_infeasible():
    # no budget for an indefinite Qbar: the generator must refuse
    with pytest.raises(ConstructionFailure):
        make_quadratic(2, 2, 3, 1.0, seed=0)


def test_quadratic_eigenvalue_invariants(small_quadratic):
    p = small_quadratic  # d=2, n=3, kappa=10, seed=7
    assert np.linalg.eigvalsh(p.Q_bar)[0] < 0
    assert np.linalg.eigvalsh(p.H)[0] >= 0.1 - 1e-9
    assert abs(p.kappa - 10.0) <= 0.5
    # every component is exactly mu-strongly concave in y by construction
    assert p.strong_concavity_mu == 1.0


def test_quadratic_kappa_contract():
    for seed in (0, 1, 2):
        p = make_quadratic(4, 4, 10, target_kappa=25.0, seed=seed)
        assert abs(p.kappa - 25.0) <= 0.05 * 25.0


def test_quadratic_value_at_exact_dual_matches_phi(small_quadratic, rng):
    p = small_quadratic
    for _ in range(100):
        x = rng.standard_normal(p.dim_x)
        assert abs(p.value(x, p.exact_dual_max(x)) - p.phi(x)) <= 1e-10


def test_quadratic_phi_minimizer(small_quadratic):
    p = small_quadratic
    phi, grad, phi_star = quadratic_phi(p, p.x_star)
    assert np.linalg.norm(grad) <= 1e-9
    assert phi == pytest.approx(phi_star, abs=1e-12)


def test_quadratic_phi_finite_difference(small_quadratic, rng):
    p = small_quadratic
    for _ in range(5):
        x = rng.standard_normal(p.dim_x)
        _, grad, _ = quadratic_phi(p, x)
        fd = central_diff(lambda v: p.phi(v), x)
        assert rel_err(grad, fd) <= 1e-6


def test_quadratic_phi_dominates_f(small_quadratic, rng):
    p = small_quadratic
    for _ in range(100):
        x = rng.standard_normal(p.dim_x)
        y = rng.standard_normal(p.dim_y)
        assert p.phi(x) >= p.value(x, y) - 1e-10


def test_quadratic_dual_optimality(small_quadratic, rng):
    p = small_quadratic
    x = rng.standard_normal(p.dim_x)
    assert np.linalg.norm(p.full_grad_y(x, p.exact_dual_max(x))) <= 1e-10


# ---------------------------------------------------------------------------
# per-sample gradient checks (all problems)
# ---------------------------------------------------------------------------


def per_sample_fd_check(problem, rng, points=5, tol=1e-5, scale=0.5):
    for _ in range(points):
        x = rng.standard_normal(problem.dim_x) * scale
        y = problem.apply_project_y(rng.standard_normal(problem.dim_y) * scale)
        i = int(rng.integers(problem.n))
        # f_i is recovered from the oracle as n*f - (n-1)*f_without_i; easier:
        # check grad of the scalar s -> value along random directions via the
        # full gradient, and per-sample consistency via averaging.
        gx = problem.full_grad_x(x, y)
        fd = central_diff(lambda v: problem.value(v, y), x)
        assert rel_err(gx, fd) <= tol
        mean_gx = np.mean([problem.grad_x_i(k, x, y) for k in range(problem.n)], axis=0)
        assert np.abs(mean_gx - gx).max() <= 1e-9 * (1 + np.abs(gx).max()) * problem.n
        gy = problem.full_grad_y(x, y)
        fdy = central_diff(lambda v: problem.value(x, v), y)
        assert rel_err(gy, fdy) <= tol
        mean_gy = np.mean([problem.grad_y_i(k, x, y) for k in range(problem.n)], axis=0)
        assert np.abs(mean_gy - gy).max() <= 1e-9 * (1 + np.abs(gy).max()) * problem.n
        _ = i


def test_quadratic_gradients_fd(small_quadratic, rng):
    per_sample_fd_check(small_quadratic, rng)


def test_dro_gradients_fd(tiny_dro, rng):
    per_sample_fd_check(tiny_dro, rng)


def test_poison_gradients_fd(rng):
    p = make_poisoning_instance(seed=5, n=60, d=8)
    per_sample_fd_check(p, rng)


# ---------------------------------------------------------------------------
# DROLogistic
# ---------------------------------------------------------------------------


def test_dro_mu_equals_lambda1_n_squared(tiny_dro):
    assert tiny_dro.strong_concavity_mu == tiny_dro.lambda1 * tiny_dro.n**2
    assert tiny_dro.strong_concavity_mu == 1.0  # paper default lambda1 = 1/n^2


def test_dro_uniform_dual_when_losses_equal():
    # two mirrored samples: l_1(0) = l_2(0) = log 2, so y* is uniform
    from vrgda.data import DatasetMatrix

    ds = DatasetMatrix(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([1.0, -1.0]))
    p = make_dro_logistic(ds)
    y_star = dro_exact_dual_max(p, np.zeros(2))
    assert np.abs(y_star - 0.5).max() <= 1e-12


def test_dro_exact_dual_max_against_grid(tiny_dro, rng):
    from vrgda.data import DatasetMatrix

    ds = DatasetMatrix(rng.standard_normal((3, 4)), np.array([1.0, -1.0, 1.0]))
    p = make_dro_logistic(ds)
    x = rng.standard_normal(4) * 0.5
    y_star = dro_exact_dual_max(p, x)
    # grid argmax of f(x, .) over the 3-simplex; the inner problem is an
    # isotropic quadratic so this is the nearest-grid-point check
    target = p.losses(x) / (p.lambda1 * p.n**2) + 1.0 / p.n
    grid_best = simplex_grid_argmin(target, resolution=1e-4)
    assert np.abs(y_star - grid_best).max() <= 2e-4


def test_dro_dual_maximality(tiny_dro, rng):
    p = tiny_dro
    x = rng.standard_normal(p.dim_x) * 0.5
    y_star = dro_exact_dual_max(p, x)
    best = p.value(x, y_star)
    for _ in range(100):
        y = p.apply_project_y(rng.standard_normal(p.dim_y))
        assert best >= p.value(x, y) - 1e-10


def test_dro_projection_keeps_simplex(tiny_dro, rng):
    y = tiny_dro.apply_project_y(rng.standard_normal(tiny_dro.dim_y) * 3)
    assert abs(y.sum() - 1.0) <= 1e-12
    assert (y >= 0).all()


# ---------------------------------------------------------------------------
# PoisonLogistic
# ---------------------------------------------------------------------------


def test_poisoning_instance_paper_parameters():
    p = make_poisoning_instance(seed=0)
    assert p.dataset.n == 1000
    assert p.dataset.d == 100
    assert p.epsilon == 2.0
    m = p.n
    assert int(p.poison_mask.sum()) == round(0.10 * m)
    assert p.strong_concavity_mu is None


def test_poison_labels_threshold_at_logit_sign():
    p = make_poisoning_instance(seed=3, n=200, d=10, label_noise_var=0.0)
    logits = p.dataset.features @ p.theta_star
    expect = np.where(logits > 0, 1.0, -1.0)
    assert np.array_equal(p.dataset.labels, expect)


def test_poison_label_balance_across_seeds():
    rates = []
    for seed in range(50):
        p = make_poisoning_instance(seed=seed, n=250, d=30)
        rates.append(p.dataset.labels01.mean())
    assert 0.4 <= float(np.mean(rates)) <= 0.6
    assert all(0.25 <= r <= 0.75 for r in rates)


def test_poison_clean_subset_independent_of_perturbation(rng):
    p = make_poisoning_instance(seed=9, n=80, d=6)
    theta = rng.standard_normal(6)
    a = p.apply_project_y(rng.standard_normal(6))
    b = p.apply_project_y(rng.standard_normal(6))
    for i in np.flatnonzero(~p.poison_mask)[:10]:
        assert np.array_equal(p.grad_x_i(int(i), theta, a), p.grad_x_i(int(i), theta, b))
        assert np.all(p.grad_y_i(int(i), theta, a) == 0.0)
        assert np.all(p.grad_y_i(int(i), theta, b) == 0.0)


def test_poison_projection_clamps_linf(rng):
    p = make_poisoning_instance(seed=1, n=60, d=5)
    v = rng.standard_normal(5) * 10
    clamped = p.apply_project_y(v)
    assert np.abs(clamped).max() <= p.epsilon


def test_prediction_accuracy_perfect_for_base_model():
    p = make_poisoning_instance(seed=4, n=150, d=12, label_noise_var=0.0)
    assert prediction_accuracy(p.theta_star, p.dataset) == 1.0


def test_prediction_accuracy_zero_model_predicts_class_zero():
    p = make_poisoning_instance(seed=4, n=150, d=12)
    acc = prediction_accuracy(np.zeros(12), p.dataset)
    # sigmoid(0) = 0.5 is not > 0.5, so everything is predicted as class 0
    assert acc == pytest.approx(1.0 - p.dataset.labels01.mean())


def test_prediction_accuracy_random_model_near_chance():
    accs = []
    for seed in range(20):
        p = make_poisoning_instance(seed=seed, n=400, d=40)
        theta = np.random.default_rng(seed + 1000).standard_normal(40)
        accs.append(prediction_accuracy(theta, p.dataset))
    assert abs(float(np.mean(accs)) - 0.5) <= 0.1


def test_prediction_accuracy_errors():
    p = make_poisoning_instance(seed=2, n=50, d=4)
    with pytest.raises(InvalidArgument):
        prediction_accuracy(np.zeros(5), p.dataset)
    from vrgda.data import DatasetMatrix

    empty = DatasetMatrix(np.zeros((0, 4)), np.zeros(0))
    with pytest.raises(InvalidArgument):
        prediction_accuracy(np.zeros(4), empty)


def test_poison_value_matches_subset_average(rng):
    p = make_poisoning_instance(seed=8, n=90, d=7)
    theta = rng.standard_normal(7) * 0.5
    pert = p.apply_project_y(rng.standard_normal(7))
    mask = p.poison_mask
    z_poison = p.Z[mask] + pert
    z_clean = p.Z[~mask]
    def ce(z, t):
        a = z @ theta
        return float(np.mean(np.logaddexp(0.0, a) - t * a))
    expect = ce(z_poison, p.t01[mask]) + ce(z_clean, p.t01[~mask])
    assert p.value(theta, pert) == pytest.approx(expect, rel=1e-12)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def test_value_i_averages_to_value(small_quadratic, tiny_dro, rng):
    poison = make_poisoning_instance(seed=3, n=50, d=6)
    for p in (small_quadratic, tiny_dro, poison):
        x = rng.standard_normal(p.dim_x) * 0.4
        y = p.apply_project_y(rng.standard_normal(p.dim_y) * 0.4)
        mean_val = np.mean([p.value_i(i, x, y) for i in range(p.n)])
        assert mean_val == pytest.approx(p.value(x, y), rel=1e-10, abs=1e-12)


def test_make_problem_registry():
    assert isinstance(make_problem("quadratic", seed=0, dim_x=2, dim_y=2, n=3), type(make_quadratic(2, 2, 3, 10.0, 0)))
    assert isinstance(make_problem("dro-logistic", seed=0, n=30, d=8), DROLogistic)
    assert isinstance(make_problem("poison-logistic", seed=0, n=60, d=5), PoisonLogistic)
    with pytest.raises(InvalidArgument):
        make_problem("nope", seed=0)
