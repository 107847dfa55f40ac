import numpy as np
import pytest

from helpers import central_diff, rel_err
from vrgda.errors import InvalidArgument, NumericFailure, ResourceExhausted
from vrgda.oracle import (
    CountingProblem,
    MinimaxProblem,
    full_gradient,
    per_sample_gradient_cache,
)
from vrgda.problems import make_quadratic


class ZeroProblem(MinimaxProblem):
    n = 4
    dim_x = 3
    dim_y = 2
    smoothness_l = 1.0
    strong_concavity_mu = 1.0

    def value(self, x, y):
        return 0.0

    def grad_x_i(self, i, x, y):
        return np.zeros(self.dim_x)

    def grad_y_i(self, i, x, y):
        return np.zeros(self.dim_y)


class BrokenProblem(ZeroProblem):
    bad_index = 2

    def grad_x_i(self, i, x, y):
        g = np.zeros(self.dim_x)
        if i == self.bad_index:
            g[0] = np.inf
        return g


def test_zero_component_gradients_give_zero_full_gradient():
    p = ZeroProblem()
    pair = full_gradient(p, np.ones(3), np.ones(2))
    assert np.array_equal(pair.gx, np.zeros(3))
    assert np.array_equal(pair.gy, np.zeros(2))
    assert pair.oracle_calls == p.n


def test_single_term_problem_full_gradient_is_exact(small_quadratic):
    p = make_quadratic(dim_x=2, dim_y=2, n=1, target_kappa=8.0, seed=3)
    x = np.array([0.3, -1.2])
    y = np.array([0.7, 0.1])
    pair = full_gradient(p, x, y)
    assert np.array_equal(pair.gx, p.grad_x_i(0, x, y))
    assert np.array_equal(pair.gy, p.grad_y_i(0, x, y))


def test_full_gradient_matches_finite_differences(small_quadratic, rng):
    p = small_quadratic  # d=2, n=3, seeded
    x = rng.standard_normal(2)
    y = rng.standard_normal(2)
    pair = full_gradient(p, x, y)
    fd_x = central_diff(lambda v: p.value(v, y), x)
    fd_y = central_diff(lambda v: p.value(x, v), y)
    assert rel_err(pair.gx, fd_x) <= 1e-6
    assert rel_err(pair.gy, fd_y) <= 1e-6


def test_averaging_property(bench_quadratic, rng):
    p = bench_quadratic
    x = rng.standard_normal(p.dim_x)
    y = rng.standard_normal(p.dim_y)
    pair = full_gradient(p, x, y)
    mean_gx = np.mean([p.grad_x_i(i, x, y) for i in range(p.n)], axis=0)
    mean_gy = np.mean([p.grad_y_i(i, x, y) for i in range(p.n)], axis=0)
    assert np.abs(mean_gx - pair.gx).max() <= 1e-12 * p.n
    assert np.abs(mean_gy - pair.gy).max() <= 1e-12 * p.n


def test_determinism(small_quadratic, rng):
    x = rng.standard_normal(2)
    y = rng.standard_normal(2)
    a = full_gradient(small_quadratic, x, y)
    b = full_gradient(small_quadratic, x, y)
    assert np.array_equal(a.gx, b.gx) and np.array_equal(a.gy, b.gy)


def test_dimension_mismatch_and_nonfinite_input(small_quadratic):
    with pytest.raises(InvalidArgument):
        full_gradient(small_quadratic, np.zeros(3), np.zeros(2))
    with pytest.raises(InvalidArgument):
        full_gradient(small_quadratic, np.array([np.nan, 0.0]), np.zeros(2))


def test_nonfinite_gradient_carries_sample_index():
    p = BrokenProblem()
    with pytest.raises(NumericFailure) as err:
        full_gradient(p, np.zeros(3), np.zeros(2))
    assert err.value.sample == BrokenProblem.bad_index


def test_cache_is_bit_for_bit(small_quadratic, rng):
    p = small_quadratic
    x = rng.standard_normal(2)
    y = rng.standard_normal(2)
    cache = per_sample_gradient_cache(p, x, y)
    for i in range(p.n):
        assert np.array_equal(cache.gx[i], p.grad_x_i(i, x, y))
        assert np.array_equal(cache.gy[i], p.grad_y_i(i, x, y))
    h0, d0 = cache.mean_pair()
    assert np.abs(h0 - full_gradient(p, x, y).gx).max() <= 1e-12 * p.n
    assert np.abs(d0 - full_gradient(p, x, y).gy).max() <= 1e-12 * p.n


def test_cache_allocation_failure_is_resource_exhausted(small_quadratic, monkeypatch):
    def failing_empty(*args, **kwargs):
        raise MemoryError("simulated allocation failure")

    monkeypatch.setattr("vrgda.oracle.np.empty", failing_empty)
    with pytest.raises(ResourceExhausted):
        per_sample_gradient_cache(small_quadratic, np.zeros(2), np.zeros(2))


def test_counting_problem_accounts_every_evaluation(small_quadratic):
    counting = CountingProblem(small_quadratic)
    x, y = np.zeros(2), np.zeros(2)
    counting.grad_x_i(0, x, y)
    counting.grad_y_i(1, x, y)
    assert counting.counter.calls_x == 1 and counting.counter.calls_y == 1
    full_gradient(counting, x, y)
    assert counting.counter.calls_x == 1 + small_quadratic.n
    assert counting.counter.calls_y == 1 + small_quadratic.n
    assert counting.counter.total == 2 + 2 * small_quadratic.n
    per_sample_gradient_cache(counting, x, y)
    assert counting.counter.calls_x == 1 + 2 * small_quadratic.n
