import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def small_quadratic():
    from vrgda.problems import make_quadratic

    return make_quadratic(dim_x=2, dim_y=2, n=3, target_kappa=10.0, seed=7)


@pytest.fixture(scope="session")
def bench_quadratic():
    from vrgda.problems import make_quadratic

    return make_quadratic(dim_x=10, dim_y=10, n=50, target_kappa=10.0, seed=7)


@pytest.fixture(scope="session")
def tiny_dro():
    from vrgda.data import make_synthetic_classification
    from vrgda.problems import make_dro_logistic

    return make_dro_logistic(make_synthetic_classification(40, 12, seed=3))


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
