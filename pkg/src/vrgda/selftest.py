"""Fast invariant suites behind the CLI's selftest subcommand.

Each suite re-checks a module's load-bearing invariants in a few seconds;
exit code 0 means every suite passed.  The pytest suite covers the same
ground (and much more); this is the quick field check.
"""

from __future__ import annotations

import numpy as np

from . import optim
from .metrics import (
    deviation_bound_check,
    estimate_phi,
    potential_exact,
    simplex_project,
)
from .oracle import CountingProblem, full_gradient, per_sample_gradient_cache
from .optim import (
    ALGO_VR,
    EpochState,
    OptimizerConfig,
    gda_step,
    theorem1_step_sizes,
    vr_shuffle_epoch,
)
from .problems import make_dro_logistic, make_poisoning_instance, make_quadratic
from .data import dump_libsvm, make_synthetic_classification, parse_libsvm
from .shuffle import IG, RR, SO, ShufflingScheme, is_permutation, permutation_for_epoch


def _check_shuffle():
    ig = permutation_for_epoch(ShufflingScheme(IG), 3, 6)
    assert np.array_equal(ig, np.arange(6)), "IG must be the identity ordering"
    so0 = permutation_for_epoch(ShufflingScheme(SO, seed=9), 0, 40)
    so7 = permutation_for_epoch(ShufflingScheme(SO, seed=9), 7, 40)
    assert np.array_equal(so0, so7), "SO must reuse its epoch-0 permutation"
    for epoch in (0, 5, 123):
        rr = permutation_for_epoch(ShufflingScheme(RR, seed=4), epoch, 97)
        assert is_permutation(rr, 97), "RR output must be a permutation"
    again = permutation_for_epoch(ShufflingScheme(RR, seed=4), 5, 97)
    assert np.array_equal(again, permutation_for_epoch(ShufflingScheme(RR, seed=4), 5, 97))


def _check_oracle():
    p = make_quadratic(4, 4, 12, 8.0, seed=1)
    rng = np.random.default_rng(0)
    x, y = rng.standard_normal(4), rng.standard_normal(4)
    pair = full_gradient(p, x, y)
    assert pair.oracle_calls == p.n
    mean_gx = np.mean([p.grad_x_i(i, x, y) for i in range(p.n)], axis=0)
    assert np.abs(mean_gx - pair.gx).max() <= 1e-12 * p.n, "averaging property"
    cache = per_sample_gradient_cache(p, x, y)
    assert np.array_equal(cache.gx[0], p.grad_x_i(0, x, y)), "cache must be bit-for-bit"
    counting = CountingProblem(p)
    full_gradient(counting, x, y)
    assert counting.counter.calls_x == p.n and counting.counter.calls_y == p.n


def _check_optim():
    eta1, eta2, lam = theorem1_step_sizes(8.0, 8.0)
    assert (eta1, eta2, lam) == (1.0 / 896.0, 1.0 / 64.0, 4.0)
    p = make_quadratic(3, 3, 7, 6.0, seed=2)
    x0, y0 = p.default_init(3)
    pair = full_gradient(p, x0, y0)
    seen = []
    cfg = OptimizerConfig(ALGO_VR, 1e-30, 1e-30, epochs=0, scheme=ShufflingScheme(IG), seed=0)
    # zero-ish step: corrections must cancel exactly at the anchor
    state = EpochState(0, x0, y0, x0.copy(), y0.copy(), pair.gx, pair.gy)
    vr_shuffle_epoch(p, state, np.arange(p.n), cfg, inner_hook=lambda j, i, h, d, x, y: seen.append((h, d)))
    assert all(np.array_equal(h, pair.gx) for h, _ in seen[:1]), "anchor cancellation"
    t1_eta1, t1_eta2, _ = theorem1_step_sizes(p.smoothness_l, p.strong_concavity_mu)
    cost_check = OptimizerConfig(ALGO_VR, t1_eta1, t1_eta2, epochs=1, scheme=ShufflingScheme(RR, seed=1), seed=1, cache_anchors=True)
    recs = optim.run(p, cost_check, x0, y0)
    assert recs[-1].oracle_calls == 2 * 4 * p.n, "cached epoch must cost 4n calls"


def _check_metrics():
    rng = np.random.default_rng(5)
    for _ in range(20):
        v = rng.standard_normal(6) * 3
        y = simplex_project(v)
        assert abs(y.sum() - 1) < 1e-12 and (y >= 0).all()
        assert np.abs(simplex_project(y) - y).max() < 1e-12, "idempotence"
    p = make_quadratic(4, 4, 10, 9.0, seed=3)
    x, y = p.default_init(1)
    assert potential_exact(p, x, y) >= 0.0
    est = estimate_phi(p, x)
    assert abs(est.phi - p.phi(x)) < 1e-8


def _check_problems():
    p = make_quadratic(5, 5, 20, 10.0, seed=4)
    assert np.linalg.eigvalsh(p.Q_bar)[0] < 0 and np.linalg.eigvalsh(p.H)[0] >= 0.1 - 1e-9
    assert abs(p.kappa - 10.0) <= 0.5
    ds = make_synthetic_classification(40, 12, seed=5)
    dro = make_dro_logistic(ds)
    assert dro.strong_concavity_mu == 1.0, "default lambda1 = 1/n^2 gives mu = 1"
    pi = make_poisoning_instance(seed=6, n=80, d=6)
    theta = np.random.default_rng(7).standard_normal(6)
    pert = pi.apply_project_y(np.random.default_rng(8).standard_normal(6))
    clean = np.flatnonzero(~pi.poison_mask)[:5]
    assert all(np.all(pi.grad_y_i(int(i), theta, pert) == 0.0) for i in clean)


def _check_data():
    ds = parse_libsvm(b"+1 3:1 11:1\n-1 1:0.5\n", expected_dim=12)
    assert ds.n == 2 and ds.d == 12 and ds.features[0, 2] == 1.0 and ds.labels[1] == -1.0
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "roundtrip.libsvm"
        dump_libsvm(ds, path)
        again = parse_libsvm(path, expected_dim=12)
        assert np.array_equal(again.features, ds.features) and np.array_equal(again.labels, ds.labels)


def _check_harness():
    import tempfile
    from pathlib import Path

    from .harness import AlgoSpec, ExperimentConfig, config_from_text, config_to_text, read_csv, run_experiment, write_csv
    from .problems import make_quadratic

    p = make_quadratic(3, 3, 6, 6.0, seed=7)
    recs = run_experiment(p, AlgoSpec(name="vr-rr", epochs=2, theorem1_steps=True), seed=1)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "run.csv"
        write_csv(recs, path)
        header, rows = read_csv(path)
        assert len(rows) == len(recs) and rows[-1]["epoch"] == recs[-1].epoch
    cfg = ExperimentConfig(problem="quadratic", seeds=[1, 2], algos=[AlgoSpec(name="gda", eta1=0.05, eta2=0.5)])
    assert config_from_text(config_to_text(cfg)) == cfg


def _check_plotting():
    from .plotting import PlotStyle, Series, render_svg

    series = [Series(label="flat", x=[0, 1, 2], y=[1.0, 1.0, 1.0])]
    a = render_svg(series, PlotStyle(logy=True))
    b = render_svg(series, PlotStyle(logy=True))
    assert a == b, "SVG rendering must be deterministic"


SUITES = (
    ("shuffle", _check_shuffle),
    ("oracle", _check_oracle),
    ("optim", _check_optim),
    ("metrics", _check_metrics),
    ("problems", _check_problems),
    ("data", _check_data),
    ("harness", _check_harness),
    ("plotting", _check_plotting),
)


def run_selftest(echo=print) -> bool:
    ok = True
    for name, suite in SUITES:
        try:
            suite()
        except Exception as exc:  # noqa: BLE001 - report any failure, keep going
            ok = False
            echo(f"FAIL {name}: {exc}")
        else:
            echo(f"PASS {name}")
    return ok
