"""Experiment orchestration: named runs, metric hooks, grids, comparisons,
CSV persistence, and text config files.

Runs are fully reproducible: a config plus a seed yields byte-identical CSVs
up to the wall_ms column (recorded for reference, excluded from any
determinism claim because it is hardware-dependent).
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import InvalidArgument, NumericFailure
from .metrics import (
    DEFAULT_PHI_TOL,
    deviation_bound_check,
    estimate_phi,
    game_stationarity,
)
from .optim import (
    ALGO_GDA,
    ALGO_SGDA,
    ALGO_VR,
    MetricContext,
    OptimizerConfig,
    TrajectoryRecord,
    run,
)
from .problems import make_problem, prediction_accuracy
from .shuffle import IG, RR, SO, ShufflingScheme

ALGO_NAMES = ("vr-ig", "vr-so", "vr-rr", "sgda", "gda")

# Canonical CSV column order; per-problem optional columns are dropped when absent.
COLUMN_ORDER = (
    "epoch",
    "oracle_calls",
    "phi",
    "grad_phi_norm",
    "grad_f_norm",
    "proj_grad_residual",
    "potential_shifted",
    "potential_exact",
    "B_t",
    "lemma3_slack",
    "wall_ms",
    "accuracy",
    "seed",
    "algorithm",
)
_INT_COLUMNS = {"epoch", "oracle_calls", "seed"}
_STR_COLUMNS = {"algorithm"}


def parse_algo_name(name: str) -> tuple[str, str | None]:
    """Map a CLI-facing algorithm name to (algorithm, shuffling variant)."""
    if name == "sgda":
        return ALGO_SGDA, None
    if name == "gda":
        return ALGO_GDA, None
    if name.startswith("vr-"):
        variant = {"vr-ig": IG, "vr-so": SO, "vr-rr": RR}.get(name)
        if variant is not None:
            return ALGO_VR, variant
    raise InvalidArgument(f"unknown algorithm name {name!r}, expected one of {ALGO_NAMES}")


@dataclass
class AlgoSpec:
    """One algorithm's hyperparameters for an experiment.

    epochs counts executed epochs (full passes); theorem1_steps, when set,
    replaces eta1/eta2 with the theorem's constructed step sizes at run time.
    """

    name: str
    eta1: float = 0.01
    eta2: float = 0.01
    epochs: int = 50
    batch_size: int = 32
    cache_anchors: bool = False
    gauss_seidel: bool = False
    enforce_theory: bool = False
    theorem1_steps: bool = False
    ig_order: tuple[int, ...] | None = None

    def __post_init__(self):
        parse_algo_name(self.name)
        if self.epochs < 1:
            raise InvalidArgument("epochs must be >= 1")


def build_config(problem, spec: AlgoSpec, seed: int, metric_cadence: int = 1) -> OptimizerConfig:
    from .optim import theorem1_step_sizes  # local import keeps module load light

    algorithm, variant = parse_algo_name(spec.name)
    eta1, eta2 = spec.eta1, spec.eta2
    if spec.theorem1_steps:
        eta1, eta2, _ = theorem1_step_sizes(problem.smoothness_l, problem.strong_concavity_mu)
    scheme = None
    if algorithm == ALGO_VR:
        scheme = ShufflingScheme(variant, seed=seed, ig_order=spec.ig_order if variant == IG else None)
    return OptimizerConfig(
        algorithm=algorithm,
        eta1=eta1,
        eta2=eta2,
        epochs=spec.epochs - 1,
        scheme=scheme,
        batch_size=min(spec.batch_size, problem.n),
        seed=seed,
        cache_anchors=spec.cache_anchors,
        enforce_theory=spec.enforce_theory,
        gauss_seidel=spec.gauss_seidel,
        metric_cadence=metric_cadence,
        label=spec.name,
    )


# ---------------------------------------------------------------------------
# Standard metric hooks
# ---------------------------------------------------------------------------


def standard_metric_hooks(problem, lam: float = 4.0, phi_tol: float = DEFAULT_PHI_TOL):
    """The default per-epoch diagnostics for a problem.

    Problems with a declared strong-concavity constant get Phi-based columns
    (phi, grad_phi_norm, potential_shifted, potential_exact when Phi* is
    closed form); every problem gets grad_f_norm and the deviation-bound
    slack; constrained problems also report the projected-gradient residual;
    the poisoning game adds test accuracy.
    """
    hooks = []
    has_phi = problem.strong_concavity_mu is not None
    phi_star = getattr(problem, "phi_star", None)

    if has_phi:

        def phi_hook(ctx: MetricContext) -> dict:
            est = estimate_phi(ctx.problem, ctx.x, tol=phi_tol)
            f_xy = float(ctx.problem.value(ctx.x, ctx.y))
            out = {
                "phi": est.phi,
                "grad_phi_norm": float(np.linalg.norm(est.grad_phi)),
                "potential_shifted": (lam + 1.0) * est.phi - f_xy,
            }
            if phi_star is not None:
                out["potential_exact"] = lam * (est.phi - phi_star) + est.phi - f_xy
            if not all(math.isfinite(v) for v in out.values()):
                raise NumericFailure("phi metrics went non-finite")
            return out

        hooks.append(phi_hook)

    def grad_hook(ctx: MetricContext) -> dict:
        gs = game_stationarity(ctx.problem, ctx.x, ctx.y)
        if not math.isfinite(gs.grad_norm):
            raise NumericFailure("grad_f_norm went non-finite")
        out = {"grad_f_norm": gs.grad_norm}
        if ctx.problem.is_constrained:
            out["proj_grad_residual"] = gs.projected_residual
        return out

    hooks.append(grad_hook)

    def lemma3_hook(ctx: MetricContext) -> dict:
        # the deviation bound assumes unconstrained updates; constrained
        # problems report not-applicable
        if ctx.state is None or not has_phi or ctx.problem.is_constrained:
            return {"lemma3_slack": math.nan}
        check = deviation_bound_check(ctx.problem, ctx.state, ctx.eta1, ctx.eta2)
        return {"lemma3_slack": check.slack if check.applicable else math.nan}

    hooks.append(lemma3_hook)

    test_set = None
    if hasattr(problem, "dataset") and getattr(problem.dataset, "test_idx", None) is not None:
        test_set = problem.dataset.test
    if test_set is not None and hasattr(problem, "poison_mask"):

        def accuracy_hook(ctx: MetricContext) -> dict:
            return {"accuracy": prediction_accuracy(ctx.x, test_set)}

        hooks.append(accuracy_hook)

    return hooks


def run_experiment(problem, spec: AlgoSpec, seed: int, x0=None, y0=None, metric_cadence: int = 1,
                   hooks=None) -> list[TrajectoryRecord]:
    """One (problem, algorithm, seed) run with the standard metric hooks."""
    cfg = build_config(problem, spec, seed, metric_cadence)
    if x0 is None or y0 is None:
        x0, y0 = problem.default_init(seed)
    if hooks is None:
        hooks = standard_metric_hooks(problem)
    return run(problem, cfg, x0, y0, metric_hooks=hooks)


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------


def _format_value(column: str, value) -> str:
    if column in _STR_COLUMNS:
        return str(value)
    if column in _INT_COLUMNS:
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def record_columns(records: list[TrajectoryRecord]) -> list[str]:
    keys = set()
    for rec in records:
        keys.update(rec.metrics.keys())
    columns = [c for c in COLUMN_ORDER if c in keys or c in ("epoch", "oracle_calls", "B_t", "wall_ms", "seed", "algorithm")]
    extras = sorted(keys - set(COLUMN_ORDER))
    if extras:
        columns = columns[:-2] + extras + columns[-2:]  # keep seed/algorithm last
    return columns


def _record_cell(rec: TrajectoryRecord, column: str):
    if column == "epoch":
        return rec.epoch
    if column == "oracle_calls":
        return rec.oracle_calls
    if column == "wall_ms":
        return rec.wall_ms
    if column == "B_t":
        return rec.b_t
    if column == "seed":
        return rec.seed
    if column == "algorithm":
        return rec.algorithm
    return rec.metrics.get(column, math.nan)


def write_csv(records: list[TrajectoryRecord], path) -> None:
    """RFC-4180-style CSV: header row, '.' decimal separator, 17-significant-
    digit floats (round-trip exact).  Byte-identical across identical runs,
    wall_ms column aside."""
    if not records:
        raise InvalidArgument("no records to write")
    columns = record_columns(records)
    key_sets = {frozenset(r.metrics.keys()) for r in records}
    if len(key_sets) > 1:
        raise InvalidArgument("records carry heterogeneous metric columns")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_format_value(c, _record_cell(rec, c)) for c in columns])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path) -> tuple[list[str], list[dict]]:
    """Read a trajectory CSV back into python values (floats where numeric)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for raw in reader:
            row = {}
            for col, cell in zip(header, raw):
                if col in _STR_COLUMNS:
                    row[col] = cell
                elif col in _INT_COLUMNS:
                    row[col] = int(cell)
                else:
                    row[col] = float(cell)
            rows.append(row)
    return header, rows


def write_summary_csv(rows: list[dict], path) -> None:
    if not rows:
        raise InvalidArgument("no summary rows to write")
    columns = list(rows[0].keys())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            [row[c] if isinstance(row[c], (str, int)) else repr(float(row[c])) for c in columns]
        )
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def run_filename(problem_name: str, algo: str, eta1: float, eta2: float, seed: int) -> str:
    return f"{problem_name}_{algo}_e1-{eta1:g}_e2-{eta2:g}_seed{seed}.csv"


# ---------------------------------------------------------------------------
# Grid search and matched-budget comparison
# ---------------------------------------------------------------------------

DEFAULT_GRID = (0.1, 0.01, 0.001)


def final_metric(records: list[TrajectoryRecord], preference=("phi", "grad_f_norm")) -> tuple[str, float]:
    last = records[-1]
    for name in preference:
        if name in last.metrics and math.isfinite(last.metrics[name]):
            return name, float(last.metrics[name])
    return "grad_f_norm", math.inf


def grid_run(
    problem,
    problem_name: str,
    algo_names: list[str],
    seeds: list[int],
    epochs: int,
    outdir,
    lrs=DEFAULT_GRID,
    base_spec: AlgoSpec | None = None,
    metric_cadence: int = 1,
) -> list[dict]:
    """Cartesian product over (eta1, eta2) x algorithms x seeds.

    Writes one CSV per cell plus a summary CSV; a diverged cell is recorded
    with an infinite final metric instead of aborting the whole grid.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = []
    for algo in algo_names:
        for eta1 in lrs:
            for eta2 in lrs:
                for seed in seeds:
                    spec = replace(
                        base_spec if base_spec is not None else AlgoSpec(name=algo),
                        name=algo,
                        eta1=eta1,
                        eta2=eta2,
                        epochs=epochs,
                    )
                    row = {"algorithm": algo, "eta1": eta1, "eta2": eta2, "seed": seed,
                           "metric": "", "final": math.inf, "oracle_calls": -1, "csv": "", "error": ""}
                    try:
                        records = run_experiment(problem, spec, seed, metric_cadence=metric_cadence)
                    except NumericFailure as exc:
                        row.update(metric="diverged", error=str(exc))
                        summary.append(row)
                        continue
                    name, value = final_metric(records)
                    fname = run_filename(problem_name, algo, eta1, eta2, seed)
                    write_csv(records, outdir / fname)
                    row.update(metric=name, final=value, oracle_calls=records[-1].oracle_calls, csv=fname)
                    summary.append(row)
    write_summary_csv(summary, outdir / "summary.csv")
    return summary


def per_epoch_cost(problem, spec: AlgoSpec) -> int:
    """Per-sample evaluations (both blocks) one epoch of this algorithm consumes."""
    n = problem.n
    algorithm, _ = parse_algo_name(spec.name)
    if algorithm == ALGO_VR:
        return 4 * n if spec.cache_anchors else 6 * n
    if algorithm == ALGO_SGDA:
        b = min(spec.batch_size, n)
        return 2 * b * math.ceil(n / b)
    return 2 * n  # one full-gradient GDA step


def compare_run(
    problem,
    problem_name: str,
    specs: list[AlgoSpec],
    seeds: list[int],
    budget_calls: int,
    outdir,
) -> list[dict]:
    """Run several algorithms to a matched per-sample-call budget.

    Every algorithm executes floor(budget / per_epoch_cost) epochs; the
    summary aligns rows on a shared checkpoint grid (multiples of the largest
    per-epoch cost), reporting each algorithm's last record at or below each
    checkpoint.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    costs = {spec.name: per_epoch_cost(problem, spec) for spec in specs}
    stride = max(costs.values())
    checkpoints = list(range(stride, budget_calls + 1, stride))
    if not checkpoints:
        raise InvalidArgument(f"budget {budget_calls} is below one epoch of every algorithm")
    summary = []
    for spec in specs:
        epochs = max(1, budget_calls // costs[spec.name])
        spec = replace(spec, epochs=epochs)
        for seed in seeds:
            records = run_experiment(problem, spec, seed)
            write_csv(records, outdir / run_filename(problem_name, spec.name, spec.eta1, spec.eta2, seed))
            for ckpt in checkpoints:
                eligible = [r for r in records if r.oracle_calls <= ckpt]
                at = eligible[-1]
                name, value = final_metric([at])
                summary.append(
                    {
                        "algorithm": spec.name,
                        "seed": seed,
                        "checkpoint_calls": ckpt,
                        "oracle_calls": at.oracle_calls,
                        "epoch": at.epoch,
                        "metric": name,
                        "value": value,
                    }
                )
    write_summary_csv(summary, outdir / "compare_summary.csv")
    return summary


# ---------------------------------------------------------------------------
# Experiment config files (flat, sectioned key = value; TOML-compatible)
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """A whole experiment: problem, algorithms, seeds, output location."""

    problem: str
    seeds: list[int] = field(default_factory=lambda: [0])
    outdir: str = "runs"
    metric_cadence: int = 1
    plots: bool = True
    problem_params: dict = field(default_factory=dict)
    algos: list[AlgoSpec] = field(default_factory=list)

    def __post_init__(self):
        if not self.seeds:
            raise InvalidArgument("at least one seed is required")
        if self.metric_cadence < 1:
            raise InvalidArgument("metric_cadence must be >= 1")

    def build_problem(self, seed: int | None = None):
        return make_problem(self.problem, seed if seed is not None else self.seeds[0], **dict(self.problem_params))


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        r = repr(v)
        return r if any(c in r for c in ".einf") else r + ".0"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise InvalidArgument(f"cannot serialize {type(v)!r} to config text")


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = ["[experiment]"]
    lines.append(f"problem = {_toml_value(cfg.problem)}")
    lines.append(f"seeds = {_toml_value(list(cfg.seeds))}")
    lines.append(f"outdir = {_toml_value(cfg.outdir)}")
    lines.append(f"metric_cadence = {cfg.metric_cadence}")
    lines.append(f"plots = {_toml_value(cfg.plots)}")
    if cfg.problem_params:
        lines.append("")
        lines.append("[problem]")
        for k, v in sorted(cfg.problem_params.items()):
            lines.append(f"{k} = {_toml_value(v)}")
    for spec in cfg.algos:
        lines.append("")
        lines.append(f'[algo."{spec.name}"]')
        lines.append(f"eta1 = {_toml_value(spec.eta1)}")
        lines.append(f"eta2 = {_toml_value(spec.eta2)}")
        lines.append(f"epochs = {spec.epochs}")
        lines.append(f"batch_size = {spec.batch_size}")
        lines.append(f"cache_anchors = {_toml_value(spec.cache_anchors)}")
        lines.append(f"gauss_seidel = {_toml_value(spec.gauss_seidel)}")
        lines.append(f"enforce_theory = {_toml_value(spec.enforce_theory)}")
        lines.append(f"theorem1_steps = {_toml_value(spec.theorem1_steps)}")
        if spec.ig_order is not None:
            lines.append(f"ig_order = {_toml_value(list(spec.ig_order))}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> ExperimentConfig:
    data = tomllib.loads(text)
    exp = data.get("experiment", {})
    algos = []
    for name, body in data.get("algo", {}).items():
        ig_order = body.get("ig_order")
        algos.append(
            AlgoSpec(
                name=name,
                eta1=float(body.get("eta1", 0.01)),
                eta2=float(body.get("eta2", 0.01)),
                epochs=int(body.get("epochs", 50)),
                batch_size=int(body.get("batch_size", 32)),
                cache_anchors=bool(body.get("cache_anchors", False)),
                gauss_seidel=bool(body.get("gauss_seidel", False)),
                enforce_theory=bool(body.get("enforce_theory", False)),
                theorem1_steps=bool(body.get("theorem1_steps", False)),
                ig_order=tuple(ig_order) if ig_order is not None else None,
            )
        )
    return ExperimentConfig(
        problem=exp.get("problem", "quadratic"),
        seeds=[int(s) for s in exp.get("seeds", [0])],
        outdir=exp.get("outdir", "runs"),
        metric_cadence=int(exp.get("metric_cadence", 1)),
        plots=bool(exp.get("plots", True)),
        problem_params=dict(data.get("problem", {})),
        algos=algos,
    )


def load_config(path) -> ExperimentConfig:
    return config_from_text(Path(path).read_text(encoding="utf-8"))


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(config_to_text(cfg), encoding="utf-8")
