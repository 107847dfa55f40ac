"""Command-line front end.

Subcommands: run (one problem x algorithm x seed), grid (learning-rate grid),
compare (algorithms at a matched oracle budget), report (figures + table from
run CSVs), fetch-data (checksum-verified dataset download; the only
network-touching code path), selftest (module invariant suites).

Exit codes: 0 success, 1 runtime numeric failure (diagnostic written),
2 usage / bad configuration.
"""

from __future__ import annotations

import hashlib
import json
import sys
import urllib.request
from pathlib import Path

import click

from .data import parse_libsvm, subsample as subsample_rows
from .errors import InvalidArgument, NumericFailure, ParseError
from .shuffle import load_order_file
from .harness import (
    ALGO_NAMES,
    AlgoSpec,
    DEFAULT_GRID,
    compare_run,
    grid_run,
    load_config,
    read_csv,
    run_experiment,
    run_filename,
    write_csv,
)
from .problems import PROBLEM_NAMES, make_problem

A9A_URL = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/a9a"
A9A_EXPECTED = (32561, 123)


def parse_seeds(text: str) -> list[int]:
    """'1..5' or '0,3,9' or '7'."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgument(f"cannot parse seed list {text!r}: use 'a..b' or comma-separated integers") from None


def parse_budget(text: str, n: int) -> int:
    """'40n' (multiples of the sample count) or a plain integer."""
    text = text.strip().lower()
    try:
        if text.endswith("n"):
            return int(float(text[:-1]) * n)
        return int(text)
    except ValueError:
        raise InvalidArgument(f"cannot parse budget {text!r}: use an integer or '<k>n'") from None


def build_problem(name: str, seed: int, data: str | None, sub: int | None, kwargs: dict):
    params = dict(kwargs)
    if name == "dro-logistic" and data is not None:
        dataset = parse_libsvm(data)
        if sub:
            dataset = subsample_rows(dataset, sub, seed)
        params["dataset"] = dataset
    elif name == "dro-logistic" and sub:
        params["n"] = sub
    return make_problem(name, seed, **params)


def _problem_params(kappa, nsamples, dim):
    params = {}
    if kappa is not None:
        params["target_kappa"] = kappa
    if nsamples is not None:
        params["n"] = nsamples
    if dim is not None:
        params["dim_x"] = dim
        params["dim_y"] = dim
    return params


def _write_diagnostic(exc: NumericFailure, outdir: Path, stem: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    payload = {
        "error": str(exc),
        "epoch": exc.epoch,
        "inner_index": exc.inner_index,
        "sample": exc.sample,
    }
    records = getattr(exc, "records", None)
    partial = None
    if records:
        partial = outdir / f"{stem}_partial.csv"
        write_csv(records, partial)
        payload["partial_csv"] = str(partial)
    diag = outdir / f"{stem}_diagnostic.json"
    diag.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return diag


@click.group()
def main():
    """Shuffling gradient descent-ascent with variance reduction: experiments."""


_problem_opt = click.option("--problem", type=click.Choice(PROBLEM_NAMES), default="quadratic", show_default=True)
_data_opt = click.option("--data", type=click.Path(exists=True, dir_okay=False), default=None,
                         help="libsvm file for dro-logistic (synthetic fallback otherwise).")
_sub_opt = click.option("--subsample", type=int, default=None, help="Row subsample size for dro-logistic.")
_kappa_opt = click.option("--kappa", type=float, default=None, help="quadratic: target condition number.")
_n_opt = click.option("--n-samples", type=int, default=None, help="problem size override.")
_dim_opt = click.option("--dim", type=int, default=None, help="quadratic: primal/dual dimension.")


@main.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Experiment config file; CLI flags override its keys.")
@_problem_opt
@click.option("--algo", type=click.Choice(ALGO_NAMES), default="vr-rr", show_default=True)
@click.option("--eta1", type=float, default=0.01, show_default=True)
@click.option("--eta2", type=float, default=0.01, show_default=True)
@click.option("--theorem1-steps", is_flag=True, help="Use the theorem's constructed step sizes.")
@click.option("--epochs", type=int, default=200, show_default=True, help="Executed epochs (CSV gets epochs+1 rows).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True, help="sgda minibatch size.")
@click.option("--cache-anchors", is_flag=True, help="Memoize anchor gradients (O(n d) memory, 2n calls/block/epoch).")
@click.option("--gauss-seidel", is_flag=True, help="Evaluate the dual gradient at the updated primal iterate.")
@click.option("--enforce-theory", is_flag=True, help="Reject step sizes violating the theorem conditions.")
@click.option("--cadence", type=int, default=1, show_default=True, help="Record metrics every k epochs.")
@click.option("--ig-order-file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="vr-ig: visit order file, one index per line (adversarial-order experiments).")
@click.option("--plots/--no-plots", "plots", default=False, show_default=True,
              help="Render report figures next to the CSVs after the runs.")
@click.option("--out", "outdir", type=click.Path(file_okay=False), default="runs", show_default=True)
@_data_opt
@_sub_opt
@_kappa_opt
@_n_opt
@_dim_opt
def run_cmd(config_path, problem, algo, eta1, eta2, theorem1_steps, epochs, seed, batch_size,
            cache_anchors, gauss_seidel, enforce_theory, cadence, ig_order_file, plots, outdir, data, subsample,
            kappa, n_samples, dim):
    """Execute one problem x algorithm x seed run and write its CSV."""
    specs = None
    seeds = [seed]
    if config_path:
        # config supplies defaults; flags given on the command line win
        ctx = click.get_current_context()

        def overridden(name):
            return ctx.get_parameter_source(name) == click.core.ParameterSource.COMMANDLINE

        cfg = load_config(config_path)
        if not overridden("problem"):
            problem = cfg.problem
        if not overridden("seed"):
            seeds = cfg.seeds
        if not overridden("outdir"):
            outdir = cfg.outdir
        if not overridden("cadence"):
            cadence = cfg.metric_cadence
        if not overridden("algo"):
            specs = cfg.algos or None
        if not overridden("plots"):
            plots = cfg.plots
        params = dict(cfg.problem_params)
    else:
        params = {}
    params.update(_problem_params(kappa, n_samples, dim))
    if specs is None:
        try:
            ig_order = load_order_file(ig_order_file) if ig_order_file else None
        except ParseError as exc:
            raise click.UsageError(str(exc)) from exc
        specs = [
            AlgoSpec(
                name=algo,
                eta1=eta1,
                eta2=eta2,
                epochs=epochs,
                batch_size=batch_size,
                cache_anchors=cache_anchors,
                gauss_seidel=gauss_seidel,
                enforce_theory=enforce_theory,
                theorem1_steps=theorem1_steps,
                ig_order=ig_order,
            )
        ]
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        for s in seeds:
            prob = build_problem(problem, s, data, subsample, params)
            for spec in specs:
                records = run_experiment(prob, spec, s, metric_cadence=cadence)
                name = run_filename(problem, spec.name, spec.eta1, spec.eta2, s)
                if spec.theorem1_steps:
                    name = name.replace(".csv", "_t1.csv")
                path = outdir / name
                write_csv(records, path)
                written.append(path)
                click.echo(f"wrote {path} ({len(records)} rows, {records[-1].oracle_calls} oracle calls)")
        if plots and written:
            from .plotting import report_figures

            for fig in report_figures([read_csv(p) for p in written], outdir):
                click.echo(f"wrote {fig}")
    except NumericFailure as exc:
        diag = _write_diagnostic(exc, outdir, f"{problem}_{algo}_seed{seed}")
        click.echo(f"numeric failure: {exc}\ndiagnostic: {diag}", err=True)
        sys.exit(1)
    except (InvalidArgument, ParseError) as exc:
        raise click.UsageError(str(exc)) from exc


@main.command("grid")
@_problem_opt
@click.option("--algos", default="vr-rr,sgda", show_default=True, help="Comma-separated algorithm names.")
@click.option("--lrs", default=",".join(str(v) for v in DEFAULT_GRID), show_default=True,
              help="Learning-rate set; the grid is its Cartesian square (eta1 x eta2).")
@click.option("--seeds", default="0..4", show_default=True, help="'a..b' range or comma list.")
@click.option("--epochs", type=int, default=200, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--cache-anchors", is_flag=True)
@click.option("--cadence", type=int, default=1, show_default=True)
@click.option("--out", "outdir", type=click.Path(file_okay=False), default="grid", show_default=True)
@_data_opt
@_sub_opt
@_kappa_opt
@_n_opt
@_dim_opt
def grid_cmd(problem, algos, lrs, seeds, epochs, batch_size, cache_anchors, cadence, outdir,
             data, subsample, kappa, n_samples, dim):
    """Learning-rate grid: one CSV per (algo, eta1, eta2, seed) plus a summary."""
    try:
        seed_list = parse_seeds(seeds)
        lr_list = [float(v) for v in lrs.split(",") if v.strip()]
        algo_list = [a.strip() for a in algos.split(",") if a.strip()]
        prob = build_problem(problem, seed_list[0], data, subsample, _problem_params(kappa, n_samples, dim))
        base = AlgoSpec(name=algo_list[0], epochs=epochs, batch_size=batch_size, cache_anchors=cache_anchors)
        summary = grid_run(
            prob, problem, algo_list, seed_list, epochs, outdir,
            lrs=lr_list, base_spec=base, metric_cadence=cadence,
        )
    except (InvalidArgument, ParseError) as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(f"wrote {len(summary)} grid cells under {outdir} (summary.csv included)")


@main.command("compare")
@_problem_opt
@click.option("--algos", default="vr-rr,sgda,gda", show_default=True)
@click.option("--budget", default="40n", show_default=True,
              help="Per-sample gradient-call budget; '40n' scales with the sample count.")
@click.option("--eta1", type=float, default=0.01, show_default=True)
@click.option("--eta2", type=float, default=0.01, show_default=True)
@click.option("--seeds", default="0..4", show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--cache-anchors", is_flag=True)
@click.option("--out", "outdir", type=click.Path(file_okay=False), default="compare", show_default=True)
@_data_opt
@_sub_opt
@_kappa_opt
@_n_opt
@_dim_opt
def compare_cmd(problem, algos, budget, eta1, eta2, seeds, batch_size, cache_anchors, outdir,
                data, subsample, kappa, n_samples, dim):
    """Run algorithms to a matched oracle budget and summarize on a shared grid."""
    try:
        seed_list = parse_seeds(seeds)
        prob = build_problem(problem, seed_list[0], data, subsample, _problem_params(kappa, n_samples, dim))
        budget_calls = parse_budget(budget, prob.n)
        specs = [
            AlgoSpec(name=a.strip(), eta1=eta1, eta2=eta2, batch_size=batch_size, cache_anchors=cache_anchors)
            for a in algos.split(",")
            if a.strip()
        ]
        summary = compare_run(prob, problem, specs, seed_list, budget_calls, outdir)
    except NumericFailure as exc:
        diag = _write_diagnostic(exc, Path(outdir), f"{problem}_compare")
        click.echo(f"numeric failure: {exc}\ndiagnostic: {diag}", err=True)
        sys.exit(1)
    except (InvalidArgument, ParseError) as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(f"wrote {len(summary)} aligned summary rows under {outdir}")


@main.command("report")
@click.option("--runs", "runs_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "outdir", type=click.Path(file_okay=False), default=None,
              help="Defaults to the runs directory.")
@click.option("--logy", multiple=True, default=("grad_phi_norm", "grad_f_norm"), show_default=True)
def report_cmd(runs_dir, outdir, logy):
    """Render SVG figures and a text table from run CSVs."""
    from .plotting import report_figures

    runs_dir = Path(runs_dir)
    outdir = Path(outdir) if outdir else runs_dir
    csvs = sorted(p for p in runs_dir.glob("*.csv") if "summary" not in p.name and "partial" not in p.name)
    if not csvs:
        raise click.UsageError(f"no run CSVs found under {runs_dir}")
    tables = [read_csv(p) for p in csvs]
    written = report_figures(tables, outdir, logy_metrics=tuple(logy))
    for path in written:
        click.echo(f"wrote {path}")
    click.echo(f"wrote {outdir / 'report.txt'}")


@main.command("fetch-data")
@click.option("--dest", type=click.Path(dir_okay=False), default="data/a9a", show_default=True)
@click.option("--url", default=A9A_URL, show_default=True)
@click.option("--sha256", "expected_sha", default=None,
              help="Expected checksum; the download is rejected on mismatch.")
@click.option("--verify-shape/--no-verify-shape", default=True, show_default=True,
              help="Parse the file and check (n, d) against the a9a values.")
def fetch_data_cmd(dest, url, expected_sha, verify_shape):
    """Download a dataset (default: a9a) with checksum verification."""
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    try:
        with urllib.request.urlopen(url) as response:
            payload = response.read()
    except OSError as exc:
        click.echo(f"download failed: {exc}", err=True)
        sys.exit(1)
    digest = hashlib.sha256(payload).hexdigest()
    if expected_sha is not None and digest != expected_sha.lower():
        click.echo(f"checksum mismatch: expected {expected_sha}, got {digest}; not writing {dest}", err=True)
        sys.exit(1)
    dest.write_bytes(payload)
    click.echo(f"wrote {dest} ({len(payload)} bytes, sha256={digest})")
    if expected_sha is None:
        click.echo("warning: no --sha256 given; record the hash above for reproducibility", err=True)
    if verify_shape and dest.name == "a9a":
        ds = parse_libsvm(dest, expected_dim=A9A_EXPECTED[1])
        if (ds.n, ds.d) != A9A_EXPECTED:
            click.echo(f"unexpected shape {(ds.n, ds.d)}, wanted {A9A_EXPECTED}", err=True)
            sys.exit(1)
        click.echo(f"verified a9a shape n={ds.n}, d={ds.d}")


@main.command("selftest")
def selftest_cmd():
    """Run every module's invariant suite; exit 0 iff all pass."""
    from .selftest import run_selftest

    sys.exit(0 if run_selftest(echo=click.echo) else 1)


if __name__ == "__main__":
    main()
