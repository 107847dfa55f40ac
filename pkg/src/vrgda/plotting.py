"""Static SVG figures for run trajectories, rendered with matplotlib.

Output is byte-deterministic: a fixed svg.hashsalt, path-rendered fonts, and
a stripped Date field make identical inputs produce identical files, so
figures can sit next to the CSVs under the same reproducibility contract.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .errors import InvalidArgument

_DETERMINISTIC_RC = {
    "svg.hashsalt": "vrgda",
    "svg.fonttype": "path",
    "figure.max_open_warning": 0,
}

LOG_FLOOR_DEFAULT = 1e-12


@dataclass
class Series:
    label: str
    x: list
    y: list


@dataclass
class Band:
    """Shaded min..max region, e.g. the spread across seeds."""

    label: str
    x: list
    lo: list
    hi: list


@dataclass
class PlotStyle:
    title: str = ""
    xlabel: str = "epoch"
    ylabel: str = ""
    logy: bool = False
    figsize: tuple = (7.0, 4.5)
    bands: list = field(default_factory=list)


def _log_floor(series, bands) -> float:
    positives = [v for s in series for v in s.y if v > 0]
    positives += [v for b in bands for v in list(b.lo) + list(b.hi) if v > 0]
    return min(positives) / 10.0 if positives else LOG_FLOOR_DEFAULT


def render_svg(series: list[Series], style: PlotStyle | None = None) -> bytes:
    """Render line series (plus optional bands) to an SVG document.

    With logy, nonpositive values are clamped to a plot floor and the figure
    carries a warning annotation saying how many were clamped.
    """
    if not series:
        raise InvalidArgument("render_svg needs at least one series")
    style = style or PlotStyle()
    clamped = 0
    floor = _log_floor(series, style.bands) if style.logy else None

    with plt.rc_context(_DETERMINISTIC_RC):
        fig, ax = plt.subplots(figsize=style.figsize)
        for band in style.bands:
            lo, hi = list(band.lo), list(band.hi)
            if style.logy:
                clamped += sum(1 for v in lo + hi if v <= 0)
                lo = [max(v, floor) for v in lo]
                hi = [max(v, floor) for v in hi]
            ax.fill_between(band.x, lo, hi, alpha=0.2, label=band.label or None)
        for s in series:
            y = list(s.y)
            if style.logy:
                clamped += sum(1 for v in y if v <= 0)
                y = [max(v, floor) for v in y]
            ax.plot(s.x, y, label=s.label)
        if style.logy:
            ax.set_yscale("log")
            if clamped:
                ax.annotate(
                    f"warning: {clamped} nonpositive value(s) clamped to {floor:g}",
                    xy=(0.02, 0.02),
                    xycoords="axes fraction",
                    fontsize=8,
                    color="crimson",
                )
        ax.set_title(style.title)
        ax.set_xlabel(style.xlabel)
        ax.set_ylabel(style.ylabel)
        ax.grid(True, alpha=0.3)
        if any(s.label for s in series) or any(b.label for b in style.bands):
            ax.legend()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches="tight")
        plt.close(fig)
    return buf.getvalue()


def save_svg(series: list[Series], style: PlotStyle, path) -> Path:
    path = Path(path)
    path.write_bytes(render_svg(series, style))
    return path


# ---------------------------------------------------------------------------
# Report figures from run CSVs
# ---------------------------------------------------------------------------

REPORT_METRICS = ("phi", "grad_phi_norm", "grad_f_norm", "potential_shifted", "accuracy")


def _median(values):
    values = sorted(values)
    k = len(values)
    mid = k // 2
    return values[mid] if k % 2 else 0.5 * (values[mid - 1] + values[mid])


def group_runs(tables: list[tuple[list[str], list[dict]]]) -> dict[str, list[list[dict]]]:
    """Group parsed CSVs by algorithm label."""
    grouped: dict[str, list[list[dict]]] = {}
    for _, rows in tables:
        if not rows:
            continue
        grouped.setdefault(rows[0]["algorithm"], []).append(rows)
    return grouped


def report_figures(
    tables: list[tuple[list[str], list[dict]]],
    outdir,
    metrics: tuple = REPORT_METRICS,
    x_axes: tuple = ("epoch", "oracle_calls"),
    logy_metrics: tuple = ("grad_phi_norm", "grad_f_norm"),
) -> list[Path]:
    """One figure per (available metric, x axis): a median line per algorithm
    with a min..max band across that algorithm's seeds.  Returns the written
    paths; also writes a plain-text summary table."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grouped = group_runs(tables)
    if not grouped:
        raise InvalidArgument("no run rows to report on")
    available = [m for m in metrics if any(m in runs[0][0] for runs in grouped.values())]
    written = []
    for metric in available:
        for x_axis in x_axes:
            series, bands = [], []
            for algo, runs in sorted(grouped.items()):
                runs = [r for r in runs if metric in r[0]]
                if not runs:
                    continue
                length = min(len(r) for r in runs)
                xs = [runs[0][k][x_axis] for k in range(length)]
                per_epoch = [[r[k][metric] for r in runs] for k in range(length)]
                finite = [[v for v in vals if math.isfinite(v)] for vals in per_epoch]
                med = [(_median(vals) if vals else math.nan) for vals in finite]
                lo = [min(vals) if vals else math.nan for vals in finite]
                hi = [max(vals) if vals else math.nan for vals in finite]
                series.append(Series(label=algo, x=xs, y=med))
                if len(runs) > 1:
                    bands.append(Band(label="", x=xs, lo=lo, hi=hi))
            if not series:
                continue
            style = PlotStyle(
                title=f"{metric} vs {x_axis}",
                xlabel=x_axis,
                ylabel=metric,
                logy=metric in logy_metrics,
                bands=bands,
            )
            path = outdir / f"{metric}_vs_{x_axis}.svg"
            path.write_bytes(render_svg(series, style))
            written.append(path)
    _write_report_table(grouped, available, outdir / "report.txt")
    return written


def _write_report_table(grouped, metrics, path: Path) -> None:
    lines = []
    header = f"{'algorithm':<12} {'seeds':>5} " + " ".join(f"{('final ' + m):>22}" for m in metrics)
    lines.append(header)
    lines.append("-" * len(header))
    for algo, runs in sorted(grouped.items()):
        cells = []
        for metric in metrics:
            finals = [r[-1][metric] for r in runs if metric in r[0] and math.isfinite(r[-1][metric])]
            cells.append(f"{_median(finals):>22.10g}" if finals else f"{'n/a':>22}")
        lines.append(f"{algo:<12} {len(runs):>5} " + " ".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
