"""Report emission: CSV tables, curve files, summary JSON, optional SVGs.

Every file is written to a temp path and atomically renamed, so a failed
run never leaves a partial file. Undefined metric values (a precision with
no positive predictions) are written as ``NA`` in CSVs and ``null`` in the
JSON summary.

``metrics.csv`` and the curve CSVs contain only deterministic quantities;
wall-clock timings live exclusively in ``runtime.csv``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict

from .errors import DataError, NumericError
from .evaluation import CurveSeries
from .pipeline import RunReport

_METRIC_COLUMNS = ("accuracy", "precision", "recall", "f1", "auc", "brier")


def _fmt(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "NA"
    return repr(float(value))


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise DataError(f"failed writing {path}: {exc}") from exc


def _metric_value_or_none(value: float):
    return None if isinstance(value, float) and math.isnan(value) else value


def report_to_dict(report: RunReport) -> dict:
    """JSON-ready view of the report (NaN markers become null)."""
    metrics = {}
    for name, protocols in report.metrics.items():
        metrics[name] = {}
        for protocol, row in protocols.items():
            metrics[name][protocol] = {
                key: _metric_value_or_none(value) for key, value in asdict(row).items()
            }
    return {
        "mode": report.mode,
        "seed": report.seed,
        "config": report.config,
        "environment": report.environment,
        "stage_log": report.stage_log,
        "metrics": metrics,
        "extras": report.extras,
        "confusion": {name: asdict(cm) for name, cm in report.confusions.items()},
        "runtimes": [
            {"model": name, "protocol": protocol, "seconds": seconds}
            for name, protocol, seconds in report.runtimes
        ],
        "kl_trace": report.kl_trace,
        "manifest": report.manifest,
    }


def _metrics_csv(report: RunReport) -> str:
    lines = ["model,protocol," + ",".join(_METRIC_COLUMNS)]
    for name, protocols in report.metrics.items():
        for protocol in ("cv", "split"):
            if protocol not in protocols:
                continue
            row = protocols[protocol]
            cells = [name, protocol] + [_fmt(getattr(row, c)) for c in _METRIC_COLUMNS]
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _runtime_csv(report: RunReport) -> str:
    lines = ["model,protocol,seconds"]
    for name, protocol, seconds in report.runtimes:
        lines.append(f"{name},{protocol},{_fmt(seconds)}")
    return "\n".join(lines) + "\n"


def curve_csv(series: CurveSeries) -> str:
    lines = ["x,y"]
    for x, y in series.points:
        lines.append(f"{_fmt(x)},{_fmt(y)}")
    return "\n".join(lines) + "\n"


def parse_curve_csv(text: str) -> CurveSeries:
    lines = [line for line in text.splitlines() if line]
    if not lines or lines[0] != "x,y":
        raise DataError("curve CSV must start with an x,y header")
    points = []
    for line in lines[1:]:
        x_str, y_str = line.split(",")
        points.append(
            (
                math.nan if x_str == "NA" else float(x_str),
                math.nan if y_str == "NA" else float(y_str),
            )
        )
    return CurveSeries(kind="", model="", points=points)


def _matrix_csv(matrix) -> str:
    lines = [",".join(f"c{i}" for i in range(matrix.shape[1]))]
    for row in matrix:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def render_svg(series: CurveSeries) -> str:
    """Self-contained deterministic SVG: axes on [0, 1] and one polyline."""
    if not series.points:
        raise NumericError("cannot render an empty series")
    width, height, margin = 640, 480, 60
    span_x, span_y = width - 2 * margin, height - 2 * margin

    def sx(x: float) -> float:
        return margin + min(max(x, 0.0), 1.0) * span_x

    def sy(y: float) -> float:
        return height - margin - min(max(y, 0.0), 1.0) * span_y

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in series.points)
    ticks = []
    for i in range(5):
        v = i / 4.0
        ticks.append(
            f'<line x1="{sx(v):.2f}" y1="{height - margin}" x2="{sx(v):.2f}" '
            f'y2="{height - margin + 6}" stroke="black"/>'
            f'<text x="{sx(v):.2f}" y="{height - margin + 20}" font-size="12" '
            f'text-anchor="middle">{v:g}</text>'
            f'<line x1="{margin - 6}" y1="{sy(v):.2f}" x2="{margin}" y2="{sy(v):.2f}" '
            f'stroke="black"/>'
            f'<text x="{margin - 10}" y="{sy(v) + 4:.2f}" font-size="12" '
            f'text-anchor="end">{v:g}</text>'
        )
    title = f"{series.kind} {series.model}".strip()
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
        f'<rect width="{width}" height="{height}" fill="white"/>'
        f'<text x="{width / 2:.0f}" y="30" font-size="16" text-anchor="middle">{title}</text>'
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>'
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>'
        + "".join(ticks)
        + f'<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{pts}"/>'
        + "</svg>\n"
    )


def emit_reports(report: RunReport, out_dir: str) -> list[str]:
    """Write all report files into ``out_dir``; returns the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    plots_dir = os.path.join(out_dir, "plots")

    planned: list[tuple[str, str]] = []  # (relative name, content)
    planned.append(("metrics.csv", _metrics_csv(report)))
    planned.append(("runtime.csv", _runtime_csv(report)))

    for series in report.curves:
        if series.kind == "learning_train":
            rel = f"learning_{series.model}_train.csv"
        elif series.kind == "learning":
            rel = f"learning_{series.model}.csv"
        else:
            rel = f"{series.kind}_{series.model}.csv"
        planned.append((rel, curve_csv(series)))

    for name, cm in report.confusions.items():
        planned.append(
            (f"confusion_{name}.csv", f"tp,fp,tn,fn\n{cm.tp},{cm.fp},{cm.tn},{cm.fn}\n")
        )

    if report.config.get("dump_stages"):
        for stage, matrix in report.stage_matrices.items():
            planned.append((f"stage_{stage}.csv", _matrix_csv(matrix)))

    svg_files: list[tuple[str, str]] = []
    if report.config.get("plots"):
        for series in report.curves:
            if series.kind == "learning_train":
                rel = f"plots/learning_{series.model}_train.svg"
            else:
                rel = f"plots/{series.kind}_{series.model}.svg"
            svg_files.append((rel, render_svg(series)))

    manifest = [name for name, _ in planned] + [name for name, _ in svg_files]
    manifest.append("summary.json")
    report.manifest = sorted(manifest)

    for rel, content in planned:
        _atomic_write(os.path.join(out_dir, rel), content)
    if svg_files:
        os.makedirs(plots_dir, exist_ok=True)
        for rel, content in svg_files:
            _atomic_write(os.path.join(out_dir, rel), content)

    summary = json.dumps(report_to_dict(report), indent=2, sort_keys=True)
    _atomic_write(os.path.join(out_dir, "summary.json"), summary + "\n")
    return report.manifest
