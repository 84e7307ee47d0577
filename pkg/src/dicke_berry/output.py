"""Sweep records and their CSV / SVG serializations."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

LIMIT_N = 0  # sentinel qubit number for N -> infinity rows


@dataclass(frozen=True)
class SweepRecord:
    n_qubits: int
    big_d: float
    alpha: float
    gamma_per_n: float
    sx_per_n: float
    epsilon0: float
    q_max: float
    m_points: int
    refinement_steps: int
    wall_time_ms: float = 0.0


# wall_time_ms is kept out of data files so they are reproducible byte for byte
DATA_COLUMNS = [f.name for f in fields(SweepRecord) if f.name != "wall_time_ms"]
TIMING_COLUMNS = ["n_qubits", "big_d", "alpha", "wall_time_ms"]


def format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def write_rows(path, columns: Sequence[str], rows: Iterable[dict]) -> None:
    """CSV with a header row, ``.`` decimal point, ``\\n`` line endings, 12 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in columns])


def emit_csv(records: Sequence[SweepRecord], path, timing_path=None) -> None:
    write_rows(path, DATA_COLUMNS, (vars(r) for r in records))
    if timing_path is not None:
        write_rows(timing_path, TIMING_COLUMNS, (vars(r) for r in records))


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def read_records(path) -> list[SweepRecord]:
    out = []
    for row in read_csv(path):
        out.append(
            SweepRecord(
                n_qubits=int(row["n_qubits"]),
                big_d=float(row["big_d"]),
                alpha=float(row["alpha"]),
                gamma_per_n=float(row["gamma_per_n"]),
                sx_per_n=float(row["sx_per_n"]),
                epsilon0=float(row["epsilon0"]),
                q_max=float(row["q_max"]),
                m_points=int(row["m_points"]),
                refinement_steps=int(row["refinement_steps"]),
            )
        )
    return out


def timing_path_for(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".timing.csv")


_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def line_chart_svg(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    xlabel: str,
    ylabel: str,
    logx: bool = False,
    logy: bool = False,
    width: int = 640,
    height: int = 440,
) -> str:
    """Self-contained SVG line chart, one ``<polyline>`` per series."""
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(v)) if logy else (lambda v: v)
    pts = []
    for _, xs, ys in series:
        pts.append(
            [(tx(x), ty(y)) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)
             and (not logx or x > 0) and (not logy or y > 0)]
        )
    allx = [p[0] for s in pts for p in s] or [0.0, 1.0]
    ally = [p[1] for s in pts for p in s] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    left, right, top, bottom = 70, 150, 40, 55
    pw, ph = width - left - right, height - top - bottom

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<g class="axes" stroke="black" fill="none">'
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/></g>',
    ]
    for t in _nice_ticks(x0, x1):
        label = f"{10 ** t:.3g}" if logx else f"{t:.3g}"
        out.append(
            f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" y2="{top + ph + 5}" stroke="black"/>'
            f'<text x="{sx(t):.2f}" y="{top + ph + 18}" text-anchor="middle">{label}</text>'
        )
    for t in _nice_ticks(y0, y1):
        label = f"{10 ** t:.3g}" if logy else f"{t:.3g}"
        out.append(
            f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>'
            f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{label}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for i, ((label, _, _), p) in enumerate(zip(series, pts)):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in p)
        out.append(
            f'<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>'
        )
        ly = top + 10 + 18 * i
        out.append(
            f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>'
            f'<text x="{left + pw + 45}" y="{ly + 4}">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _label(n: int) -> str:
    return "N = inf" if n == LIMIT_N else f"N = {n}"


def emit_svg(records: Sequence[SweepRecord], path, kind: str = "alpha") -> None:
    """Plot ``gamma/N`` against alpha per N (``kind='alpha'``) or log-log against N (``kind='scaling'``)."""
    if kind == "alpha":
        by_n: dict[int, list[SweepRecord]] = {}
        for r in records:
            by_n.setdefault(r.n_qubits, []).append(r)
        order = sorted(k for k in by_n if k != LIMIT_N) + ([LIMIT_N] if LIMIT_N in by_n else [])
        series = [
            (_label(n), [r.alpha for r in by_n[n]], [r.gamma_per_n for r in by_n[n]]) for n in order
        ]
        svg = line_chart_svg(series, "Scaled Berry phase", "alpha", "gamma / N")
    elif kind == "scaling":
        rs = [r for r in records if r.n_qubits != LIMIT_N]
        series = [("numerical", [r.n_qubits for r in rs], [r.gamma_per_n for r in rs])]
        svg = line_chart_svg(series, "Berry phase at the critical point", "N", "gamma / N", logx=True, logy=True)
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    Path(path).write_text(svg, encoding="utf-8")
