"""Command line front-end: parameter sweeps, scaling runs and oracle comparisons.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .berryphase import berry_derivative, berry_phase
from .model import InvalidParameterError, ModelParams, thermo_berry, thermo_sx
from .oracle import (
    DegenerateGroundStateError,
    OracleError,
    build_hamiltonian,
    discrete_berry,
    exact_sx,
    fock_convergence,
    ground_state,
)
from .output import (
    DATA_COLUMNS,
    LIMIT_N,
    SweepRecord,
    emit_csv,
    emit_svg,
    format_value,
    line_chart_svg,
    read_records,
    timing_path_for,
    write_rows,
)
from .scaling import finite_size_berry_prediction, fit_critical_exponent, quartic_constants
from .schroedinger1d import SolverError

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERICAL = 0, 2, 3, 4
WORKERS_ENV = "DICKE_BERRY_WORKERS"

DEFAULTS = {
    "sweep-alpha": {"D": "10", "N": "1,4,16,64", "alpha": "0:3:0.05"},
    "derivative": {"D": "10", "N": "1,4,16,64", "alpha": "0:3:0.05"},
    "scaling": {"D": "10", "N": ",".join(str(2**k) for k in range(2, 14)), "alpha": "1"},
    "oracle-compare": {"D": "5,10,20,40", "N": "3,4", "alpha": "0.25,0.5"},
    "quartic": {},
}
CONFIG_KEYS = {"D", "N", "alpha", "out", "svg", "workers", "tol", "input", "loop_steps"}


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def parse_alpha(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, step = (float(p) for p in parts)
            if not step > 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(count)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"malformed alpha range {text!r}") from None
    if not values or any(not math.isfinite(v) or v < 0 for v in values):
        raise UsageError(f"malformed alpha range {text!r}")
    return values


def parse_floats(text: str, what: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"malformed {what} list {text!r}") from None
    if not values or any(not (math.isfinite(v) and v > 0) for v in values):
        raise UsageError(f"malformed {what} list {text!r}")
    return values


def parse_ints(text: str, what: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"malformed {what} list {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise UsageError(f"malformed {what} list {text!r}")
    return values


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_workers(value) -> int:
    if value is None:
        value = os.environ.get(WORKERS_ENV)
    if value is None:
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise UsageError(f"workers must be an integer, got {value!r}") from None
    if n < 1:
        raise UsageError("workers must be >= 1")
    return n


def compute_record(n_qubits: int, big_d: float, alpha: float, tol: float) -> SweepRecord:
    t0 = time.perf_counter()
    p = ModelParams(n_qubits, big_d, alpha)
    res = berry_phase(p, tol=tol)
    sp = res.spectral
    return SweepRecord(
        n_qubits=n_qubits,
        big_d=float(big_d),
        alpha=float(alpha),
        gamma_per_n=res.gamma_per_n,
        sx_per_n=res.sx_per_n,
        epsilon0=sp.energy,
        q_max=sp.grid.q_max,
        m_points=sp.grid.m_points,
        refinement_steps=sp.refinement_steps,
        wall_time_ms=1e3 * (time.perf_counter() - t0),
    )


def _compute_star(args):
    return compute_record(*args)


def limit_record(big_d: float, alpha: float) -> SweepRecord:
    return SweepRecord(
        n_qubits=LIMIT_N,
        big_d=float(big_d),
        alpha=float(alpha),
        gamma_per_n=float(thermo_berry(alpha)),
        sx_per_n=float(thermo_sx(alpha)),
        epsilon0=math.nan,
        q_max=0.0,
        m_points=0,
        refinement_steps=0,
    )


def run_points(points, tol: float, workers: int) -> list[SweepRecord]:
    """Evaluate ``(N, D, alpha)`` points; output is sorted by ``(N, D, alpha)``."""
    tasks = [(n, d, a, tol) for n, d, a in points]
    try:
        if workers <= 1 or len(tasks) <= 1:
            records = [compute_record(*t) for t in tasks]
        else:
            with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
                records = list(pool.map(_compute_star, tasks, chunksize=1))
    except (SolverError, InvalidParameterError) as exc:
        raise NumericalFailure(str(exc)) from exc
    return sorted(records, key=lambda r: (r.n_qubits, r.big_d, r.alpha))


def sweep_alpha(big_d: float, ns, alphas, tol: float = 1e-9, workers: int = 1) -> list[SweepRecord]:
    """One record per ``(N, alpha)`` plus thermodynamic-limit rows tagged ``N = 0``."""
    records = run_points([(n, big_d, a) for n in ns for a in alphas], tol, workers)
    limit = [limit_record(big_d, a) for a in alphas]
    return limit + records


def scaling_run(big_d: float, ns, alpha: float = 1.0, tol: float = 1e-9, workers: int = 1):
    if not ns:
        raise UsageError("empty N list")
    records = run_points([(n, big_d, alpha) for n in ns], tol, workers)
    qc = quartic_constants()
    rows = []
    for r in records:
        p = ModelParams(r.n_qubits, r.big_d, r.alpha)
        two = finite_size_berry_prediction(p, qc)
        lead = finite_size_berry_prediction(p, qc, leading_only=True)
        row = dict(vars(r))
        row.update(
            predicted_leading=lead,
            predicted_two_term=two,
            relative_error=(r.gamma_per_n - two) / two if two != 0 else math.nan,
        )
        rows.append(row)
    fit = None
    if len(records) >= 3 and all(r.gamma_per_n > 0 for r in records):
        fit = fit_critical_exponent([(r.n_qubits, r.gamma_per_n) for r in records])
    return rows, fit


def oracle_compare(ds, ns, alphas, loop_steps: int = 2000) -> list[dict]:
    rows = []
    for n in ns:
        if n > 8:
            raise UsageError("oracle comparisons are limited to N <= 8")
        for d in ds:
            for a in alphas:
                p = ModelParams(n, d, a)
                basis = fock_convergence(p)
                e0, vec, gap = ground_state(build_hamiltonian(p, basis), with_gap=True)
                sx_exact = exact_sx(vec, basis) / n
                bo = berry_phase(p)
                gamma_bo = bo.gamma % (2 * math.pi)
                try:
                    gamma_disc = discrete_berry(p, basis, loop_steps)
                    status = "ok"
                except DegenerateGroundStateError:
                    gamma_disc = math.nan
                    status = "degenerate"
                # the loop runs opposite to the orientation of the reduced formula
                dist = abs(np.exp(1j * gamma_bo) - np.exp(-1j * gamma_disc)) if status == "ok" else math.nan
                rows.append(
                    dict(
                        n_qubits=n,
                        big_d=float(d),
                        alpha=float(a),
                        n_max=basis.n_max,
                        sx_bo=bo.sx_per_n,
                        sx_exact=sx_exact,
                        sx_abs_diff=abs(bo.sx_per_n - sx_exact),
                        gamma_bo_mod=gamma_bo,
                        gamma_disc_mod=gamma_disc,
                        phase_distance=float(dist),
                        gap=gap,
                        status=status,
                    )
                )
    return rows


ORACLE_COLUMNS = [
    "n_qubits", "big_d", "alpha", "n_max", "sx_bo", "sx_exact", "sx_abs_diff",
    "gamma_bo_mod", "gamma_disc_mod", "phase_distance", "gap", "status",
]
SCALING_COLUMNS = [
    "n_qubits", "big_d", "alpha", "gamma_per_n", "sx_per_n", "epsilon0", "q_max", "m_points",
    "refinement_steps", "predicted_leading", "predicted_two_term", "relative_error",
]
DERIVATIVE_COLUMNS = ["n_qubits", "big_d", "alpha", "gamma_per_n", "dgamma_dalpha"]


def derivative_rows(records) -> list[dict]:
    by_n: dict[int, list[SweepRecord]] = {}
    for r in records:
        by_n.setdefault(r.n_qubits, []).append(r)
    rows = []
    for n in sorted(by_n):
        rs = sorted(by_n[n], key=lambda r: r.alpha)
        try:
            deriv = berry_derivative(rs)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        for r, g in zip(rs, deriv):
            rows.append(dict(n_qubits=n, big_d=r.big_d, alpha=r.alpha, gamma_per_n=r.gamma_per_n,
                             dgamma_dalpha=float(g)))
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicke-berry", description="Berry phase of the adiabatic Dicke model"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("sweep-alpha", "gamma/N against alpha for several N"),
        ("scaling", "gamma/N against N at fixed alpha with a log-log fit"),
        ("quartic", "ground energy and <x^2> of the pure quartic oscillator"),
        ("oracle-compare", "Born-Oppenheimer against exact diagonalization"),
        ("derivative", "d(gamma/N)/d alpha along a sweep"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--D", dest="D", help="D = 2 Delta / omega (comma list for oracle-compare)")
        p.add_argument("--N", dest="N", help="comma separated qubit numbers")
        p.add_argument("--alpha", help="start:stop:step or comma list")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--svg", help="SVG plot path")
        p.add_argument("--workers", help=f"worker processes (fallback: ${WORKERS_ENV})")
        p.add_argument("--tol", help="ground-energy convergence tolerance (default 1e-9)")
        p.add_argument("--config", help="key = value file with the same keys as the flags")
        if name == "derivative":
            p.add_argument("--input", help="differentiate an existing sweep CSV instead of computing one")
        if name == "oracle-compare":
            p.add_argument("--loop-steps", dest="loop_steps", help="overlap-product steps K (default 2000)")
    return parser


def _settings(args) -> dict:
    settings = dict(DEFAULTS[args.command])
    if args.config:
        settings.update(read_config(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _print_rows(columns, rows, stream=None):
    stream = stream or sys.stdout
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(format_value(row[c]) for c in columns) + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        s = _settings(args)
        tol = float(s.get("tol", "1e-9"))
        if not tol > 0:
            raise UsageError("tol must be positive")
        workers = resolve_workers(s.get("workers"))
        out, svg = s.get("out"), s.get("svg")
        cmd = args.command

        if cmd == "sweep-alpha":
            d = parse_floats(s["D"], "D")[0]
            records = sweep_alpha(d, parse_ints(s["N"], "N"), parse_alpha(s["alpha"]), tol, workers)
            if out:
                emit_csv(records, out, timing_path_for(out))
            else:
                _print_rows(DATA_COLUMNS, map(vars, records))
            if svg:
                emit_svg(records, svg, "alpha")

        elif cmd == "derivative":
            if s.get("input"):
                records = read_records(s["input"])
            else:
                d = parse_floats(s["D"], "D")[0]
                records = sweep_alpha(d, parse_ints(s["N"], "N"), parse_alpha(s["alpha"]), tol, workers)
            rows = derivative_rows(records)
            if out:
                write_rows(out, DERIVATIVE_COLUMNS, rows)
            else:
                _print_rows(DERIVATIVE_COLUMNS, rows)
            if svg:
                ns = sorted({r["n_qubits"] for r in rows}, key=lambda n: (n == LIMIT_N, n))
                series = [
                    ("N = inf" if n == LIMIT_N else f"N = {n}",
                     [r["alpha"] for r in rows if r["n_qubits"] == n],
                     [r["dgamma_dalpha"] for r in rows if r["n_qubits"] == n])
                    for n in ns
                ]
                Path(svg).write_text(
                    line_chart_svg(series, "Derivative of the scaled Berry phase", "alpha", "d(gamma/N)/d alpha"),
                    encoding="utf-8",
                )

        elif cmd == "scaling":
            d = parse_floats(s["D"], "D")[0]
            alpha = parse_alpha(s["alpha"])
            if len(alpha) != 1:
                raise UsageError("scaling takes a single alpha")
            rows, fit = scaling_run(d, parse_ints(s["N"], "N"), alpha[0], tol, workers)
            if out:
                write_rows(out, SCALING_COLUMNS, rows)
            else:
                _print_rows(SCALING_COLUMNS, rows)
            if fit is not None:
                summary = f"slope = {fit.slope:.12g}\nintercept = {fit.intercept:.12g}\nresidual = {fit.residual:.12g}\n"
                sys.stderr.write(summary)
                if out:
                    Path(str(out) + ".fit.txt").write_text(summary, encoding="utf-8")
            if svg:
                ns = [r["n_qubits"] for r in rows]
                series = [
                    ("numerical", ns, [r["gamma_per_n"] for r in rows]),
                    ("two-term", ns, [r["predicted_two_term"] for r in rows]),
                    ("leading", ns, [r["predicted_leading"] for r in rows]),
                ]
                Path(svg).write_text(
                    line_chart_svg(series, "Berry phase at fixed alpha", "N", "gamma / N", logx=True, logy=True),
                    encoding="utf-8",
                )

        elif cmd == "quartic":
            qc = quartic_constants()
            rows = [dict(c0=qc.c0, c1=qc.c1)]
            if out:
                write_rows(out, ["c0", "c1"], rows)
            else:
                _print_rows(["c0", "c1"], rows)

        elif cmd == "oracle-compare":
            try:
                k = int(s.get("loop_steps", "2000"))
            except ValueError:
                raise UsageError("loop-steps must be an integer") from None
            rows = oracle_compare(
                parse_floats(s["D"], "D"), parse_ints(s["N"], "N"), parse_alpha(s["alpha"]), k
            )
            if out:
                write_rows(out, ORACLE_COLUMNS, rows)
            else:
                _print_rows(ORACLE_COLUMNS, rows)

    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"dicke-berry: error: {exc}\n")
        return EXIT_USAGE
    except (InvalidParameterError, ValueError) as exc:
        sys.stderr.write(f"dicke-berry: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"dicke-berry: I/O error: {exc}\n")
        return EXIT_IO
    except (NumericalFailure, SolverError, OracleError) as exc:
        sys.stderr.write(f"dicke-berry: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
