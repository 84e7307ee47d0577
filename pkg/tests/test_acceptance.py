"""Acceptance gate: each test checks one criterion and reports a PASS/FAIL line."""

import cmath
import math
import subprocess
import sys
import time

import numpy as np

from dicke_berry.berryphase import berry_derivative, berry_phase, berry_phase_direct
from dicke_berry.cli import sweep_alpha
from dicke_berry.model import ModelParams
from dicke_berry.oracle import (
    FockSpinBasis,
    build_hamiltonian,
    discrete_berry,
    exact_sx,
    fock_convergence,
    ground_state,
    loop_states,
    overlap_phase,
)
from dicke_berry.output import LIMIT_N
from dicke_berry.scaling import finite_size_berry_prediction, fit_critical_exponent, quartic_constants
from dicke_berry.schroedinger1d import QGrid, refine_until_converged, solve_ground

BIG_D = 10.0


def test_quartic_constants(report):
    t0 = time.perf_counter()
    qc = quartic_constants()
    elapsed = time.perf_counter() - t0
    ok = abs(qc.c0 - 1.06036) <= 2e-5 and abs(qc.c1 - 0.36203) <= 2e-5 and elapsed < 5.0
    assert report("quartic constants", ok, f"c0={qc.c0:.7f} c1={qc.c1:.7f} in {elapsed:.2f}s")


def test_route_equivalence(report):
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        for n in (4, 64, 512):
            p = ModelParams(n, BIG_D, alpha)
            b = berry_phase(p)
            worst = max(worst, abs(berry_phase_direct(p, b.spectral) - b.gamma) / n)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 60.0
    assert report("route equivalence", ok, f"max |direct - reduced|/N = {worst:.2e} in {elapsed:.1f}s")


def test_thermodynamic_limit(report):
    n = 4096
    g2 = berry_phase(ModelParams(n, BIG_D, 2.0)).gamma_per_n
    dev2 = abs(g2 - math.pi * (1 - 1 / 2.0))
    bound2 = 1.2 * math.pi / (n * BIG_D * 2.0**2)
    g05 = berry_phase(ModelParams(n, BIG_D, 0.5)).gamma_per_n
    bound05 = 1.2 * math.pi * 0.5 / (2 * n * BIG_D)
    ok = dev2 <= bound2 and abs(g05) <= bound05
    detail = (
        f"alpha=2 dev {dev2:.3e} <= {bound2:.3e} ({dev2 <= bound2}); "
        f"alpha=0.5 |gamma/N| {abs(g05):.3e} <= {bound05:.3e} ({abs(g05) <= bound05})"
    )
    assert report("thermodynamic limit", ok, detail)


def test_critical_scaling(report):
    t0 = time.perf_counter()
    large = [2**k for k in range(7, 14)]
    small = [4, 8, 16, 32, 64]
    gammas = {n: berry_phase(ModelParams(n, BIG_D, 1.0)).gamma_per_n for n in small + large}
    fit = fit_critical_exponent([(n, gammas[n]) for n in large])
    rel = {n: abs(gammas[n] / finite_size_berry_prediction(ModelParams(n, BIG_D, 1.0)) - 1) for n in gammas}
    elapsed = time.perf_counter() - t0
    worst_large = max(rel[n] for n in large)
    worst_all = max(rel.values())
    ok = abs(fit.slope + 0.667) <= 0.02 and worst_large <= 0.05 and worst_all <= 0.10 and elapsed < 300
    detail = (
        f"slope {fit.slope:.4f}; two-term error {worst_large:.2%} for N>=128, "
        f"{worst_all:.2%} for N>=4; {elapsed:.1f}s"
    )
    assert report("critical scaling", ok, detail)


def test_alpha_sweep_shape(report):
    # a 0.01 grid resolves the derivative peak near alpha = 1
    alphas = [round(0.01 * i, 12) for i in range(301)]
    ns = (1, 4, 16, 64)
    records = sweep_alpha(BIG_D, ns, alphas, workers=1)
    ok = True
    parts = []
    peaks = []
    for n in ns:
        rs = [r for r in records if r.n_qubits == n]
        g = np.array([r.gamma_per_n for r in rs])
        monotone = bool(np.all(np.diff(g) >= -1e-9))
        bounded = bool(np.all((g >= 0) & (g < math.pi)))
        d = berry_derivative(rs)
        i = int(np.argmax(d))
        peaks.append(d[i])
        near = abs(rs[i].alpha - 1.0) <= 0.2 if n >= 16 else True
        ok &= monotone and bounded and near
        parts.append(f"N={n} max {d[i]:.3f} at {rs[i].alpha:.2f}")
    growing = all(a < b for a, b in zip(peaks, peaks[1:]))
    ok &= growing
    assert report("alpha sweep shape", ok, "; ".join(parts) + f"; peak grows {growing}")


def test_solver_sanity(report):
    harmonic = lambda q: 0.5 * q**2
    e = refine_until_converged(harmonic, QGrid(8.0, 2001), tol=1e-9).energy
    errs = []
    for m in (201, 401, 801):
        g = QGrid(8.0, m)
        errs.append(solve_ground(harmonic(g.nodes), g).energy - 0.5)
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    ok = abs(e - 0.5) <= 1e-8 and all(3.6 <= r <= 4.4 for r in ratios)
    assert report("solver sanity", ok, f"E0-0.5 = {e - 0.5:.1e}; ratios {ratios[0]:.3f}, {ratios[1]:.3f}")


def test_oracle_identity(report, rng):
    worst = 0.0
    for n in (3, 4):
        p = ModelParams(n, BIG_D, 0.5)
        basis = fock_convergence(p)
        _, vec = ground_state(build_hamiltonian(p, basis))
        target = (n * math.pi - math.pi * exact_sx(vec, basis)) % (2 * math.pi)
        gamma = discrete_berry(p, basis, k_steps=2000)
        worst = max(worst, abs(cmath.exp(1j * gamma) - cmath.exp(1j * target)))
    p = ModelParams(4, BIG_D, 0.5)
    states = loop_states(p, fock_convergence(p), 2000)
    ref = overlap_phase(states)
    scrambled = overlap_phase([s * cmath.exp(2j * math.pi * rng.random()) for s in states])
    gauge = abs(cmath.exp(1j * scrambled) - cmath.exp(1j * ref))
    ok = worst <= 1e-3 and gauge <= 1e-12
    assert report("oracle identity", ok, f"identity error {worst:.2e}; gauge change {gauge:.1e}")


def test_adiabatic_validation_trend(report):
    diffs = []
    for big_d in (5.0, 10.0, 20.0, 40.0):
        p = ModelParams(4, big_d, 0.5)
        basis = fock_convergence(p)
        _, vec = ground_state(build_hamiltonian(p, basis))
        diffs.append(abs(berry_phase(p).sx_per_n - exact_sx(vec, basis) / 4))
    ok = all(a >= b for a, b in zip(diffs, diffs[1:])) and diffs[-1] <= 0.05
    assert report("adiabatic validation trend", ok, "|dSx|/N = " + ", ".join(f"{x:.2e}" for x in diffs))


def test_determinism(report, tmp_path):
    outs = []
    for workers in ("1", "8"):
        out = tmp_path / f"sweep_{workers}.csv"
        subprocess.run(
            [sys.executable, "-m", "dicke_berry", "sweep-alpha", "--workers", workers, "--out", str(out)],
            check=True, capture_output=True,
        )
        outs.append(out.read_bytes())
    rows = outs[0].count(b"\n") - 1
    ok = outs[0] == outs[1] and rows > 0
    assert report("determinism", ok, f"{rows} rows, identical bytes {outs[0] == outs[1]}")
