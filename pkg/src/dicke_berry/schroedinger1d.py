"""Lowest eigenpair of a 1D Schroedinger operator on a uniform grid.

The operator ``-k d^2/dq^2 + V(q)`` (``k = 1/2`` for the oscillator, ``k = 1``
for the canonical quartic problem) is discretized with 3-point central
differences and Dirichlet boundaries. The lowest eigenvalue is isolated by
Sturm-sequence bisection and its eigenvector by inverse iteration. Even
potentials are solved in the even-parity sector, which removes the
quasi-degenerate partner of a deep double well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import _tridiag
from .model import ModelParams, adiabatic_potential, well_minima


class SolverError(RuntimeError):
    """Base class for eigensolver failures."""


class NonConfiningError(SolverError):
    """The sampled potential does not rise towards the grid edges."""


class ConvergenceError(SolverError):
    """Raised when an iteration did not converge.

    ``best`` holds the last available :class:`SpectralResult` (or ``None``).
    """

    def __init__(self, msg, best=None, iterations=None):
        super().__init__(msg)
        self.best = best
        self.iterations = iterations


@dataclass(frozen=True)
class QGrid:
    q_max: float
    m_points: int

    def __post_init__(self):
        if not self.q_max > 0:
            raise ValueError(f"q_max must be positive, got {self.q_max}")
        if self.m_points < 3 or self.m_points % 2 == 0:
            raise ValueError(f"m_points must be odd and >= 3, got {self.m_points}")

    @property
    def h(self) -> float:
        return 2.0 * self.q_max / (self.m_points - 1)

    @property
    def nodes(self) -> np.ndarray:
        half = self.m_points // 2
        return np.arange(-half, half + 1) * self.h

    def halved(self) -> "QGrid":
        """Same span, half the spacing."""
        return QGrid(self.q_max, 2 * (self.m_points - 1) + 1)

    def widened(self) -> "QGrid":
        """Twice the span, same spacing."""
        return QGrid(2.0 * self.q_max, 2 * (self.m_points - 1) + 1)


@dataclass(frozen=True)
class WaveFunction:
    grid: QGrid
    values: np.ndarray = field(repr=False)

    @property
    def q(self) -> np.ndarray:
        return self.grid.nodes

    def norm(self) -> float:
        return float(np.sum(self.values**2) * self.grid.h)


@dataclass(frozen=True)
class SpectralResult:
    """Lowest eigenpair with diagnostics.

    ``energy`` is Richardson-extrapolated when the result comes from
    :func:`refine_until_converged`; ``raw_energy`` is the plain finite
    difference value on the finest grid and ``coarse`` the result on the
    grid with twice the spacing (same span), if any.
    """

    energy: float
    wavefunction: WaveFunction
    refinement_steps: int
    boundary_leak: float
    gap: float
    raw_energy: float
    coarse: Optional["SpectralResult"] = field(default=None, repr=False)

    @property
    def grid(self) -> QGrid:
        return self.wavefunction.grid


@dataclass(frozen=True)
class GridOptions:
    m_points: int = 2001
    tail_tol: float = 1e-12
    safety: float = 8.0
    # minimum number of nodes per local Gaussian width
    points_per_width: int = 16


def local_width(p: ModelParams) -> float:
    """Gaussian width of the ground state around the bottom of the well.

    The harmonic estimate diverges at ``alpha = 1`` and is capped by the
    width of the quartic term, ``(2 N D / alpha**2)**(1/6)``.
    """
    a = p.alpha
    quartic = (2.0 * p.n_qubits * p.big_d / a**2) ** (1.0 / 6.0) if a > 0 else math.inf
    if a < 1.0:
        harmonic = (1.0 - a) ** -0.25
    elif a > 1.0:
        harmonic = (1.0 - 1.0 / a**2) ** -0.25
    else:
        harmonic = math.inf
    return max(1.0, min(harmonic, quartic))


def build_grid(p: ModelParams, opts: GridOptions | None = None) -> QGrid:
    opts = opts or GridOptions()
    width = local_width(p)
    q_max = max(max(well_minima(p)), 0.0) + opts.safety * width
    m = max(opts.m_points, 2 * math.ceil(q_max * opts.points_per_width / width) + 1)
    if m % 2 == 0:
        m += 1
    return QGrid(q_max, m)


def _lowest_pair(diag, off, want_second):
    off2 = off * off
    pivmin = np.finfo(float).tiny * max(1.0, float(off2.max()) if off2.size else 1.0)
    lo, hi, _ = _tridiag.bisect_eigenvalue(diag, off2, 0, pivmin, 200)
    vec, iters, change = _tridiag.inverse_iteration(diag, off, lo, pivmin, 50, 1e-13)
    if not change <= 1e-13:
        raise ConvergenceError(
            f"inverse iteration stalled after {iters} iterations (change {change:.3g})",
            iterations=iters,
        )
    second = math.inf
    if want_second and diag.size > 1:
        lo1, hi1, _ = _tridiag.bisect_eigenvalue(diag, off2, 1, pivmin, 200)
        second = 0.5 * (lo1 + hi1)
    return 0.5 * (lo + hi), vec, second, pivmin


def _lowest_only(diag, off):
    off2 = off * off
    pivmin = np.finfo(float).tiny * max(1.0, float(off2.max()) if off2.size else 1.0)
    lo, hi, _ = _tridiag.bisect_eigenvalue(diag, off2, 0, pivmin, 200)
    return 0.5 * (lo + hi)


def is_even(potential: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(potential))))
    return bool(np.max(np.abs(potential - potential[::-1])) <= 1e-12 * scale)


def solve_ground(potential, grid: QGrid, kinetic: float = 0.5) -> SpectralResult:
    """Lowest eigenpair of ``-kinetic d^2/dq^2 + V`` sampled on ``grid``.

    Matrix: diagonal ``2 kinetic/h^2 + V_i``, off-diagonal ``-kinetic/h^2``.
    The wavefunction is normalized to ``sum(psi**2) h = 1`` with ``psi >= 0``.
    """
    v = np.ascontiguousarray(potential, dtype=float)
    if v.shape != (grid.m_points,):
        raise ValueError(f"potential has shape {v.shape}, grid has {grid.m_points} nodes")
    if not np.all(np.isfinite(v)):
        raise ValueError("potential must be finite on the grid")
    if min(v[0], v[-1]) <= v.min():
        raise NonConfiningError(
            f"potential is not confining: edges ({v[0]:.6g}, {v[-1]:.6g}) "
            f"do not exceed the interior minimum {v.min():.6g}"
        )
    h = grid.h
    t = kinetic / h**2
    m = grid.m_points

    if is_even(v):
        half = m // 2
        vh = v[half:]
        diag = 2.0 * t + vh
        off = np.full(half, -t)
        # symmetrized coupling between q=0 and its mirrored neighbours
        off[0] = -math.sqrt(2.0) * t
        energy, u, second_even, _ = _lowest_pair(diag, off, want_second=True)
        first_odd = _lowest_only(diag[1:], np.full(half - 1, -t)) if half > 1 else math.inf
        psi_half = u.copy()
        psi_half[0] *= math.sqrt(2.0)
        psi = np.concatenate([psi_half[:0:-1], psi_half])
        second = min(second_even, first_odd)
    else:
        diag = 2.0 * t + v
        off = np.full(m - 1, -t)
        energy, psi, second, _ = _lowest_pair(diag, off, want_second=True)

    psi = psi / math.sqrt(np.sum(psi**2) * h)
    if psi[np.argmax(np.abs(psi))] < 0:
        psi = -psi
    leak = float(max(abs(psi[0]), abs(psi[-1])))
    # a deep double-well doublet can sit below bisection resolution
    gap = max(second - energy, 0.0)
    wf = WaveFunction(grid, psi)
    return SpectralResult(energy, wf, 0, leak, gap, energy)


def expectation(f, wf: WaveFunction) -> float:
    """Trapezoidal estimate of ``integral f(q) psi(q)**2 dq`` on the wavefunction grid."""
    q = wf.grid.nodes
    vals = f(q) if callable(f) else np.asarray(f, dtype=float)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), q.shape)
    return float(np.trapezoid(vals * wf.values**2, dx=wf.grid.h))


def richardson(fine: float, coarse: float) -> float:
    """Second-order Richardson extrapolation from spacings h/2 and h."""
    return (4.0 * fine - coarse) / 3.0


def refine_until_converged(
    potential: Callable[[np.ndarray], np.ndarray],
    grid: QGrid,
    tol: float = 1e-9,
    kinetic: float = 0.5,
    leak_tol: float = 1e-12,
    max_steps: int = 12,
    max_points: int = 2**22 + 1,
) -> SpectralResult:
    """Refine ``grid`` until the extrapolated ground energy settles within ``tol``.

    A boundary leak above ``leak_tol`` doubles the span (at fixed spacing) and
    restarts the extrapolation sequence; otherwise the spacing is halved.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    levels: list[SpectralResult] = []
    extrapolated: list[float] = []
    best = None
    for step in range(max_steps + 1):
        if grid.m_points > max_points:
            break
        res = solve_ground(potential(grid.nodes), grid, kinetic)
        res = replace(res, refinement_steps=step)
        best = res
        if res.boundary_leak > leak_tol:
            levels, extrapolated = [], []
            grid = grid.widened()
            continue
        if levels:
            coarse = levels[-1]
            e_r = richardson(res.raw_energy, coarse.raw_energy)
            res = replace(res, energy=e_r, coarse=coarse)
            extrapolated.append(e_r)
            best = res
            if len(extrapolated) >= 2 and abs(extrapolated[-1] - extrapolated[-2]) < tol:
                return res
        levels.append(res)
        grid = grid.halved()
    raise ConvergenceError(
        f"ground energy not converged to {tol:g} after {step} refinement steps",
        best=best,
        iterations=step,
    )


def ground_state(p: ModelParams, tol: float = 1e-9, opts: GridOptions | None = None) -> SpectralResult:
    """Converged ground state of the Born-Oppenheimer oscillator problem."""
    opts = opts or GridOptions()
    return refine_until_converged(
        lambda q: adiabatic_potential(p, q),
        build_grid(p, opts),
        tol=tol,
        leak_tol=opts.tail_tol,
    )
