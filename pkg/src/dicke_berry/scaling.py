"""Finite-size scaling near the critical coupling.

Close to ``alpha = 1`` the adiabatic potential reduces to
``-N D + (1 - alpha) q**2 + alpha**2 q**4 / (2 N D)``; rescaling
``x = q (alpha**2 / 2ND)**(1/6)`` maps it onto the canonical family
``-d^2/dx^2 + zeta x**2 + x**4`` whose ground energy ``e0(zeta) ~ c0 + c1 zeta``
fixes every finite-size prediction below.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .model import ModelParams
from .schroedinger1d import QGrid, SpectralResult, expectation, refine_until_converged

ALPHA_C = 1.0


class ValidityWarning(UserWarning):
    """A formula is evaluated outside the regime where it is accurate."""


class DegenerateMapError(ValueError):
    """The scaling map is undefined at zero coupling."""


@dataclass(frozen=True)
class QuarticConstants:
    c0: float
    c1: float


@dataclass(frozen=True)
class SymanzikMap:
    scale_s: float
    zeta_scaling: float


def solve_canonical(zeta: float = 0.0, tol: float = 1e-10, x_max: float = 8.0) -> SpectralResult:
    """Ground state of ``-d^2/dx^2 + zeta x**2 + x**4``."""
    return refine_until_converged(
        lambda x: zeta * x**2 + x**4, QGrid(x_max, 2001), tol=tol, kinetic=1.0
    )


def quartic_constants(tol: float = 1e-10, x_max: float = 8.0) -> QuarticConstants:
    res = solve_canonical(0.0, tol=tol, x_max=x_max)
    x2 = expectation(lambda x: x**2, res.wavefunction)
    x2_coarse = expectation(lambda x: x**2, res.coarse.wavefunction)
    return QuarticConstants(res.energy, (4.0 * x2 - x2_coarse) / 3.0)


_CONSTANTS: QuarticConstants | None = None


def default_constants() -> QuarticConstants:
    """Cached :func:`quartic_constants` at default resolution."""
    global _CONSTANTS
    if _CONSTANTS is None:
        _CONSTANTS = quartic_constants()
    return _CONSTANTS


def symanzik_map(p: ModelParams) -> SymanzikMap:
    if p.alpha <= 0:
        raise DegenerateMapError("scaling map needs alpha > 0")
    nd = p.n_qubits * p.big_d
    s = (p.alpha**2 / (2.0 * nd)) ** (1.0 / 6.0)
    zeta = (2.0 * nd / p.alpha**2) ** (2.0 / 3.0) * (ALPHA_C - p.alpha)
    return SymanzikMap(s, zeta)


def scaled_energy_prediction(p: ModelParams, qc: QuarticConstants | None = None, order: int = 1) -> float:
    """Ground energy ``eps0`` (units of omega) from the truncated series ``c0 + c1 zeta``."""
    qc = qc or default_constants()
    sm = symanzik_map(p)
    if abs(sm.zeta_scaling) > 2.0:
        warnings.warn(
            f"|zeta| = {abs(sm.zeta_scaling):.3g} > 2: truncated series is unreliable",
            ValidityWarning,
            stacklevel=2,
        )
    nd = p.n_qubits * p.big_d
    e0 = qc.c0 + (qc.c1 * sm.zeta_scaling if order >= 1 else 0.0)
    return 0.5 * (-nd + sm.scale_s**2 * e0)


def _critical_terms(p: ModelParams, qc: QuarticConstants | None):
    qc = qc or default_constants()
    x = 2.0 * p.n_qubits * p.big_d
    return 2.0 * qc.c1 / x ** (2.0 / 3.0), 2.0 * qc.c0 / x ** (4.0 / 3.0)


def sx_finite_size_prediction(p: ModelParams, qc: QuarticConstants | None = None) -> float:
    """``<S_x>/N`` at ``alpha = 1`` to order ``(2ND)**(-4/3)``."""
    lead, second = _critical_terms(p, qc)
    return -1.0 + lead - second


def finite_size_berry_prediction(
    p: ModelParams, qc: QuarticConstants | None = None, leading_only: bool = False
) -> float:
    """``gamma/N`` at ``alpha = 1``; the leading term alone scales as ``N**(-2/3)``."""
    lead, second = _critical_terms(p, qc)
    if leading_only:
        return math.pi * lead
    return math.pi * (lead - second)


def asymptotic_correction(p: ModelParams) -> float:
    """Leading ``1/N`` deviation of ``gamma/N`` from its thermodynamic limit.

    Intended for ``alpha << 1`` or ``alpha >> 1``; a warning is issued
    for ``0.5 < alpha < 2``.
    """
    a = p.alpha
    nd = p.n_qubits * p.big_d
    if 0.5 < a < 2.0:
        warnings.warn(
            f"alpha = {a:g} is outside the asymptotic windows alpha <= 0.5, alpha >= 2",
            ValidityWarning,
            stacklevel=2,
        )
    if a < 1.0:
        return math.pi * a / (2.0 * nd)
    return -math.pi / (nd * a**2)


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    residual: float

    def __iter__(self):
        return iter((self.slope, self.intercept, self.residual))


def fit_critical_exponent(points: Iterable[tuple[float, float]]) -> PowerLawFit:
    """Least-squares line through ``(ln N, ln gamma/N)``.

    ``residual`` is the root-mean-square deviation in log space.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise ValueError("need at least three (N, gamma/N) points")
    if np.any(pts <= 0):
        raise ValueError("N and gamma/N must be positive for a log-log fit")
    x = np.log(pts[:, 0])
    y = np.log(pts[:, 1])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return PowerLawFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))
