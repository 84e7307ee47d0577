"""Magnetization and Berry phase of the Born-Oppenheimer ground state.

Two routes compute the phase acquired under a 2*pi rotation generated by
``S_x``:

* the reduced route, ``gamma = N pi (1 + <S_x>/N)`` with
  ``<S_x>/N = -integral psi(q)**2 D/E(q) dq``;
* the direct route, a 2D quadrature of the connection ``A(q, phi)`` of the
  qubit product state over the loop and the oscillator density.

Integrating the connection as written gives the negative of the reduced
formula; :data:`LOOP_ORIENTATION` fixes that global sign once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ModelParams, adiabatic_energy
from .schroedinger1d import GridOptions, SpectralResult, WaveFunction, ground_state, richardson

# gamma (reduced formula) == LOOP_ORIENTATION * integral dq psi^2 (loop integral of A)
LOOP_ORIENTATION = -1.0

DEFAULT_K_PHI = 720


@dataclass(frozen=True)
class QubitBlochState:
    """Single-qubit factor ``sin(beta/2)|up> - cos(beta/2) exp(i zeta)|down>``."""

    beta: float
    zeta_qubit: float

    @classmethod
    def at(cls, p: ModelParams, q: float, phi: float) -> "QubitBlochState":
        e = float(adiabatic_energy(p, q))
        a = p.big_l * q / math.sqrt(p.n_qubits)
        cos_beta = min(1.0, max(-1.0, a * math.cos(phi) / e))
        return cls(math.acos(cos_beta), math.atan(a * math.sin(phi) / p.big_d))

    def amplitudes(self) -> np.ndarray:
        """Components on ``(|up>, |down>)``, the eigenbasis of sigma_z."""
        return np.array(
            [math.sin(self.beta / 2), -math.cos(self.beta / 2) * np.exp(1j * self.zeta_qubit)]
        )


@dataclass(frozen=True)
class BerryResult:
    gamma: float
    gamma_per_n: float
    sx_per_n: float
    spectral: SpectralResult


def _sx_single(p: ModelParams, wf: WaveFunction) -> float:
    d_over_e = p.big_d / adiabatic_energy(p, wf.grid.nodes)
    return -float(np.trapezoid(d_over_e * wf.values**2, dx=wf.grid.h))


def sx_mean(p: ModelParams, wf: WaveFunction | SpectralResult) -> float:
    """``<S_x>/N`` for the oscillator ground state.

    Given a refined :class:`SpectralResult`, the value is Richardson
    extrapolated over its two finest grids. Since ``D/E <= 1`` the result
    never lies below -1; round-off that crosses it is clipped.
    """
    if isinstance(wf, SpectralResult):
        sx = _sx_single(p, wf.wavefunction)
        if wf.coarse is not None:
            sx = richardson(sx, _sx_single(p, wf.coarse.wavefunction))
    else:
        sx = _sx_single(p, wf)
    return max(-1.0, sx)


def berry_phase(
    p: ModelParams, tol: float = 1e-9, opts: GridOptions | None = None, spectral: SpectralResult | None = None
) -> BerryResult:
    """Berry phase from the reduced formula ``gamma = N pi (1 + <S_x>/N)``."""
    if spectral is None:
        spectral = ground_state(p, tol=tol, opts=opts)
    sx = sx_mean(p, spectral)
    gamma = p.n_qubits * math.pi * (1.0 + sx)
    return BerryResult(gamma, gamma / p.n_qubits, sx, spectral)


def connection(p: ModelParams, q, phi):
    """Berry connection ``A(q, phi)`` of the N-qubit product state.

    The denominator ``E - a cos(phi)`` is bounded below by ``D**2 / (2E)``.
    """
    q = np.asarray(q, dtype=float)
    phi = np.asarray(phi, dtype=float)
    e = adiabatic_energy(p, q)
    a_cos = p.big_l * q / math.sqrt(p.n_qubits) * np.cos(phi)
    return -(p.n_qubits * p.big_d / (2.0 * e)) * a_cos / (e - a_cos)


def phi_loop_integral(p: ModelParams, q, k_phi: int = DEFAULT_K_PHI):
    """``integral_0^{2 pi} A(q, phi) dphi`` by the periodic trapezoid rule."""
    q = np.asarray(q, dtype=float)
    phi = 2.0 * math.pi * np.arange(k_phi) / k_phi
    vals = connection(p, q[..., None], phi)
    return (2.0 * math.pi / k_phi) * vals.sum(axis=-1)


def phi_loop_closed_form(p: ModelParams, q):
    """Closed form of :func:`phi_loop_integral`: ``-N pi (1 - D/E(q))``."""
    return -p.n_qubits * math.pi * (1.0 - p.big_d / adiabatic_energy(p, q))


def _direct_single(p: ModelParams, wf: WaveFunction, k_phi: int, chunk: int = 4096) -> float:
    q = wf.grid.nodes
    loop = np.empty_like(q)
    for start in range(0, q.size, chunk):
        loop[start : start + chunk] = phi_loop_integral(p, q[start : start + chunk], k_phi)
    return LOOP_ORIENTATION * float(np.trapezoid(loop * wf.values**2, dx=wf.grid.h))


def berry_phase_direct(
    p: ModelParams,
    spectral: SpectralResult | None = None,
    k_phi: int = DEFAULT_K_PHI,
    tol: float = 1e-9,
    opts: GridOptions | None = None,
) -> float:
    """Berry phase by direct quadrature of the connection over ``(q, phi)``.

    Uses the same grids and extrapolation as :func:`berry_phase`, so the two
    routes differ only by the treatment of the loop integral.
    """
    if spectral is None:
        spectral = ground_state(p, tol=tol, opts=opts)
    fine = _direct_single(p, spectral.wavefunction, k_phi)
    if spectral.coarse is None:
        return fine
    return richardson(fine, _direct_single(p, spectral.coarse.wavefunction, k_phi))


class SpacingError(ValueError):
    """Sweep points are not uniformly spaced in alpha."""


def berry_derivative(sweep: Sequence) -> np.ndarray:
    """``d(gamma/N)/d alpha`` along a uniform sweep of records for one ``N``.

    Central differences inside, one-sided at the ends. Records need
    ``alpha`` and ``gamma_per_n`` attributes.
    """
    alphas = np.array([r.alpha for r in sweep], dtype=float)
    values = np.array([r.gamma_per_n for r in sweep], dtype=float)
    if alphas.size < 2:
        raise SpacingError("need at least two sweep points")
    if len({r.n_qubits for r in sweep}) > 1:
        raise ValueError("sweep mixes several qubit numbers")
    steps = np.diff(alphas)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps.mean())) > 1e-9 * max(1.0, abs(steps.mean())):
        raise SpacingError("alpha values must be increasing with uniform spacing")
    return np.gradient(values, steps.mean(), edge_order=1)
