"""Dimensionless parameters and closed forms of the adiabatic Dicke model.

All energies are in units of the oscillator frequency (omega = 1). The
canonical parameters are the qubit number ``N``, the adiabaticity ratio
``D = 2*Delta/omega`` and the coupling ``alpha = L**2 / (2*D)`` with
``L = 2*sqrt(2)*lambda/omega``; ``alpha = 1`` is the critical point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InvalidParameterError(ValueError):
    """Raised when model parameters are outside their physical domain."""


@dataclass(frozen=True)
class ModelParams:
    n_qubits: int
    big_d: float
    alpha: float

    def __post_init__(self):
        if isinstance(self.n_qubits, bool) or int(self.n_qubits) != self.n_qubits:
            raise InvalidParameterError(f"n_qubits must be an integer, got {self.n_qubits!r}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "big_d", float(self.big_d))
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.n_qubits < 1:
            raise InvalidParameterError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if not (math.isfinite(self.big_d) and self.big_d > 0):
            raise InvalidParameterError(f"D must be positive, got {self.big_d}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise InvalidParameterError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def big_l(self) -> float:
        return math.sqrt(2.0 * self.big_d * self.alpha)

    @property
    def delta(self) -> float:
        """Qubit transition frequency Delta in units of omega."""
        return self.big_d / 2.0

    @property
    def lam(self) -> float:
        """Qubit-oscillator coupling lambda in units of omega."""
        return self.big_l / (2.0 * math.sqrt(2.0))

    def to_physical(self, omega: float = 1.0) -> tuple[float, float]:
        """Return ``(delta, lam)`` in the frequency units of ``omega``."""
        return self.delta * omega, self.lam * omega


def from_physical(omega: float, delta: float, lam: float, n: int) -> ModelParams:
    """Build :class:`ModelParams` from oscillator/qubit frequencies and coupling."""
    if not omega > 0:
        raise InvalidParameterError(f"omega must be positive, got {omega}")
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    if not lam >= 0:
        raise InvalidParameterError(f"lam must be >= 0, got {lam}")
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n}")
    return ModelParams(int(n), 2.0 * delta / omega, 2.0 * lam**2 / (omega * delta))


def adiabatic_energy(p: ModelParams, q):
    """Qubit energy scale ``E(q) = sqrt(D**2 + L**2 q**2 / N)``.

    The lowest qubit eigenvalue at fixed oscillator coordinate is ``-N E(q)``.
    """
    q = np.asarray(q, dtype=float)
    return np.sqrt(p.big_d**2 + (2.0 * p.big_d * p.alpha / p.n_qubits) * q**2)


def adiabatic_potential(p: ModelParams, q):
    """Born-Oppenheimer potential ``V(q) = (q**2 - N E(q)) / 2`` felt by the oscillator."""
    q = np.asarray(q, dtype=float)
    return 0.5 * (q**2 - p.n_qubits * adiabatic_energy(p, q))


def well_minima(p: ModelParams) -> list[float]:
    """Minimizers of :func:`adiabatic_potential`: ``[0]`` or ``[-q_m, q_m]``."""
    if p.alpha <= 1.0:
        return [0.0]
    q_m = math.sqrt(p.n_qubits) * p.big_d / p.big_l * math.sqrt(p.alpha**2 - 1.0)
    return [-q_m, q_m]


def well_depth(p: ModelParams) -> float:
    """Minimum value of the adiabatic potential."""
    if p.alpha <= 1.0:
        return -p.n_qubits * p.delta
    return -0.5 * p.n_qubits * p.delta * (p.alpha + 1.0 / p.alpha)


def thermo_sx(alpha):
    """``<S_x>/N`` for N -> infinity."""
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(alpha <= 1.0, -1.0, -1.0 / np.maximum(alpha, 1.0))
    return out[()]


def thermo_berry(alpha):
    """Scaled Berry phase ``gamma/N`` for N -> infinity (radians)."""
    alpha = np.asarray(alpha, dtype=float)
    out = np.where(alpha <= 1.0, 0.0, math.pi * (1.0 - 1.0 / np.maximum(alpha, 1.0)))
    return out[()]
