"""Exact diagonalization of the full Dicke Hamiltonian in a truncated basis.

``H = a^dag a + Delta S_x + (lambda/sqrt(N)) (a^dag + a) S_z`` (omega = 1)
acting on ``|n> (x) |j=N/2, m>`` with boson occupations ``0..n_max`` and
collective spin ``S_k = 2 J_k``. Used to validate the Born-Oppenheimer
results at small N.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .model import ModelParams

MAX_DIMENSION = 20000
DENSE_LIMIT = 3000
GAP_THRESHOLD = 1e-8


class OracleError(RuntimeError):
    pass


class DimensionError(OracleError):
    pass


class DegenerateGroundStateError(OracleError):
    pass


@dataclass(frozen=True)
class FockSpinBasis:
    n_max: int
    n_qubits: int

    def __post_init__(self):
        if self.n_max < 0 or self.n_qubits < 1:
            raise ValueError("need n_max >= 0 and n_qubits >= 1")

    @property
    def n_spin(self) -> int:
        return self.n_qubits + 1

    @property
    def dimension(self) -> int:
        return (self.n_max + 1) * self.n_spin

    @property
    def m_values(self) -> np.ndarray:
        """Spin projections ``m = -N/2 .. N/2``."""
        return np.arange(self.n_spin) - self.n_qubits / 2.0


def spin_matrices(n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(J_x, J_z)`` for spin ``j = N/2`` in the ``m`` ascending basis."""
    j = n_qubits / 2.0
    m = np.arange(n_qubits + 1) - j
    # <m+1| J_+ |m>
    up = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jx = 0.5 * (np.diag(up, -1) + np.diag(up, 1))
    return jx, np.diag(m)


def build_hamiltonian(p: ModelParams, basis: FockSpinBasis, max_dimension: int = MAX_DIMENSION):
    """Sparse real symmetric Hamiltonian; index ``n * (N + 1) + (m + N/2)``."""
    if basis.n_qubits != p.n_qubits:
        raise ValueError("basis and parameters disagree on N")
    if basis.dimension > max_dimension:
        raise DimensionError(f"dimension {basis.dimension} exceeds the limit {max_dimension}")
    jx, jz = spin_matrices(p.n_qubits)
    n = np.arange(basis.n_max + 1, dtype=float)
    x = sp.diags([np.sqrt(n[1:]), np.sqrt(n[1:])], [-1, 1])  # a + a^dag
    eye_b = sp.identity(basis.n_max + 1)
    eye_s = sp.identity(basis.n_spin)
    h = (
        sp.kron(sp.diags(n), eye_s)
        + p.delta * sp.kron(eye_b, sp.csr_matrix(2.0 * jx))
        + (p.lam / math.sqrt(p.n_qubits)) * sp.kron(x, sp.csr_matrix(2.0 * jz))
    )
    return sp.csr_matrix(h)


def ground_state(matrix, with_gap: bool = False):
    """Lowest eigenpair ``(E0, v)`` with ``v`` normalized and its largest component positive.

    With ``with_gap`` also returns ``E1 - E0``.
    """
    dim = matrix.shape[0]
    if dim <= DENSE_LIMIT:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
        w, v = np.linalg.eigh(dense)
    else:
        w, v = scipy.sparse.linalg.eigsh(matrix, k=2, which="SA", tol=1e-13)
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    e0 = float(w[0])
    vec = v[:, 0] / np.linalg.norm(v[:, 0])
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    residual = float(np.linalg.norm(matrix @ vec - e0 * vec))
    if residual > 1e-8 * max(1.0, abs(e0)):
        raise OracleError(f"ground state residual {residual:.3g} too large")
    if with_gap:
        return e0, vec, float(w[1] - w[0])
    return e0, vec


def exact_sx(state: np.ndarray, basis: FockSpinBasis) -> float:
    """``<S_x>`` of a normalized state (not divided by N)."""
    jx, _ = spin_matrices(basis.n_qubits)
    psi = np.asarray(state).reshape(basis.n_max + 1, basis.n_spin)
    return float(np.real(np.vdot(psi, psi @ (2.0 * jx).T)))


def fock_top_weight(state: np.ndarray, basis: FockSpinBasis) -> float:
    psi = np.asarray(state).reshape(basis.n_max + 1, basis.n_spin)
    return float(np.sum(np.abs(psi[-1]) ** 2))


def fock_convergence(
    p: ModelParams,
    start: int = 16,
    energy_tol: float = 1e-9,
    weight_tol: float = 1e-10,
    max_dimension: int = MAX_DIMENSION,
) -> FockSpinBasis:
    """Smallest ``n_max = start * 2**k`` whose ground energy is stable under one more doubling."""
    n_max = start
    e0, vec = ground_state(build_hamiltonian(p, FockSpinBasis(n_max, p.n_qubits), max_dimension))
    while True:
        basis = FockSpinBasis(n_max, p.n_qubits)
        bigger = FockSpinBasis(2 * n_max, p.n_qubits)
        e1, vec1 = ground_state(build_hamiltonian(p, bigger, max_dimension))
        if abs(e1 - e0) < energy_tol and fock_top_weight(vec, basis) < weight_tol:
            return basis
        n_max, e0, vec = 2 * n_max, e1, vec1


def rotation(n_qubits: int, angle: float) -> np.ndarray:
    """``exp(-i angle J_x)`` on the spin-``N/2`` block."""
    jx, _ = spin_matrices(n_qubits)
    return scipy.linalg.expm(-1j * angle * jx)


def overlap_phase(states) -> float:
    """``-arg prod_k <psi_k|psi_{k+1}>`` around the closed loop ``psi_K = psi_0``, in ``[0, 2 pi)``."""
    states = list(states)
    prod = 1.0 + 0.0j
    for k in range(len(states)):
        z = np.vdot(states[k], states[(k + 1) % len(states)])
        prod *= z / abs(z)
    gamma = (-cmath.phase(prod)) % (2.0 * math.pi)
    # -0.0 and values a rounding error below 2 pi belong to 0
    return 0.0 if 2.0 * math.pi - gamma < 1e-12 else gamma + 0.0


def loop_states(p: ModelParams, basis: FockSpinBasis, k_steps: int, mode: str = "rotate"):
    """Ground states of ``H(phi_k) = U^dag(phi_k) H U(phi_k)`` at ``phi_k = 2 pi k / K``.

    ``rotate`` applies ``U^dag(phi_k)`` to the ground state of ``H``;
    ``rediagonalize`` diagonalizes every ``H(phi_k)`` (slow, cross-check only).
    """
    h = build_hamiltonian(p, basis)
    e0, psi0, gap = ground_state(h, with_gap=True)
    if gap < GAP_THRESHOLD:
        raise DegenerateGroundStateError(
            f"ground-state gap {gap:.3g} below {GAP_THRESHOLD:g}: quasi-degenerate doublet"
        )
    shape = (basis.n_max + 1, basis.n_spin)
    step = rotation(p.n_qubits, -2.0 * math.pi / k_steps)  # U^dag(dphi)
    if mode == "rotate":
        psi = psi0.reshape(shape).astype(complex)
        out = []
        for _ in range(k_steps):
            out.append(psi.ravel().copy())
            psi = psi @ step.T
        return out
    if mode == "rediagonalize":
        dense = h.toarray()
        out = []
        for k in range(k_steps):
            u = np.kron(np.eye(basis.n_max + 1), rotation(p.n_qubits, 2.0 * math.pi * k / k_steps))
            w, v = np.linalg.eigh(u.conj().T @ dense @ u)
            out.append(v[:, 0])
        return out
    raise ValueError(f"unknown mode {mode!r}")


def discrete_berry(p: ModelParams, basis: FockSpinBasis, k_steps: int = 2000, mode: str = "rotate") -> float:
    """Gauge-invariant overlap-product Berry phase of the ground state, in ``[0, 2 pi)``.

    Equals ``(N pi - pi <S_x>) mod 2 pi`` up to ``O(K**-2)``.
    """
    if k_steps < 100:
        raise ValueError("need at least 100 loop steps")
    return overlap_phase(loop_states(p, basis, k_steps, mode))
