"""Unitary gate helpers: Pauli algebra, Haar sampling, dual-unitary two-qubit gates.

Two-qubit gates are stored as matrices with row index ``(t, r)`` and column
index ``(l, b)``, i.e. the first output leg points up and the second to the
right when the gate sits inside a PEPS diagram.  Dual unitarity means the
reshuffled matrix ``V~[(r,b),(t,l)] = V[(t,r),(l,b)]`` is unitary as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


class GateError(ValueError):
    """Raised for gates violating a required unitarity property."""


@dataclass(frozen=True)
class Gate:
    """Dense gate with explicit input and output leg extents."""

    dims_in: tuple
    dims_out: tuple
    entries: np.ndarray

    def __post_init__(self):
        din = math.prod(self.dims_in)
        dout = math.prod(self.dims_out)
        arr = np.asarray(self.entries, dtype=complex).reshape(dout, din)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "dims_in", tuple(self.dims_in))
        object.__setattr__(self, "dims_out", tuple(self.dims_out))

    @classmethod
    def two_qubit(cls, matrix) -> "Gate":
        return cls(dims_in=(2, 2), dims_out=(2, 2), entries=matrix)


def as_gate_matrix(V, side=None) -> np.ndarray:
    """Accept a Gate or a bare square matrix and return the dense matrix."""
    if isinstance(V, Gate):
        M = V.entries
    else:
        M = np.asarray(V, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise GateError(f"expected a square gate matrix, got shape {M.shape}")
    if side is not None and M.shape[0] != side:
        raise GateError(f"expected a {side}x{side} gate, got {M.shape[0]}")
    return M


def unitarity_residual(M: np.ndarray) -> float:
    n = M.shape[0]
    return float(np.linalg.norm(M.conj().T @ M - np.eye(n)))


def require_unitary(M, tol=1e-12, what="gate") -> np.ndarray:
    M = as_gate_matrix(M)
    res = unitarity_residual(M)
    if res > tol:
        raise GateError(f"{what} is not unitary: ||U^dag U - I|| = {res:.3e} > {tol:g}")
    return M


def space_reshuffle(V: np.ndarray, chi: int) -> np.ndarray:
    """Reorder V[(t,r),(l,b)] into V~[(r,b),(t,l)]."""
    Vt = V.reshape(chi, chi, chi, chi)           # t r l b
    Vt = Vt.transpose(1, 3, 0, 2)                # r b t l
    return Vt.reshape(chi * chi, chi * chi)


def dual_unitarity_residuals(V, chi=2) -> tuple:
    """Return (unitarity residual, dual contraction residual) of a two-site gate."""
    M = as_gate_matrix(V, side=chi * chi)
    Mt = space_reshuffle(M, chi)
    return unitarity_residual(M), unitarity_residual(Mt)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random U(n) via QR of a complex Gaussian with phase fixing."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph


def kernel_gate(J: float) -> np.ndarray:
    """Non-local core exp(-i(pi/4 XX + pi/4 YY + J ZZ)) of the qubit dual-unitary form."""
    eJm = np.exp(-1j * J)
    eJp = np.exp(1j * J)
    return np.array([
        [eJm, 0, 0, 0],
        [0, 0, -1j * eJp, 0],
        [0, -1j * eJp, 0, 0],
        [0, 0, 0, eJm],
    ])


def dual_unitary_qubit(J: float, up=None, um=None, vm=None, vp=None, phase=0.0) -> np.ndarray:
    """Qubit dual-unitary gate e^{i phase} (up (x) um) K(J) (vm (x) vp)."""
    up = np.eye(2) if up is None else np.asarray(up, dtype=complex)
    um = np.eye(2) if um is None else np.asarray(um, dtype=complex)
    vm = np.eye(2) if vm is None else np.asarray(vm, dtype=complex)
    vp = np.eye(2) if vp is None else np.asarray(vp, dtype=complex)
    return np.exp(1j * phase) * (np.kron(up, um) @ kernel_gate(J) @ np.kron(vm, vp))


def random_dual_unitary(rng: np.random.Generator, tol=1e-12) -> np.ndarray:
    """Sample a random qubit dual-unitary gate and re-validate both identities."""
    V = dual_unitary_qubit(
        J=2 * math.pi * rng.random(),
        up=haar_unitary(2, rng), um=haar_unitary(2, rng),
        vm=haar_unitary(2, rng), vp=haar_unitary(2, rng),
        phase=2 * math.pi * rng.random(),
    )
    ru, rd = dual_unitarity_residuals(V)
    if max(ru, rd) > tol:
        raise GateError(f"sampled gate failed re-validation: {ru:.2e}, {rd:.2e}")
    return V


def swap_gate(chi: int = 2) -> np.ndarray:
    S = np.eye(chi * chi).reshape(chi, chi, chi, chi)
    return S.transpose(0, 1, 3, 2).reshape(chi * chi, chi * chi)


def two_site_pauli_exponential(theta: float, alpha: int, n_qubits: int, i: int, j: int) -> np.ndarray:
    """exp(i theta sigma^alpha_i sigma^alpha_j) on n_qubits qubits.

    (sigma sigma)^2 = I, so the exponential is cos(theta) I + i sin(theta) P.
    """
    P = np.array([[1.0 + 0j]])
    for q in range(n_qubits):
        P = np.kron(P, SIGMA[alpha] if q in (i, j) else SIGMA[0])
    n = 2 ** n_qubits
    return math.cos(theta) * np.eye(n) + 1j * math.sin(theta) * P
