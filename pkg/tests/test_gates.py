"""Gate helpers: Haar sampling, the dual-unitary parametrization, Pauli exponentials."""

import math

import numpy as np
import pytest

from dipeps.gates import (GateError, SIGMA, dual_unitarity_residuals, dual_unitary_qubit,
                          haar_unitary, kernel_gate, random_dual_unitary, require_unitary,
                          space_reshuffle, swap_gate, two_site_pauli_exponential,
                          unitarity_residual)


def test_haar_unitary_is_unitary(rng):
    for n in (2, 4, 7):
        U = haar_unitary(n, rng)
        assert unitarity_residual(U) < 1e-13


def test_swap_is_dual_unitary():
    ru, rd = dual_unitarity_residuals(swap_gate())
    assert ru == 0.0 and rd == 0.0


def test_kernel_gate_closed_form_matches_exponential():
    # cos/sin closed form against an explicit series evaluation
    J = 0.437
    XX = np.kron(SIGMA[1], SIGMA[1])
    YY = np.kron(SIGMA[2], SIGMA[2])
    ZZ = np.kron(SIGMA[3], SIGMA[3])
    H = (math.pi / 4) * (XX + YY) + J * ZZ
    w, V = np.linalg.eigh(H)
    ref = (V * np.exp(-1j * w)) @ V.conj().T
    assert np.abs(kernel_gate(J) - ref).max() < 1e-12


def test_parametrized_family_is_dual_unitary(rng):
    for _ in range(10):
        V = dual_unitary_qubit(J=rng.uniform(0, 2 * math.pi),
                               up=haar_unitary(2, rng), um=haar_unitary(2, rng),
                               vm=haar_unitary(2, rng), vp=haar_unitary(2, rng),
                               phase=rng.uniform(0, 2 * math.pi))
        ru, rd = dual_unitarity_residuals(V)
        assert max(ru, rd) < 1e-13


def test_random_dual_unitary_revalidates(rng):
    V = random_dual_unitary(rng)
    ru, rd = dual_unitarity_residuals(V)
    assert max(ru, rd) < 1e-12


def test_space_reshuffle_entries(rng):
    V = random_dual_unitary(rng)
    Vt = space_reshuffle(V, 2)
    for t in range(2):
        for r in range(2):
            for l in range(2):
                for b in range(2):
                    assert Vt[r * 2 + b, t * 2 + l] == V[t * 2 + r, l * 2 + b]


def test_space_reshuffle_fixes_swap():
    assert np.abs(space_reshuffle(swap_gate(), 2) - swap_gate()).max() == 0.0


def test_pauli_exponential_identity_angle():
    U = two_site_pauli_exponential(0.0, 1, 3, 0, 1)
    assert np.abs(U - np.eye(8)).max() == 0.0


def test_pauli_exponential_square_root_structure():
    # exp(i theta P)^2 = exp(2 i theta P) for P^2 = I
    U1 = two_site_pauli_exponential(0.3, 2, 2, 0, 1)
    U2 = two_site_pauli_exponential(0.6, 2, 2, 0, 1)
    assert np.abs(U1 @ U1 - U2).max() < 1e-13


def test_pauli_exponentials_commute_on_same_pair():
    A = two_site_pauli_exponential(0.4, 1, 3, 1, 2)
    B = two_site_pauli_exponential(0.9, 2, 3, 1, 2)
    assert np.abs(A @ B - B @ A).max() < 1e-13


def test_require_unitary_raises():
    with pytest.raises(GateError):
        require_unitary(np.ones((3, 3)))
