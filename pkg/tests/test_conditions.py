"""Condition checks, channel fixed points, gauges, and the canonical form."""

import numpy as np
import pytest

from dipeps import families, gates
from dipeps.conditions import (CheckError, GaugeTriple, canonicalize, check_di,
                               check_dual_isometry, check_dual_unitary,
                               check_generalized, check_isometry, find_fixed_point,
                               gauge_tensor, induced_gauge_triple,
                               transfer_map_left_right, apply_transfer)
from dipeps.contraction import channel_from_tensor
from dipeps.tensors import PepsTensor
from conftest import random_complex


def test_isometry_toric_code():
    T = families.plumbing(families.w_z2(0.5, 0.5))
    assert check_isometry(T, tol=1e-13).passed
    assert check_dual_isometry(T, tol=1e-13).passed


def test_isometry_zero_tensor_residual_is_chi():
    T = PepsTensor(d=2, chi=2, entries=np.zeros((2, 2, 2, 2, 2)))
    rep = check_isometry(T)
    assert abs(rep.residual_iso - 2.0) < 1e-14   # ||I_4||_F = chi


def test_isometry_random_di():
    rep = check_di(families.random_di(2, 2, 17), tol=1e-12)
    assert rep.passed


def test_dual_isometry_controlled_dual_unitary(rng):
    gens = np.random.default_rng(3)
    T = families.controlled_dual_unitary([gates.random_dual_unitary(gens) for _ in range(2)])
    assert check_dual_isometry(T, tol=1e-12).passed


def test_dual_failure_identity_gate_closed_form():
    # the identity sequential gate: dual defect 2 d_{b1,b2} d_{r1,0} d_{r2,0}
    T = families.three_qubit_gate((0, 0, 0), (0, 0, 0), validate=False)
    M = np.tensordot(T.entries, np.conj(T.entries), axes=([0, 1, 4], [0, 1, 4]))
    M = M.transpose(1, 0, 3, 2)   # r1 b1 r2 b2
    want = np.zeros((2, 2, 2, 2))
    for b1 in range(2):
        for b2 in range(2):
            want[0, b1, 0, b2] = 2.0 * (b1 == b2)
    assert np.abs(M - want).max() < 1e-14
    rep = check_dual_isometry(T)
    assert abs(rep.residual_dual - 2.0) < 1e-12
    assert rep.residual_dual > 1.0


def test_check_dual_unitary_swap_exact():
    rep = check_dual_unitary(gates.swap_gate())
    assert rep.residual_iso == 0.0 and rep.residual_dual == 0.0


def test_check_dual_unitary_identity_closed_form():
    # identity is unitary; the dual sum gives chi d_{r1,b1} d_{r2,b2}
    rep = check_dual_unitary(np.eye(4))
    assert rep.residual_iso < 1e-15
    chi = 2
    M = np.zeros((4, 4))
    for r1 in range(2):
        for b1 in range(2):
            for r2 in range(2):
                for b2 in range(2):
                    M[r1 * 2 + b1, r2 * 2 + b2] = chi * (r1 == b1) * (r2 == b2)
    expected = np.linalg.norm(M - np.eye(4))
    assert abs(rep.residual_dual - expected) < 1e-13
    assert rep.residual_dual > 1.0


def test_check_dual_unitary_sampled(rng):
    gens = np.random.default_rng(5)
    for _ in range(5):
        rep = check_dual_unitary(gates.random_dual_unitary(gens), tol=1e-12)
        assert rep.passed


def test_generalized_strict_case_is_identity_gauge():
    T = families.random_di(2, 2, 23)
    rep = check_generalized(T, GaugeTriple.identity(2), tol=1e-12)
    assert rep.passed


def test_generalized_random_tensor_fails(rng):
    T = PepsTensor(d=2, chi=2, entries=random_complex(rng, (2, 2, 2, 2, 2), 0.5))
    rep = check_generalized(T, GaugeTriple.identity(2), tol=1e-8)
    assert not rep.passed


def test_sgs_generalized_with_fixed_point(rng):
    gens = np.random.default_rng(7)
    T = families.sgs_tensor(gates.haar_unitary(4, gens), gates.haar_unitary(4, gens))
    B = find_fixed_point(T)
    rep = check_generalized(T, GaugeTriple(S=np.eye(2), R=np.eye(2), B=B), tol=1e-10)
    assert rep.passed


def test_fixed_point_strict_di_is_maximally_mixed():
    T = families.random_di(2, 2, 31)
    B = find_fixed_point(T)
    assert np.abs(B - np.eye(2) / 2).max() < 1e-10


def test_fixed_point_swap_sgs_is_maximally_mixed(rng):
    gens = np.random.default_rng(11)
    T = families.sgs_tensor(gates.haar_unitary(4, gens), gates.swap_gate())
    B = find_fixed_point(T)
    assert np.abs(B - np.eye(2) / 2).max() < 1e-10
    # a dual-unitary V makes the strict dual condition hold as well
    assert check_dual_isometry(T, tol=1e-12).passed


def test_fixed_point_properties(rng):
    gens = np.random.default_rng(13)
    for _ in range(5):
        T = families.sgs_tensor(gates.haar_unitary(4, gens), gates.haar_unitary(4, gens))
        B = find_fixed_point(T)
        evals = np.linalg.eigvalsh(B)
        assert evals.min() > -1e-10
        assert abs(np.trace(B) - 1.0) < 1e-12
        N = transfer_map_left_right(T)
        assert np.linalg.norm(apply_transfer(N, B) - B) < 1e-10


def test_fixed_point_requires_isometry(rng):
    T = PepsTensor(d=2, chi=2, entries=random_complex(rng, (2, 2, 2, 2, 2), 0.3))
    with pytest.raises(CheckError):
        find_fixed_point(T)


def test_fixed_point_power_method_agrees():
    gens = np.random.default_rng(19)
    T = families.sgs_tensor(gates.haar_unitary(4, gens), gates.haar_unitary(4, gens))
    Bd = find_fixed_point(T, method="dense")
    Bp = find_fixed_point(T, method="power")
    assert np.abs(Bd - Bp).max() < 1e-8


def test_trace_preservation_bound():
    # TP residual of the channel is within 1e-14 of the isometry residual
    for seed in range(4):
        T = families.random_di(2, 2, seed)
        ch = channel_from_tensor(T)
        iso = check_isometry(T).residual_iso
        assert ch.trace_preserving_residual() <= iso + 1e-14


# ---------------------------------------------------------------------------
# canonical form

def test_canonicalize_idempotent_on_canonical_point():
    T = families.random_di(2, 2, 3)
    form = canonicalize(T, GaugeTriple.identity(2))
    assert np.abs(form.lam - 1.0).max() < 1e-10
    again = canonicalize(form.tensor, GaugeTriple(S=np.eye(2), R=np.eye(2),
                                                  B=np.diag(form.lam)))
    assert abs(again.residual_iso - form.residual_iso) < 1e-12
    assert abs(again.residual_dual - form.residual_dual) < 1e-12


def test_canonicalize_sgs_pipeline():
    gens = np.random.default_rng(29)
    T = families.sgs_tensor(gates.haar_unitary(4, gens), gates.haar_unitary(4, gens))
    B = find_fixed_point(T)
    form = canonicalize(T, GaugeTriple(S=np.eye(2), R=np.eye(2), B=B))
    assert form.residual_iso < 1e-10 and form.residual_dual < 1e-10
    assert np.all(np.diff(form.lam) <= 1e-12)      # descending
    assert form.lam.min() > 0


def test_canonicalize_gauge_round_trip():
    gens = np.random.default_rng(37)
    T = families.random_di(2, 2, 41)
    for _ in range(5):
        A = gates.haar_unitary(2, gens) @ np.diag(gens.uniform(0.5, 2.0, 2))
        C = gates.haar_unitary(2, gens) @ np.diag(gens.uniform(0.5, 2.0, 2))
        gauged = gauge_tensor(T, A, C)
        triple = induced_gauge_triple(A, C)
        # the gauged tensor satisfies the generalized conditions with this triple
        assert check_generalized(gauged, triple, tol=1e-9).passed
        form = canonicalize(gauged, triple)
        assert form.residual_iso < 1e-9 and form.residual_dual < 1e-9
        # the strict tensor has Lambda = I up to scale
        lam = form.lam / form.lam.max()
        assert np.abs(lam - 1.0).max() < 1e-9


def test_lambda_invariant_under_unitary_pregauge():
    gens = np.random.default_rng(43)
    T = families.random_di(2, 2, 47)
    base = canonicalize(T, GaugeTriple.identity(2)).lam
    for _ in range(5):
        U = gates.haar_unitary(2, gens)
        gauged = gauge_tensor(T, U, np.eye(2))
        triple = induced_gauge_triple(U, np.eye(2))
        lam = canonicalize(gauged, triple).lam
        assert np.abs(np.sort(lam) - np.sort(base)).max() < 1e-9


def test_canonicalize_rejects_nonpositive_gauge():
    T = families.random_di(2, 2, 53)
    bad = GaugeTriple(S=np.diag([1.0, -0.2]), R=np.eye(2), B=np.eye(2))
    with pytest.raises(CheckError):
        canonicalize(T, bad)


def test_generalized_documented_gauge_over_families():
    """Every strict constructor passes the generalized check with identities."""
    import math
    gens = np.random.default_rng(59)
    members = [
        families.permutation_phase(2, np.exp(1j * gens.uniform(0, 2 * math.pi, 8))),
        families.three_qubit_gate((0, math.pi / 4, 0.9), (0.1, 0.4, math.pi / 4)),
        families.controlled_dual_unitary([gates.random_dual_unitary(gens) for _ in range(2)]),
        families.plumbing(families.w_z2(0.4, 0.9)),
        families.random_di(2, 2, 61),
    ]
    for T in members:
        assert check_generalized(T, GaugeTriple.identity(T.chi), tol=1e-10).passed
