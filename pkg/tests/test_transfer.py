"""Cylinder transfer operators: closed forms, spectra, and phase diagnostics."""

import itertools
import math

import numpy as np
import pytest

from dipeps import families
from dipeps.transfer import (DiagnosticContradiction, TransferError, analytic_transfer,
                             block_spectrum, build_transfer, doubled_w,
                             parity_commutator_residual, topo_diagnostic,
                             transfer_blocks)

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA3 = np.diag([1.0, -1.0])


def two_site_trace_oracle(alpha, beta, flux_pi):
    """Hand-expanded M = 2 trace of the two vertical factors."""
    D = np.diag([alpha, beta])
    X = np.array([[0.0, 1.0 - beta], [1.0 - alpha, 0.0]])
    F = SIGMA3 if flux_pi else np.eye(2)
    out = np.zeros((4, 4))
    for hp1, h1, hp2, h2 in itertools.product(range(2), repeat=4):
        A1 = D if hp1 == h1 else X
        A2 = D if hp2 == h2 else X
        out[2 * hp1 + hp2, 2 * h1 + h2] = np.trace(A1 @ A2 @ F).real
    return out


def test_doubled_w_entries():
    wt = doubled_w(families.w_z2(0.3, 0.8))
    want = np.array([
        [0.3, 0, 0, 0.7],
        [0, 0.8, 0.2, 0],
        [0, 0.7, 0.3, 0],
        [0.2, 0, 0, 0.8],
    ])
    assert np.abs(wt.matrix - want).max() < 1e-15


def test_doubled_w_symmetric_point():
    wt = doubled_w(families.w_z2(0.5, 0.5))
    nz = wt.matrix[np.abs(wt.matrix) > 0]
    assert np.abs(nz - 0.5).max() < 1e-15


def test_doubled_w_diagonal_family():
    wt = doubled_w(families.w_z2(1.0, 1.0))
    assert np.abs(wt.matrix - np.eye(4)).max() == 0.0


def test_doubled_w_rejects_phases():
    W = families.w_parametrized(0.4, 0.9, np.zeros(8), 0.3 * np.ones(16))
    with pytest.raises(TransferError):
        doubled_w(W)


def test_doubled_w_is_elementwise_square():
    W = families.w_z2(0.37, 0.81)
    wt = doubled_w(W)
    assert np.abs(wt.matrix - W.entries.real ** 2).max() < 1e-15


def test_build_transfer_matches_two_site_oracle(rng):
    for _ in range(20):
        a, b = rng.uniform(0, 1, 2)
        for flux, flag in ((0.0, False), (math.pi, True)):
            got = build_transfer(doubled_w(families.w_z2(a, b)), 2, flux)
            assert np.abs(got - two_site_trace_oracle(a, b, flag)).max() < 1e-14


@pytest.mark.parametrize("M", [2, 4, 6])
@pytest.mark.parametrize("flux", [0.0, math.pi])
def test_build_equals_analytic(rng, M, flux):
    for _ in range(8):
        a, b = rng.uniform(0, 1, 2)
        B = build_transfer(doubled_w(families.w_z2(a, b)), M, flux)
        A = analytic_transfer(a, b, M, flux)
        assert np.abs(B - A).max() < 1e-12


def test_analytic_identity_point():
    # alpha = beta = 1 kills every string coefficient; the identity term
    # carries alpha^M + beta^M = 2
    A = analytic_transfer(1.0, 1.0, 4, 0.0)
    assert np.abs(A - 2.0 * np.eye(16)).max() == 0.0
    B = build_transfer(doubled_w(families.w_z2(1.0, 1.0)), 4, 0.0)
    assert np.abs(B - A).max() == 0.0


def test_symmetric_line_product_form(rng):
    # alpha = beta: the operator is the sum of two symmetric products
    a = 0.63
    M = 4
    terms = []
    for sign in (1.0, -1.0):
        P = np.eye(2 ** M)
        for i in range(M):
            fac = a * np.eye(2 ** M)
            ops = [SIGMA1 if j == i else np.eye(2) for j in range(M)]
            s1 = ops[0]
            for o in ops[1:]:
                s1 = np.kron(s1, o)
            P = P @ (a * np.eye(2 ** M) + sign * (1 - a) * s1)
        terms.append(P)
    want = terms[0] + terms[1]
    got = build_transfer(doubled_w(families.w_z2(a, a)), M, 0.0)
    assert np.abs(got - want).max() < 1e-12


def test_flux_pi_vanishes_exactly_on_symmetric_line(rng):
    for a in rng.uniform(0, 1, 5):
        B = build_transfer(doubled_w(families.w_z2(a, a)), 4, math.pi)
        A = analytic_transfer(a, a, 4, math.pi)
        assert np.abs(B).max() == 0.0
        assert np.abs(A).max() == 0.0


def test_toric_point_projector_m4():
    B = build_transfer(doubled_w(families.w_z2(0.5, 0.5)), 4, 0.0)
    plus = np.ones(16) / 4.0
    minus = np.array([(-1.0) ** bin(i).count("1") for i in range(16)]) / 4.0
    P = np.outer(plus, plus) + np.outer(minus, minus)
    assert np.abs(B - P).max() < 1e-14


def test_parity_commutation():
    B = build_transfer(doubled_w(families.w_z2(0.3, 0.9)), 4, 0.0)
    assert parity_commutator_residual(B, 4) < 1e-12


def test_block_spectrum_toric_point():
    blocks = transfer_blocks(0.5, 0.5, 4)
    for parity in ("even", "odd"):
        blk = blocks[(parity, 0.0)]
        assert abs(abs(blk.leading()) - 1.0) < 1e-10
        assert blk.leading_degeneracy() == 1
        assert np.abs(blk.spectrum[1:]).max() < 1e-10
    assert abs(blocks[("even", math.pi)].leading()) < 1e-12


def test_second_eigenvalue_on_complementary_line():
    blocks = transfer_blocks(0.8, 0.2, 6)
    sp = blocks[("even", 0.0)].spectrum
    assert abs(abs(sp[0]) - 1.0) < 1e-10
    assert abs(abs(sp[1]) - (1 - 2 * 0.8) ** 2) < 1e-10


def test_leading_on_symmetric_line():
    M = 6
    blocks = transfer_blocks(0.7, 0.7, M)
    lead = abs(blocks[("even", 0.0)].leading())
    assert abs(lead - (1 + (2 * 0.7 - 1) ** M)) < 1e-10
    assert abs(lead - 1.004096) < 1e-9


def test_parity_leaders_equal(rng):
    for _ in range(6):
        a, b = rng.uniform(0, 1, 2)
        blocks = transfer_blocks(a, b, 4)
        le = abs(blocks[("even", 0.0)].leading())
        lo = abs(blocks[("odd", 0.0)].leading())
        assert abs(le - lo) < 1e-10


def test_gap_on_complementary_line(rng):
    # flux-0 spectral gap 1 - (1-2a)^2; small-a slope within 5% of 4a
    for a in (0.3, 0.45, 0.2):
        blocks = transfer_blocks(a, 1 - a, 6)
        sp = blocks[("even", 0.0)].spectrum
        gap = abs(sp[0]) - abs(sp[1])
        assert abs(gap - (1 - (1 - 2 * a) ** 2)) < 1e-10
    a = 1e-3
    blocks = transfer_blocks(a, 1 - a, 4)
    sp = blocks[("even", 0.0)].spectrum
    gap = abs(sp[0]) - abs(sp[1])
    assert abs(gap / (4 * a) - 1.0) < 0.05


def test_flux_insertion_position_only_relabels():
    """Moving the flux insertion conjugates by a sigma3 string: same spectrum."""
    a, b = 0.35, 0.85
    D = np.diag([a, b])
    X = np.array([[0.0, 1 - b], [1 - a, 0.0]])
    s3 = SIGMA3
    M = 4
    def transfer_with_insertion(k):
        out = np.zeros((2 ** M, 2 ** M))
        for row in range(2 ** M):
            for col in range(2 ** M):
                V = np.eye(2)
                for i in range(M):
                    hp = (row >> (M - 1 - i)) & 1
                    h = (col >> (M - 1 - i)) & 1
                    V = V @ (D if hp == h else X)
                    if i == k:
                        V = V @ s3
                out[row, col] = np.trace(V).real
        return out
    base = transfer_with_insertion(M - 1)
    ref = build_transfer(doubled_w(families.w_z2(a, b)), M, math.pi)
    assert np.abs(base - ref).max() < 1e-13
    ev_ref = np.sort_complex(np.linalg.eigvals(ref))
    for k in range(M - 1):
        other = transfer_with_insertion(k)
        ev = np.sort_complex(np.linalg.eigvals(other))
        assert np.abs(ev - ev_ref).max() < 1e-10


def test_build_transfer_guards():
    wt = doubled_w(families.w_z2(0.5, 0.5))
    with pytest.raises(TransferError):
        build_transfer(wt, 3)          # odd circumference
    with pytest.raises(TransferError):
        build_transfer(wt, 16)         # dense guard


# ---------------------------------------------------------------------------
# diagnostics

def test_topo_diagnostic_toric_point():
    rep = topo_diagnostic(0.5, 0.5, 4)
    assert rep.classification == "toric-code-phase"


def test_topo_diagnostic_ghz_line():
    rep = topo_diagnostic(1.0, 0.3, 4)
    assert rep.classification == "GHZ-point"
    assert rep.degeneracy_grown


def test_topo_diagnostic_origin():
    assert topo_diagnostic(0.0, 0.0, 4).classification == "GHZ-point"


def test_topo_diagnostic_gap_point():
    rep = topo_diagnostic(0.9, 0.1, 6)
    assert rep.classification == "toric-code-phase"
    assert rep.lambda_shift < rep.lambda_same
    assert rep.degeneracy_even == 1


def test_topo_diagnostic_axis_points_are_toric():
    assert topo_diagnostic(0.0, 0.4, 4).classification == "toric-code-phase"
    assert topo_diagnostic(0.4, 0.0, 4).classification == "toric-code-phase"
