"""Brickwork simulation, the lattice encoding, and post-selected equivalence."""

import math

import numpy as np
import pytest

from dipeps import circuit as CC
from dipeps.circuit import (CircuitError, DuCircuit, Pin, PostselectPattern,
                            brickwork_pairs, check_encoding, encode, epr_chain_state,
                            postselect_contract, postselect_probability,
                            random_brickwork, simulate_circuit, swap_circuit)
from dipeps.conditions import check_di
from dipeps.contraction import Lattice, dense_state
from dipeps.families import random_di
from dipeps.gates import haar_unitary, random_dual_unitary, swap_gate


def full_matrix_simulator(c: DuCircuit) -> np.ndarray:
    """Gate-by-gate full-matrix oracle for the state-vector simulator."""
    w = c.width
    psi = epr_chain_state(w)
    for layer in c.layers:
        U = np.eye(2 ** w, dtype=complex)
        for (a, V) in layer:
            G = np.array([[1.0]], dtype=complex)
            pos = 1
            while pos <= w:
                if pos == a:
                    G = np.kron(G, V)
                    pos += 2
                else:
                    G = np.kron(G, np.eye(2))
                    pos += 1
            U = G @ U
        psi = U @ psi
    return psi


def test_brickwork_pair_convention():
    assert brickwork_pairs(4, 1) == [2]
    assert brickwork_pairs(4, 2) == [1, 3]
    assert brickwork_pairs(5, 1) == [2, 4]
    assert brickwork_pairs(5, 2) == [1, 3]


def test_epr_chain_state():
    psi = epr_chain_state(2)
    want = np.zeros(4)
    want[0] = want[3] = 1 / math.sqrt(2)
    assert np.abs(psi - want).max() < 1e-15
    psi3 = epr_chain_state(3)
    assert abs(np.linalg.norm(psi3) - 1) < 1e-15
    assert abs(psi3[0] - 1 / math.sqrt(2)) < 1e-15   # |000> component


def test_simulate_zero_layers_is_initial_state():
    c = DuCircuit(width=4, layers=())
    assert np.abs(simulate_circuit(c) - epr_chain_state(4)).max() < 1e-15


def test_simulate_vs_full_matrix_oracle():
    for seed in range(4):
        c = random_brickwork(4, 3, seed)
        got = simulate_circuit(c)
        ref = full_matrix_simulator(c)
        assert np.abs(got - ref).max() < 1e-12


def test_simulate_swap_circuit_permutes_wires():
    c = swap_circuit(4, 1)   # layer 1 swaps wires (2, 3)
    psi = simulate_circuit(c).reshape(2, 2, 2, 2)
    ref = epr_chain_state(4).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
    assert np.abs(psi - ref).max() < 1e-15


def test_circuit_rejects_non_dual_unitary():
    rng = np.random.default_rng(0)
    with pytest.raises(CircuitError):
        DuCircuit(width=2, layers=((), ((1, haar_unitary(4, rng)),)))


def test_circuit_rejects_wrong_parity():
    with pytest.raises(CircuitError):
        DuCircuit(width=4, layers=(((1, swap_gate()),),))   # layer 1 is even-start


def test_simulator_width_guard():
    with pytest.raises(CircuitError):
        simulate_circuit(DuCircuit(width=13, layers=()))


# ---------------------------------------------------------------------------
# encoding

def test_encode_depth0_reads_out_epr_chain():
    enc = encode(DuCircuit(width=2, layers=()))
    chk = check_encoding(enc)
    assert chk.fidelity > 1 - 1e-9
    assert abs(chk.postselect_probability - 1.0) < 1e-9


def test_encode_swap_circuit():
    enc = encode(swap_circuit(3, 2))
    chk = check_encoding(enc)
    assert chk.fidelity > 1 - 1e-9


def test_encode_all_tensors_pass_conditions():
    enc = encode(random_brickwork(3, 2, 5))
    assert enc.lattice.check(tol=1e-12) < 1e-12


def test_encode_random_circuits_match_simulator():
    for (w, D, seed) in [(2, 1, 0), (2, 2, 1), (3, 1, 2), (3, 2, 3)]:
        enc = encode(random_brickwork(w, D, seed))
        chk = check_encoding(enc)
        assert chk.fidelity > 1 - 1e-9, (w, D)
        assert abs(chk.postselect_probability - chk.expected_probability) < 1e-9


def test_encode_probability_analytic():
    enc = encode(random_brickwork(2, 2, 9))
    # one left and one right transmitter: probability (1/4)^2
    assert abs(enc.expected_probability - 1 / 16) < 1e-15
    assert abs(postselect_probability(enc.lattice, enc.pattern)
               - enc.expected_probability) < 1e-9


def test_encode_readout_in_wire_order():
    enc = encode(random_brickwork(3, 2, 11))
    wires = [w for w, _ in enc.readout]
    assert wires == [1, 2, 3]
    for _, site in enc.readout:
        assert site[0] in ("top", "right")


def test_encode_placements_cover_four_colors():
    enc = encode(random_brickwork(4, 2, 13))
    colors = set()
    for color in enc.placements.values():
        colors.add(color.split("_")[0])
    assert {"grey", "dark", "light", "orange"} <= colors


# ---------------------------------------------------------------------------
# post-selected contraction

def test_postselect_empty_pattern_is_dense_state():
    lat = Lattice.uniform(1, 1, random_di(2, 2, 3))
    (sites, psi), norm = postselect_contract(lat, PostselectPattern(pins={}))
    ref = dense_state(lat)
    assert sites == ref.sites
    assert np.abs(psi - ref.psi).max() < 1e-14
    assert abs(norm - 1.0) < 1e-10


def test_postselect_full_pattern_single_amplitude():
    lat = Lattice.uniform(1, 1, random_di(2, 1, 4))   # chi = 1 product lattice
    ref = dense_state(lat)
    pins = {site: Pin(kind="full", value=0) for site, _ in lat.sites()}
    (sites, psi), norm = postselect_contract(lat, PostselectPattern(pins=pins))
    assert psi.shape == ()
    assert abs(abs(psi) - abs(ref.psi[(0,) * ref.psi.ndim])) < 1e-12


def test_postselect_probability_matches_dense():
    lat = Lattice.uniform(1, 2, random_di(2, 2, 6))
    pins = {("bottom", 1): Pin(kind="full", value=0)}
    pattern = PostselectPattern(pins=pins)
    _, norm = postselect_contract(lat, pattern)
    prob = postselect_probability(lat, pattern)
    assert abs(prob - norm ** 2) < 1e-10


def test_postselect_zero_probability_reported():
    from dipeps import families
    lat = Lattice.uniform(1, 1, families.plumbing(families.w_z2(0.5, 0.5)))
    # the copy pattern (l, b, r, t) = (0, 0, 0, 1) has zero weight in W
    pins = {("bulk", 1, 1): Pin(kind="full", value=1)}
    with pytest.raises(CircuitError, match="vanishing"):
        postselect_contract(lat, PostselectPattern(pins=pins))


def test_factor_pin_projectors():
    p1 = Pin(kind="factor", factor=1, value=2)
    P = p1.projector(16)
    assert np.abs(P @ P - P).max() < 1e-15
    assert abs(np.trace(P) - 4.0) < 1e-15
    with pytest.raises(CircuitError):
        p1.projector(4)


def test_encoding_equivalence_sweep():
    """Twenty random circuits at widths <= 3, depths <= 2."""
    count = 0
    for w in (2, 3):
        for D in (1, 2):
            for seed in range(5):
                enc = encode(random_brickwork(w, D, 1000 + count))
                chk = check_encoding(enc)
                assert chk.fidelity > 1 - 1e-9, (w, D, seed)
                assert chk.postselect_probability > 0
                count += 1
    assert count == 20
