"""Constructors for every tensor family of the class, boundary tensors, and samplers.

All constructors return tensors satisfying both defining contractions (strictly,
or in the generalized sense documented per constructor).  Constructors that can
be handed invalid input validate it and raise; randomness always flows through
an explicit seeded generator, never ambient state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gates
from .conditions import check_dual_unitary
from .gates import haar_unitary, require_unitary, two_site_pauli_exponential
from .tensors import PepsTensor, as_complex_array

BELL_STATES = np.array([
    [1, 0, 0, 1],
    [1, 0, 0, -1],
    [0, 1, 1, 0],
    [0, 1, -1, 0],
], dtype=complex) / math.sqrt(2)   # rows: the four Bell vectors on (q1, q2)


class FamilyError(ValueError):
    """Raised on invalid constructor parameters."""


# ---------------------------------------------------------------------------
# W matrices of the plumbing family

@dataclass(frozen=True)
class WMatrix:
    """chi^2 x chi^2 matrix W_{(l b),(r t)} defining a plumbing tensor."""

    chi: int
    entries: np.ndarray
    params: dict | None = field(default=None)

    def __post_init__(self):
        c2 = self.chi ** 2
        arr = as_complex_array(self.entries, (c2, c2))
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)


def w_z2(alpha: float, beta: float) -> WMatrix:
    """Z2-symmetric chi=2 W matrix, phases omitted; alpha, beta in [0, 1]."""
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        raise FamilyError(f"alpha, beta must lie in [0, 1], got ({alpha}, {beta})")
    sa, sa1 = math.sqrt(alpha), math.sqrt(1.0 - alpha)
    sb, sb1 = math.sqrt(beta), math.sqrt(1.0 - beta)
    W = np.array([
        [sa, 0, 0, sa1],
        [0, sb, sb1, 0],
        [0, sa1, sa, 0],
        [sb1, 0, 0, sb],
    ], dtype=complex)
    return WMatrix(chi=2, entries=W, params={"alpha": alpha, "beta": beta})


def w_parametrized(alpha: float, beta: float, theta, phi) -> WMatrix:
    """General chi=2 W matrix from the full angle parametrization.

    theta has 8 entries and phi 16; alpha and beta are angles here (the Z2 form
    of w_z2 corresponds to alpha_z2 = cos^2 alpha with all theta = phi = 0).
    """
    th = np.asarray(theta, dtype=float)
    ph = np.asarray(phi, dtype=float)
    if th.shape != (8,) or ph.shape != (16,):
        raise FamilyError("need 8 theta angles and 16 phi angles")
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    e = np.exp(1j * ph)
    c, s = np.cos(th), np.sin(th)
    W = np.array([
        [ca * c[0] * e[0],  ca * s[0] * e[1],  sa * s[1] * e[2],  sa * c[1] * e[3]],
        [cb * s[4] * e[8],  cb * c[4] * e[9],  sb * c[5] * e[10], sb * s[5] * e[11]],
        [sa * s[2] * e[4],  sa * c[2] * e[5],  ca * c[3] * e[6],  ca * s[3] * e[7]],
        [sb * c[6] * e[12], sb * s[6] * e[13], cb * s[7] * e[14], cb * c[7] * e[15]],
    ])
    return WMatrix(chi=2, entries=W,
                   params={"alpha": alpha, "beta": beta, "theta": th.tolist(), "phi": ph.tolist()})


def plumbing(W: WMatrix) -> PepsTensor:
    """Plumbing tensor: the physical leg copies all four virtual legs, weighted by W.

    Physical dimension is chi^4 with the copies ordered (l, b, r, t) row-major.
    """
    c = W.chi
    Wt = W.entries.reshape(c, c, c, c)  # l b r t
    T = np.zeros((c ** 4, c, c, c, c), dtype=complex)
    for l in range(c):
        for b in range(c):
            for r in range(c):
                for t in range(c):
                    p = ((l * c + b) * c + r) * c + t
                    T[p, l, b, r, t] = Wt[l, b, r, t]
    return PepsTensor(d=c ** 4, chi=c, entries=T)


# ---------------------------------------------------------------------------
# Single-site dressings

def apply_singles(T: PepsTensor, singles: dict | None, tol: float = 1e-12) -> PepsTensor:
    """Apply unitary single-leg gates, keyed by leg name in {p, l, b, r, t}."""
    if not singles:
        return T
    out = T.entries
    legs = {"p": 0, "l": 1, "b": 2, "r": 3, "t": 4}
    for leg, U in singles.items():
        if leg not in legs:
            raise FamilyError(f"unknown leg {leg!r}")
        want = T.d if leg == "p" else T.chi
        U = require_unitary(np.asarray(U, dtype=complex), tol=tol, what=f"single-site gate on {leg}")
        if U.shape != (want, want):
            raise FamilyError(f"gate on leg {leg} must be {want}x{want}")
        out = np.moveaxis(np.tensordot(U, out, axes=([1], [legs[leg]])), 0, legs[leg])
    return PepsTensor(d=T.d, chi=T.chi, entries=out)


# ---------------------------------------------------------------------------
# Gate-built families

def permutation_phase(chi: int, D=None, singles: dict | None = None) -> PepsTensor:
    """Shift-permutation times a diagonal phase gate, sliced at ancilla |0>.

    The three-leg cyclic shift routes (l, b, ancilla) -> (p, r, t) as
    p <- ancilla, r <- l, t <- b, so the tensor is
    T^p_{lbrt} = D_{l,b,0} delta_{p,0} delta_{r,l} delta_{t,b}.
    Requires d = chi.  D is the diagonal of a chi^3 phase gate (or the full
    matrix, which must be diagonal with unit-modulus entries).
    """
    if D is None:
        diag = np.ones(chi ** 3, dtype=complex)
    else:
        D = np.asarray(D, dtype=complex)
        if D.ndim == 2:
            if D.shape != (chi ** 3, chi ** 3):
                raise FamilyError(f"diagonal gate must act on chi^3 = {chi ** 3}")
            if np.abs(D - np.diag(np.diag(D))).max() > 1e-14:
                raise FamilyError("gate is not diagonal in the computational basis")
            diag = np.diag(D).copy()
        else:
            diag = D.reshape(-1)
            if diag.size != chi ** 3:
                raise FamilyError(f"diagonal must have chi^3 = {chi ** 3} entries")
    if np.abs(np.abs(diag) - 1.0).max() > 1e-12:
        raise FamilyError("diagonal entries must have unit modulus")
    diag = diag.reshape(chi, chi, chi)
    T = np.zeros((chi, chi, chi, chi, chi), dtype=complex)
    for l in range(chi):
        for b in range(chi):
            T[0, l, b, l, b] = diag[l, b, 0]
    return apply_singles(PepsTensor(d=chi, chi=chi, entries=T), singles)


_BRANCH_TOL = 1e-9


def _three_qubit_branches(Q, J) -> tuple:
    """Distances from the two published solution branches (0 means on-branch)."""
    q1, q2, q3 = Q
    j1, j2, j3 = J
    # branch 1: Q1 = 0, Q2 = pi/4, J3 = pi/4 (modulo the Pauli-absorbing period)
    b1 = max(abs(math.sin(2 * q1)), abs(math.cos(2 * q2)), abs(math.cos(2 * j3)))
    # branch 2: Q2 = pi/4 and cos(2 J1) cos(2 Q3) = cos(2 J2) cos(2 Q3) = 0
    b2 = max(abs(math.cos(2 * q2)),
             abs(math.cos(2 * j1) * math.cos(2 * q3)),
             abs(math.cos(2 * j2) * math.cos(2 * q3)))
    return b1, b2


def three_qubit_gate(Q, J, singles: dict | None = None, validate: bool = True) -> PepsTensor:
    """d = chi = 2 family built from Pauli-exponential couplings on three qubits.

    The sequential gate routes inputs (b, l, ancilla) on wires (1, 2, 3) to
    outputs (p, t, r): the Q couplings exp(i Q_a sigma^a sigma^a) act on wires
    (2, 3) first, the J couplings on wires (1, 2) after, and the ancilla enters
    in |0>.  This is the unique wire routing under which both published
    solution branches satisfy the dual condition.  Parameters must lie on one
    of the two branches; off-branch input raises with both condition residuals
    reported.
    """
    Q = tuple(float(q) for q in Q)
    J = tuple(float(j) for j in J)
    if len(Q) != 3 or len(J) != 3:
        raise FamilyError("Q and J must each have three components")
    U = np.eye(8, dtype=complex)
    for alpha in (1, 2, 3):
        U = two_site_pauli_exponential(Q[alpha - 1], alpha, 3, 1, 2) @ U
    for beta in (1, 2, 3):
        U = two_site_pauli_exponential(J[beta - 1], beta, 3, 0, 1) @ U
    Ut = U.reshape(2, 2, 2, 2, 2, 2)         # outputs (p t r), inputs (b l a)
    T = Ut[..., 0].transpose(0, 4, 3, 2, 1)  # p t r b l -> p l b r t
    tensor = PepsTensor(d=2, chi=2, entries=T)
    if validate:
        b1, b2 = _three_qubit_branches(Q, J)
        if min(b1, b2) > _BRANCH_TOL:
            from .conditions import check_di
            rep = check_di(tensor)
            raise FamilyError(
                "parameters lie on neither solution branch "
                f"(branch distances {b1:.3e}, {b2:.3e}); condition residuals would be "
                f"iso={rep.residual_iso:.3e}, dual={rep.residual_dual:.3e}")
    return apply_singles(tensor, singles)


def controlled_dual_unitary(V_list, singles: dict | None = None, tol: float = 1e-12) -> PepsTensor:
    """T^p_{lbrt} = d^{-1/2} V^p_{(t,r),(l,b)} with every V^p dual-unitary."""
    mats = []
    for i, V in enumerate(V_list):
        M = gates.as_gate_matrix(V)
        rep = check_dual_unitary(M, tol=tol, chi=int(round(math.sqrt(M.shape[0]))))
        if not rep.passed:
            raise FamilyError(
                f"gate {i} is not dual-unitary: unitarity {rep.residual_iso:.3e}, "
                f"dual {rep.residual_dual:.3e}")
        mats.append(M)
    d = len(mats)
    chi = int(round(math.sqrt(mats[0].shape[0])))
    T = np.zeros((d, chi, chi, chi, chi), dtype=complex)
    for p, M in enumerate(mats):
        Vt = M.reshape(chi, chi, chi, chi)       # t r l b
        T[p] = Vt.transpose(2, 3, 1, 0) / math.sqrt(d)  # l b r t
    return apply_singles(PepsTensor(d=d, chi=chi, entries=T), singles)


def sgs_tensor(U, V, tol: float = 1e-12) -> PepsTensor:
    """Sequentially generated tensor T^p_{lbrt} = sum_k U^{(p,t)}_{(b,k)} V^{(k,r)}_{(l,0)}.

    U and V are unitaries on chi*chi with d = chi.  The result is isometric
    strictly and dual-isometric in the generalized sense, with the B matrix
    given by the channel fixed point.
    """
    U = require_unitary(U, tol=tol, what="U")
    V = require_unitary(V, tol=tol, what="V")
    chi = int(round(math.sqrt(U.shape[0])))
    if U.shape != (chi * chi, chi * chi) or V.shape != U.shape:
        raise FamilyError("U and V must both act on chi x chi")
    Ut = U.reshape(chi, chi, chi, chi)   # p t b k
    Vt = V.reshape(chi, chi, chi, chi)   # k r l a
    T = np.einsum("ptbk,krl->plbrt", Ut, Vt[..., 0])
    return PepsTensor(d=chi, chi=chi, entries=T)


# ---------------------------------------------------------------------------
# U(1)-symmetric block construction

ALLOWED_U1_BLOCKS = (
    # (Q, s_l, s_b, s_r, s_t) with s = +1/2 encoded as +1 and -1/2 as -1
    (1, +1, +1, -1, -1),
    (0, -1, +1, +1, -1),
    (0, +1, -1, -1, +1),
    (-1, -1, -1, +1, +1),
)


@dataclass(frozen=True)
class ChargeBlockSpec:
    """Block assignment for the charge-conserving construction.

    Keys are (Q, s_l, s_b, s_r, s_t) restricted to the four allowed patterns;
    values are inner tensors shaped (d_inner, chi_inner, ..., chi_inner).
    """

    chi_inner: int
    d_inner: int
    blocks: dict

    def __post_init__(self):
        for key, Y in self.blocks.items():
            if tuple(key) not in ALLOWED_U1_BLOCKS:
                raise FamilyError(f"forbidden charge block {key}")
            q, sl, sb, sr, st = key
            if 2 * q + (sr + st - sl - sb) / 2 != 0:
                raise FamilyError(f"block {key} violates local charge conservation")
            want = (self.d_inner,) + (self.chi_inner,) * 4
            if np.asarray(Y).shape != want:
                raise FamilyError(f"block {key} has shape {np.asarray(Y).shape}, want {want}")
        object.__setattr__(self, "blocks", dict(self.blocks))


def u1_tensor(spec: ChargeBlockSpec) -> PepsTensor:
    """Assemble the block-sparse charge-conserving tensor densely.

    Bond dimension is 2*chi_inner (charge +1/2 sector first) and physical
    dimension 3*d_inner (charge sectors ordered Q = +1, 0, -1).
    """
    ci, di = spec.chi_inner, spec.d_inner
    chi, d = 2 * ci, 3 * di
    q_index = {1: 0, 0: 1, -1: 2}
    s_index = {+1: 0, -1: 1}
    T = np.zeros((d, chi, chi, chi, chi), dtype=complex)
    for key, Y in spec.blocks.items():
        q, sl, sb, sr, st = key
        off = [s_index[s] * ci for s in (sl, sb, sr, st)]
        po = q_index[q] * di
        T[po:po + di,
          off[0]:off[0] + ci, off[1]:off[1] + ci,
          off[2]:off[2] + ci, off[3]:off[3] + ci] = np.asarray(Y, dtype=complex)
    return PepsTensor(d=d, chi=chi, entries=T)


def u1_spin1_spec(V_blocks) -> ChargeBlockSpec:
    """Spin-1 example: each allowed block carries a dual-unitary gate (d_inner = 1)."""
    if len(V_blocks) != 4:
        raise FamilyError("need one gate per allowed block")
    blocks = {}
    for key, V in zip(ALLOWED_U1_BLOCKS, V_blocks):
        M = gates.as_gate_matrix(V, side=4)
        rep = check_dual_unitary(M)
        if not rep.passed:
            raise FamilyError("spin-1 blocks require dual-unitary gates")
        chi = 2
        Vt = M.reshape(chi, chi, chi, chi)  # (s_t w) (s_r g) | (s_l a) (s_b b) -> w g a b
        Y = Vt.transpose(2, 3, 1, 0)[None, ...]  # 1 a b g w  (alpha beta gamma omega)
        blocks[key] = Y
    return ChargeBlockSpec(chi_inner=2, d_inner=1, blocks=blocks)


def u1_charge_phase(chi_inner: int, theta: float) -> np.ndarray:
    """Bond-space phase exp(i theta s) with s = +-1/2 per charge sector."""
    ph = np.concatenate([
        np.full(chi_inner, np.exp(1j * theta / 2)),
        np.full(chi_inner, np.exp(-1j * theta / 2)),
    ])
    return np.diag(ph)


def u1_physical_phase(d_inner: int, theta: float) -> np.ndarray:
    """Physical-space phase exp(i theta Q) over sectors Q = +1, 0, -1."""
    ph = np.concatenate([
        np.full(d_inner, np.exp(1j * theta)),
        np.ones(d_inner),
        np.full(d_inner, np.exp(-1j * theta)),
    ])
    return np.diag(ph)


# ---------------------------------------------------------------------------
# Boundary tensors

BOUNDARY_KINDS = ("left", "right", "top", "bottom",
                  "corner-bl", "corner-br", "corner-tl", "corner-tr")


@dataclass(frozen=True)
class BoundaryTensor:
    """Boundary tensor mapping outgoing virtual legs to physical space.

    Edge tensors are rank 4 with legs (p, <chain legs>, <bulk leg>) and the
    delta form documented in boundary_default; corners are rank 3 and carry a
    chi^2-dimensional physical leg terminating the two perimeter chains.
    """

    kind: str
    chi: int
    entries: np.ndarray
    legs: tuple

    def __post_init__(self):
        if self.kind not in BOUNDARY_KINDS:
            raise FamilyError(f"unknown boundary kind {self.kind!r}")
        arr = np.asarray(self.entries, dtype=complex)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "legs", tuple(self.legs))

    @property
    def phys_dim(self) -> int:
        return self.entries.shape[0]


def boundary_default(chi: int, kind: str) -> BoundaryTensor:
    """Default solvable boundary per kind.

    Input sides (left, bottom) create a normalized pair between the physical
    site and the bulk-facing leg, carrying chi^{-1/2}; output sides (right,
    top) read the bulk leg out isometrically with no scale.  Perimeter chain
    legs pass through untouched; corners terminate two chains into a chi^2
    physical leg with the same chi^{-1/2} normalization.
    """
    eye = np.eye(chi, dtype=complex)
    s = 1.0 / math.sqrt(chi)
    if kind == "left":      # legs p b r t: p copies r (bulk side), b = t chain
        ent = s * np.einsum("pr,bt->pbrt", eye, eye)
        legs = ("p", "b", "r", "t")
    elif kind == "bottom":  # p copies t (bulk side), l = r chain
        ent = s * np.einsum("pt,lr->plrt", eye, eye)
        legs = ("p", "l", "r", "t")
    elif kind == "right":   # p copies l (bulk side), b = t chain, no scale
        ent = np.einsum("pl,bt->plbt", eye, eye)
        legs = ("p", "l", "b", "t")
    elif kind == "top":     # p copies b (bulk side), l = r chain, no scale
        ent = np.einsum("pb,lr->plbr", eye, eye)
        legs = ("p", "l", "b", "r")
    elif kind in ("corner-bl", "corner-br", "corner-tl", "corner-tr"):
        # physical index is the pair (vertical-chain value, horizontal-chain value)
        ent = s * np.einsum("pv,qh->pqvh", eye, eye).reshape(chi * chi, chi, chi)
        legs = {"corner-bl": ("p", "t", "r"), "corner-br": ("p", "t", "l"),
                "corner-tl": ("p", "b", "r"), "corner-tr": ("p", "b", "l")}[kind]
    else:
        raise FamilyError(f"unknown boundary kind {kind!r}")
    return BoundaryTensor(kind=kind, chi=chi, entries=ent, legs=legs)


def check_boundary(bt: BoundaryTensor, tol: float = 1e-12) -> float:
    """Residual of the solvable-boundary relation for the default tensors.

    Folding an edge tensor over its physical leg must give (scale * identity
    cap on the bulk leg) x (independent bra/ket chain passthrough); corners
    must fold to exact chain-end deltas.
    """
    chi = bt.chi
    e = bt.entries
    eye = np.eye(chi)
    F = np.tensordot(np.conj(e), e, axes=([0], [0]))  # bra legs then ket legs
    if bt.kind in ("left", "right", "top", "bottom"):
        scale = 1.0 / chi if bt.kind in ("left", "bottom") else 1.0
        order = {"left": ("b", "r", "t"), "right": ("l", "b", "t"),
                 "bottom": ("l", "r", "t"), "top": ("l", "b", "r")}[bt.kind]
        bulk = {"left": "r", "right": "l", "bottom": "t", "top": "b"}[bt.kind]
        chain = [x for x in order if x != bulk]
        idx = {leg: i for i, leg in enumerate(order)}
        # scale * delta(bulk_bra, bulk_ket) * delta(chain bra pair) * delta(chain ket pair)
        subs = [None] * 6
        subs[idx[bulk]], subs[3 + idx[bulk]] = "a", "b"
        subs[idx[chain[0]]], subs[idx[chain[1]]] = "c", "d"
        subs[3 + idx[chain[0]]], subs[3 + idx[chain[1]]] = "e", "f"
        want = scale * np.einsum(f"ab,cd,ef->{''.join(subs)}", eye, eye, eye)
        return float(np.abs(F - want).max())
    # corners: fold ties bra chain ends to ket chain ends exactly, weight 1/chi
    want = np.einsum("ac,bd->abcd", eye, eye) / chi
    return float(np.abs(F - want).max())


# ---------------------------------------------------------------------------
# Complexity-encoding tensors (d = 16, chi = 2)

def identity_isometry(chi: int = 2, d: int = 16) -> np.ndarray:
    """Default embedding of the chi^2-dimensional pair space into physical space."""
    U = np.zeros((d, chi * chi), dtype=complex)
    U[: chi * chi] = np.eye(chi * chi)
    return U


def complexity_tensors(V, U_iso=None, tol: float = 1e-12) -> dict:
    """The four special tensors of the circuit encoding, keyed by color name.

    orange:      physical pinned to the first basis state, virtual action V
    light_green: bipartite Bell read-out of (l,t) and (r,b), d = 16
    dark_blue:   dumps (l,b) into physical via an isometry, emits a pair on (r,t)
    grey:        pinned physical, virtual SWAP
    """
    chi = 2
    d = 16
    M = gates.as_gate_matrix(V, side=chi * chi)
    rep = check_dual_unitary(M, tol=tol)
    if not rep.passed:
        raise FamilyError(
            f"V is not dual-unitary: unitarity {rep.residual_iso:.3e}, dual {rep.residual_dual:.3e}")
    if U_iso is None:
        U_iso = identity_isometry(chi, d)
    U_iso = np.asarray(U_iso, dtype=complex)
    if U_iso.shape != (d, chi * chi):
        raise FamilyError(f"U_iso must be {d}x{chi * chi}")
    if np.linalg.norm(U_iso.conj().T @ U_iso - np.eye(chi * chi)) > tol:
        raise FamilyError("U_iso is not an isometry")

    orange = np.zeros((d, chi, chi, chi, chi), dtype=complex)
    Vt = M.reshape(chi, chi, chi, chi)               # t r l b
    orange[0] = Vt.transpose(2, 3, 1, 0)             # l b r t

    light_green = np.zeros((d, chi, chi, chi, chi), dtype=complex)
    for p1 in range(4):
        for p2 in range(4):
            phi1 = BELL_STATES[p1].reshape(chi, chi)   # (l, t)
            phi2 = BELL_STATES[p2].reshape(chi, chi)   # (r, b)
            block = 0.5 * np.einsum("lt,rb->lbrt", phi1, phi2)
            light_green[4 * p1 + p2] = block

    dark_blue = np.zeros((d, chi, chi, chi, chi), dtype=complex)
    pair = BELL_STATES[0].reshape(chi, chi)            # (r, t)
    Ut = U_iso.reshape(d, chi, chi)                    # p l b
    dark_blue = np.einsum("plb,rt->plbrt", Ut, pair)

    grey = np.zeros((d, chi, chi, chi, chi), dtype=complex)
    grey[0] = np.einsum("lr,bt->lbrt", np.eye(chi), np.eye(chi))

    return {
        "orange": PepsTensor(d=d, chi=chi, entries=orange),
        "light_green": PepsTensor(d=d, chi=chi, entries=light_green),
        "dark_blue": PepsTensor(d=d, chi=chi, entries=dark_blue),
        "grey": PepsTensor(d=d, chi=chi, entries=grey),
    }


def grey_tensor(chi: int = 2, d: int | None = None) -> PepsTensor:
    """Virtual SWAP with the physical leg pinned to the first basis state."""
    d = chi if d is None else d
    T = np.zeros((d, chi, chi, chi, chi), dtype=complex)
    T[0] = np.einsum("lr,bt->lbrt", np.eye(chi), np.eye(chi))
    return PepsTensor(d=d, chi=chi, entries=T)


# ---------------------------------------------------------------------------
# Random instances

def random_di(d: int, chi: int, seed) -> PepsTensor:
    """Random member of the class at bond dimension 1 or 2, deterministic per seed.

    chi = 2 uses independently sampled dual-unitary gates dressed with Haar
    single-site unitaries on all five legs; chi = 1 is a random physical unit
    vector.
    """
    if d < 1:
        raise FamilyError("d must be >= 1")
    rng = np.random.default_rng(seed)
    if chi == 1:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v /= np.linalg.norm(v)
        return PepsTensor(d=d, chi=1, entries=v.reshape(d, 1, 1, 1, 1))
    if chi != 2:
        raise FamilyError("random instances support chi = 1 or chi = 2 only")
    gates_list = [gates.random_dual_unitary(rng) for _ in range(d)]
    singles = {
        "p": haar_unitary(d, rng),
        "l": haar_unitary(2, rng),
        "b": haar_unitary(2, rng),
        "r": haar_unitary(2, rng),
        "t": haar_unitary(2, rng),
    }
    return controlled_dual_unitary(gates_list, singles=singles)
