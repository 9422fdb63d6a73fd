"""Stabilizer parent Hamiltonian of the Z2 plumbing family on small tori.

Spins live on the edges of an N x M torus of vertices.  At the symmetric point
the state is the uniform superposition of even-vertex-parity configurations;
away from it the state follows by acting with a diagonal two-body dressing on
the two vertical edges of every vertex.  Star terms commute with the dressing
and survive unchanged; plaquette terms get conjugated by the dressings of
their four corner vertices only, which bounds the deformed locality by 8 in
general and by 4 when the two weights are complementary (the cross coupling
vanishes there and the dressing factorizes into single-site operators).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .families import w_z2
from .gates import SIGMA

TORUS_GUARD_SPINS = 16


class ParentHamError(ValueError):
    pass


@dataclass(frozen=True)
class TorusLattice:
    """Edge-spin bookkeeping for an N x M torus of vertices."""

    N: int
    M: int

    def __post_init__(self):
        if self.N < 2 or self.M < 2:
            raise ParentHamError("torus dimensions must be >= 2")

    @property
    def n_spins(self) -> int:
        return 2 * self.N * self.M

    def edge_index(self, kind: str, x: int, y: int) -> int:
        x %= self.N
        y %= self.M
        base = 0 if kind == "h" else self.N * self.M
        return base + y * self.N + x

    def vertices(self):
        return [(x, y) for y in range(self.M) for x in range(self.N)]

    def star_edges(self, x: int, y: int):
        return [self.edge_index("h", x - 1, y), self.edge_index("h", x, y),
                self.edge_index("v", x, y - 1), self.edge_index("v", x, y)]

    def plaquette_edges(self, x: int, y: int):
        return [self.edge_index("h", x, y), self.edge_index("h", x, y + 1),
                self.edge_index("v", x, y), self.edge_index("v", x + 1, y)]

    def vertex_pair(self, x: int, y: int):
        """(bottom edge, top edge) spin indices dressed at a vertex."""
        return self.edge_index("v", x, y - 1), self.edge_index("v", x, y)


@dataclass(frozen=True)
class PauliString:
    """Product of single-site Paulis with a scalar coefficient."""

    support: dict          # spin index -> pauli index (1, 2, 3)
    coefficient: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "support", dict(self.support))

    def dense(self, n_spins: int) -> np.ndarray:
        out = np.array([[self.coefficient]], dtype=complex)
        for s in range(n_spins):
            out = np.kron(out, SIGMA[self.support.get(s, 0)])
        return out


@dataclass(frozen=True)
class ToricTerm:
    """Stabilizer term: identity minus the Pauli string."""

    kind: str              # "star" or "plaquette"
    position: tuple
    string: PauliString

    def dense(self, n_spins: int) -> np.ndarray:
        return np.eye(2 ** n_spins) - self.string.dense(n_spins)


def toric_terms(torus_n: int, torus_m: int) -> list:
    """One star term per vertex and one plaquette term per plaquette."""
    lat = TorusLattice(torus_n, torus_m)
    terms = []
    for (x, y) in lat.vertices():
        terms.append(ToricTerm("star", (x, y),
                               PauliString({e: 3 for e in lat.star_edges(x, y)})))
    for (x, y) in lat.vertices():
        terms.append(ToricTerm("plaquette", (x, y),
                               PauliString({e: 1 for e in lat.plaquette_edges(x, y)})))
    return terms


# ---------------------------------------------------------------------------
# Deformation

@dataclass(frozen=True)
class DeformationFields:
    h_b: float
    h_t: float
    h_bt: float


def deformation(alpha: float, beta: float) -> DeformationFields:
    """Per-vertex field strengths; singular at the parameter-interval endpoints.

    The logarithm arguments are ratios of negative quantities for parameters
    inside the open unit interval, hence positive; we stay on that real
    branch.
    """
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise ParentHamError("deformation fields are singular at the interval endpoints")
    h_b = math.log(((alpha - 1.0) * alpha) / ((beta - 1.0) * beta)) / 8.0
    h_t = math.log((alpha * (beta - 1.0)) / ((alpha - 1.0) * beta)) / 8.0
    h_bt = math.log((alpha * beta) / ((alpha - 1.0) * (beta - 1.0))) / 8.0
    return DeformationFields(h_b=h_b, h_t=h_t, h_bt=h_bt)


def vertex_operator(fields: DeformationFields) -> np.ndarray:
    """exp(h_b s3 (x) 1 + h_t 1 (x) s3 + h_bt s3 (x) s3) on (bottom, top) edges."""
    diag = [math.exp(fields.h_b * sb + fields.h_t * st + fields.h_bt * sb * st)
            for (sb, st) in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
    return np.diag(np.array(diag, dtype=complex))


@dataclass(frozen=True)
class DeformedTerm:
    kind: str
    position: tuple
    support: tuple         # spin indices, sorted ascending
    operator: np.ndarray   # dense on the support, axis order as `support`

    @property
    def locality(self) -> int:
        return len(self.support)

    def dense(self, n_spins: int) -> np.ndarray:
        k = len(self.support)
        op = self.operator.reshape([2] * (2 * k))
        out = np.eye(2 ** n_spins, dtype=complex).reshape([2] * (2 * n_spins))
        out = np.tensordot(op, out, axes=(list(range(k, 2 * k)), list(self.support)))
        out = np.moveaxis(out, list(range(k)), list(self.support))
        return out.reshape(2 ** n_spins, 2 ** n_spins)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        n = int(round(math.log2(psi.size)))
        k = len(self.support)
        op = self.operator.reshape([2] * (2 * k))
        phi = psi.reshape([2] * n)
        phi = np.tensordot(op, phi, axes=(list(range(k, 2 * k)), list(self.support)))
        phi = np.moveaxis(phi, list(range(k)), list(self.support))
        return phi.reshape(psi.shape)


def _embed(op: np.ndarray, sites, union) -> np.ndarray:
    """Embed an operator from `sites` into the ordered `union` support."""
    pos = {s: i for i, s in enumerate(union)}
    k, n = len(sites), len(union)
    op = op.reshape([2] * (2 * k))
    out = np.eye(2 ** n, dtype=complex).reshape([2] * (2 * n))
    axes = [pos[s] for s in sites]
    out = np.tensordot(op, out, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(2 ** n, 2 ** n)


def _trim_support(op: np.ndarray, support, tol: float = 1e-12):
    """Drop support sites on which the operator factorizes as the identity."""
    support = list(support)
    while True:
        k = len(support)
        if k == 0:
            break
        opk = op.reshape([2] * (2 * k))
        dropped = False
        for i in range(k):
            R = np.trace(opk, axis1=i, axis2=k + i) / 2.0
            cand = np.tensordot(np.eye(2), R, axes=0)   # (ri, ci, rows-i, cols-i)
            perm = []
            rest_rows = list(range(2, 2 + (k - 1)))
            rest_cols = list(range(2 + (k - 1), 2 + 2 * (k - 1)))
            ir, ic = iter(rest_rows), iter(rest_cols)
            for j in range(k):
                perm.append(0 if j == i else next(ir))
            for j in range(k):
                perm.append(1 if j == i else next(ic))
            cand = cand.transpose(perm)
            if np.abs(cand - opk).max() < tol:
                op = R.reshape(2 ** (k - 1), 2 ** (k - 1))
                support.pop(i)
                dropped = True
                break
        if not dropped:
            break
    return tuple(support), op


def deformed_terms(alpha: float, beta: float, torus) -> list:
    """Deformed stabilizer terms annihilating the dressed state.

    Star terms are unchanged; each plaquette term is conjugated by the vertex
    dressings on its four corners only, and the support is trimmed to the
    sites actually acted on.
    """
    lat = torus if isinstance(torus, TorusLattice) else TorusLattice(*torus)
    fields = deformation(alpha, beta)
    U = vertex_operator(fields)
    Uinv = np.diag(1.0 / np.diag(U))
    out = []
    n = lat.n_spins
    for term in toric_terms(lat.N, lat.M):
        if term.kind == "star":
            supp = tuple(sorted(term.string.support))
            out.append(DeformedTerm("star", term.position, supp, _string_on(term, supp)))
            continue
        (x, y) = term.position
        corners = [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
        union = set(term.string.support)
        for (cx, cy) in corners:
            union.update(lat.vertex_pair(cx, cy))
        union = tuple(sorted(union))
        B = _embed(_string_on(term, tuple(sorted(term.string.support))),
                   tuple(sorted(term.string.support)), union)
        D = np.eye(2 ** len(union), dtype=complex)
        Dinv = np.eye(2 ** len(union), dtype=complex)
        for (cx, cy) in corners:
            pair = lat.vertex_pair(cx, cy)
            D = D @ _embed(U, pair, union)
            Dinv = Dinv @ _embed(Uinv, pair, union)
        op = D @ B @ Dinv
        supp, op = _trim_support(op, union)
        out.append(DeformedTerm("plaquette", term.position, supp, op))
    return out


def _string_on(term: ToricTerm, supp) -> np.ndarray:
    """Dense I - string restricted to the term's own support."""
    k = len(supp)
    P = np.array([[term.string.coefficient]], dtype=complex)
    for s in supp:
        P = np.kron(P, SIGMA[term.string.support.get(s, 0)])
    return np.eye(2 ** k) - P


# ---------------------------------------------------------------------------
# Dense states on the torus and the annihilation check

def torus_plumbing_state(alpha: float, beta: float, torus) -> np.ndarray:
    """Dense edge-spin wavefunction of the plumbing network on the torus.

    Each edge hosts one spin; the amplitude of a configuration is the product
    of W entries over vertices, with (l, b, r, t) read off the incident edges.
    Returned unnormalized.
    """
    lat = torus if isinstance(torus, TorusLattice) else TorusLattice(*torus)
    n = lat.n_spins
    if n > TORUS_GUARD_SPINS:
        raise ParentHamError(f"{n} spins exceed the dense guard {TORUS_GUARD_SPINS}")
    W = w_z2(alpha, beta).entries.real.reshape(2, 2, 2, 2)   # l b r t
    psi = np.zeros(2 ** n)
    for conf in range(2 ** n):
        bits = [(conf >> (n - 1 - s)) & 1 for s in range(n)]
        amp = 1.0
        for (x, y) in lat.vertices():
            l = bits[lat.edge_index("h", x - 1, y)]
            b = bits[lat.edge_index("v", x, y - 1)]
            r = bits[lat.edge_index("h", x, y)]
            t = bits[lat.edge_index("v", x, y)]
            amp *= W[l, b, r, t]
            if amp == 0.0:
                break
        psi[conf] = amp
    return psi.astype(complex)


def dressed_state(alpha: float, beta: float, torus) -> np.ndarray:
    """Dressing product applied to the symmetric-point state, unnormalized."""
    lat = torus if isinstance(torus, TorusLattice) else TorusLattice(*torus)
    psi = torus_plumbing_state(0.5, 0.5, lat)
    fields = deformation(alpha, beta)
    U = vertex_operator(fields)
    n = lat.n_spins
    phi = psi.reshape([2] * n)
    for (x, y) in lat.vertices():
        pair = lat.vertex_pair(x, y)
        op = U.reshape(2, 2, 2, 2)
        phi = np.tensordot(op, phi, axes=([2, 3], list(pair)))
        phi = np.moveaxis(phi, [0, 1], list(pair))
    return phi.reshape(-1)


@dataclass(frozen=True)
class AnnihilationReport:
    max_residual: float
    per_term: tuple
    construction_overlap: float

    def as_dict(self) -> dict:
        return {"max_residual": self.max_residual,
                "per_term": [{"kind": k, "position": list(p), "residual": r}
                             for (k, p, r) in self.per_term],
                "construction_overlap": self.construction_overlap}


def check_annihilation(terms, alpha: float, beta: float, torus) -> AnnihilationReport:
    """Max over terms of ||h |psi>|| for the normalized dressed state.

    Builds the state both by dressing the symmetric-point state and by the
    dense plumbing contraction, compares the two, and applies every term.
    """
    lat = torus if isinstance(torus, TorusLattice) else TorusLattice(*torus)
    psi_net = torus_plumbing_state(alpha, beta, lat)
    psi_net = psi_net / np.linalg.norm(psi_net)
    psi_dru = dressed_state(alpha, beta, lat)
    psi_dru = psi_dru / np.linalg.norm(psi_dru)
    olap = abs(complex(np.vdot(psi_dru, psi_net)))
    per_term = []
    worst = 0.0
    for term in terms:
        if isinstance(term, ToricTerm):
            supp = tuple(sorted(term.string.support))
            term = DeformedTerm(term.kind, term.position, supp, _string_on(term, supp))
        res = float(np.linalg.norm(term.apply(psi_net)))
        per_term.append((term.kind, term.position, res))
        worst = max(worst, res)
    return AnnihilationReport(max_residual=worst, per_term=tuple(per_term),
                              construction_overlap=olap)
