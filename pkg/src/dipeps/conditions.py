"""Isometric / dual-isometric / generalized condition checks and the canonical form.

The two defining contractions of the class are

* isometric:       sum_{r,t,p} T^p_{l1 b1 r t} (T^p_{l2 b2 r t})* = delta_{l1 l2} delta_{b1 b2}
* dual-isometric:  sum_{l,t,p} T^p_{l b1 r1 t} (T^p_{l b2 r2 t})* = delta_{r1 r2} delta_{b1 b2}

Residuals are Frobenius norms of the deviation.  The generalized variant dresses
the contractions with matrices (S, R, B); the canonical form gauges S and R to
the identity and diagonalizes the remaining B into a positive diagonal Lambda.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import Gate, as_gate_matrix, dual_unitarity_residuals
from .tensors import PepsTensor

DEFAULT_TOL = 1e-10


class CheckError(ValueError):
    """Raised when a numerical precondition of an operation fails."""


@dataclass(frozen=True)
class ConditionReport:
    residual_iso: float | None
    residual_dual: float | None
    tol: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "residual_iso": self.residual_iso,
            "residual_dual": self.residual_dual,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class GaugeTriple:
    """Matrices (S, R, B) entering the generalized conditions.

    S dresses the right/left legs of the first condition, R the top/bottom legs
    of both, and B the left/right legs of the second.  In canonical form
    S = R = I and B is a positive diagonal Lambda.
    """

    S: np.ndarray
    R: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        for name in ("S", "R", "B"):
            M = np.asarray(getattr(self, name), dtype=complex)
            if M.ndim != 2 or M.shape[0] != M.shape[1]:
                raise CheckError(f"gauge matrix {name} must be square")
            object.__setattr__(self, name, M)

    @classmethod
    def identity(cls, chi: int) -> "GaugeTriple":
        I = np.eye(chi)
        return cls(S=I, R=I, B=I)


def iso_defect(T: PepsTensor) -> np.ndarray:
    """Matrix sum_{r,t,p} T T* - I on the (l, b) double index."""
    M = np.tensordot(T.entries, np.conj(T.entries), axes=([0, 3, 4], [0, 3, 4]))
    c2 = T.chi ** 2
    return M.reshape(c2, c2) - np.eye(c2)


def dual_defect(T: PepsTensor) -> np.ndarray:
    """Matrix sum_{l,t,p} T T* - I on the (r, b) double index."""
    M = np.tensordot(T.entries, np.conj(T.entries), axes=([0, 1, 4], [0, 1, 4]))
    # remaining axes: (b1, r1, b2, r2) -> (r1, b1, r2, b2)
    M = M.transpose(1, 0, 3, 2)
    c2 = T.chi ** 2
    return M.reshape(c2, c2) - np.eye(c2)


def check_isometry(T: PepsTensor, tol: float = DEFAULT_TOL) -> ConditionReport:
    res = float(np.linalg.norm(iso_defect(T)))
    return ConditionReport(residual_iso=res, residual_dual=None, tol=tol, passed=res <= tol)


def check_dual_isometry(T: PepsTensor, tol: float = DEFAULT_TOL) -> ConditionReport:
    res = float(np.linalg.norm(dual_defect(T)))
    return ConditionReport(residual_iso=None, residual_dual=res, tol=tol, passed=res <= tol)


def check_di(T: PepsTensor, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Both conditions at once; passes iff both residuals are within tol."""
    ri = float(np.linalg.norm(iso_defect(T)))
    rd = float(np.linalg.norm(dual_defect(T)))
    return ConditionReport(residual_iso=ri, residual_dual=rd, tol=tol,
                           passed=max(ri, rd) <= tol)


def check_generalized(T: PepsTensor, gauge: GaugeTriple, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Residuals of the two dressed contractions with the provided (S, R, B)."""
    chi = T.chi
    for name in ("S", "R", "B"):
        if getattr(gauge, name).shape != (chi, chi):
            raise CheckError(f"gauge matrix {name} must be {chi}x{chi}")
    S, R, B = gauge.S, gauge.R, gauge.B
    Te = T.entries
    # condition 1: sum_{r,t,r',t',p} T_{l1 b1 r t} S_{r r'} R_{t t'} T*_{l2 b2 r' t'}
    TS = np.einsum("plbrt,rx,ty->plbxy", Te, S, R)
    M1 = np.tensordot(TS, np.conj(Te), axes=([0, 3, 4], [0, 3, 4]))   # l1 b1 l2 b2
    want1 = np.einsum("ac,bd->abcd", S, R)
    res1 = float(np.linalg.norm(M1 - want1))
    # condition 2: sum_{l,t,l',t',p} T_{l b1 r1 t} B_{l l'} R_{t t'} T*_{l' b2 r2 t'}
    TB = np.einsum("plbrt,lx,ty->pxbry", Te, B, R)
    M2 = np.tensordot(TB, np.conj(Te), axes=([0, 1, 4], [0, 1, 4]))   # b1 r1 b2 r2
    M2 = M2.transpose(1, 0, 3, 2)                                      # r1 b1 r2 b2
    want2 = np.einsum("ac,bd->abcd", B, R)
    res2 = float(np.linalg.norm(M2 - want2))
    return ConditionReport(residual_iso=res1, residual_dual=res2, tol=tol,
                           passed=max(res1, res2) <= tol)


def check_dual_unitary(V, tol: float = DEFAULT_TOL, chi: int = 2) -> ConditionReport:
    """Unitarity and the dual contraction identity of a two-site gate."""
    if isinstance(V, Gate):
        chi = V.dims_in[0]
    M = as_gate_matrix(V, side=chi * chi)
    ru, rd = dual_unitarity_residuals(M, chi=chi)
    return ConditionReport(residual_iso=ru, residual_dual=rd, tol=tol,
                           passed=max(ru, rd) <= tol)


# ---------------------------------------------------------------------------
# Channel fixed point

def transfer_map_left_right(T: PepsTensor) -> np.ndarray:
    """Superoperator of the left-to-right virtual channel, N[(r1 r2), (l1 l2)].

    Kraus indices are (p, t, b) with a 1/chi weight on the bottom leg; for a
    tensor passing the isometric check the map is completely positive and
    trace preserving up to that residual.
    """
    Te = T.entries
    N = np.tensordot(Te, np.conj(Te), axes=([0, 2, 4], [0, 2, 4]))  # l1 r1 l2 r2
    N = N.transpose(1, 3, 0, 2) / T.chi                              # r1 r2 l1 l2
    c = T.chi
    return N.reshape(c * c, c * c)


def apply_transfer(N: np.ndarray, rho: np.ndarray) -> np.ndarray:
    c = int(round(np.sqrt(rho.size)))
    return (N @ rho.reshape(-1)).reshape(c, c)


def find_fixed_point(T: PepsTensor, direction: str = "left-to-right",
                     method: str = "auto", tol: float = 1e-10) -> np.ndarray:
    """Positive semidefinite, unit-trace fixed point B~ of the left-to-right channel.

    Raises CheckError if the isometry precondition fails or no eigenvalue sits
    within 1e-8 of 1.  When the eigenvalue-1 space is degenerate the projection
    of the maximally mixed state onto it is returned, which keeps the strictly
    dual-isometric case at B~ = I/chi.
    """
    if direction != "left-to-right":
        raise CheckError(f"unsupported direction {direction!r}")
    iso = check_isometry(T, tol=1e-8)
    if not iso.passed:
        raise CheckError(f"isometry precondition fails: residual {iso.residual_iso:.3e}")
    chi = T.chi
    N = transfer_map_left_right(T)
    if method == "auto":
        method = "dense" if chi * chi <= 64 else "power"
    if method == "dense":
        vals, vecs = np.linalg.eig(N)
        sel = np.where(np.abs(vals - 1.0) <= 1e-8)[0]
        if len(sel) == 0:
            raise CheckError(f"no eigenvalue within 1e-8 of 1 (closest {vals[np.argmin(np.abs(vals-1))]:.6f})")
        basis = vecs[:, sel]
        # project the maximally mixed state onto the fixed space
        target = (np.eye(chi) / chi).reshape(-1)
        coeff, *_ = np.linalg.lstsq(basis, target, rcond=None)
        cand = basis @ coeff
        if np.linalg.norm(cand) < 1e-12:
            cand = basis[:, 0]
    elif method == "power":
        rng = np.random.default_rng(0)
        cand = (np.eye(chi) / chi).reshape(-1).astype(complex)
        for _ in range(10000):
            nxt = N @ cand
            nxt /= np.linalg.norm(nxt)
            if np.linalg.norm(nxt - cand) < 1e-14:
                cand = nxt
                break
            cand = nxt
    else:
        raise CheckError(f"unknown method {method!r}")
    B = cand.reshape(chi, chi)
    B = (B + B.conj().T) / 2
    tr = np.trace(B).real
    if abs(tr) < 1e-12:
        raise CheckError("fixed point candidate has vanishing trace")
    B = B / tr
    evals = np.linalg.eigvalsh(B)
    if evals.min() < -1e-9:
        raise CheckError(f"fixed point is not positive semidefinite (min eig {evals.min():.3e})")
    res = float(np.linalg.norm(apply_transfer(N, B) - B))
    if res > tol:
        raise CheckError(f"fixed point residual {res:.3e} exceeds {tol:g}")
    return B


# ---------------------------------------------------------------------------
# Gauge transformations and the canonical form

def gauge_tensor(T: PepsTensor, A: np.ndarray, C: np.ndarray) -> PepsTensor:
    """Gauge by A on the left leg and C on the top leg.

    The right and bottom legs carry the compensating inverses, so contracted
    bonds of a uniform lattice are unchanged:
    l <- A, r <- (A^-1)^T, t <- C, b <- (C^-1)^T.
    """
    A = np.asarray(A, dtype=complex)
    C = np.asarray(C, dtype=complex)
    Ar = np.linalg.inv(A).T
    Cb = np.linalg.inv(C).T
    out = np.einsum("plbrt,xl,yb,zr,wt->pxyzw", T.entries, A, Cb, Ar, C, optimize=True)
    return PepsTensor(d=T.d, chi=T.chi, entries=out)


def induced_gauge_triple(A: np.ndarray, C: np.ndarray) -> GaugeTriple:
    """(S, R, B) satisfied by a strictly dual-isometric tensor gauged by (A, C)."""
    A = np.asarray(A, dtype=complex)
    C = np.asarray(C, dtype=complex)
    P = A @ A.conj().T
    Q = C @ C.conj().T
    return GaugeTriple(S=P, R=np.linalg.inv(Q).T, B=np.linalg.inv(P).T)


def _hermitian_root(M: np.ndarray, inverse: bool = False, tol: float = 1e-12) -> np.ndarray:
    w, U = np.linalg.eigh((M + M.conj().T) / 2)
    if w.min() <= tol * max(w.max(), 1.0):
        raise CheckError(f"matrix is not strictly positive definite (min eig {w.min():.3e})")
    r = w ** (-0.5 if inverse else 0.5)
    return (U * r) @ U.conj().T


def _phase_fixed(vecs: np.ndarray) -> np.ndarray:
    """Fix each column's global phase: largest-magnitude entry real positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        ph = out[k, j] / abs(out[k, j])
        out[:, j] = out[:, j] / ph
    return out


@dataclass(frozen=True)
class CanonicalForm:
    tensor: PepsTensor
    lam: np.ndarray
    residual_iso: float
    residual_dual: float
    degenerate: bool


def canonicalize(T: PepsTensor, gauge: GaugeTriple, tol: float = 1e-10) -> CanonicalForm:
    """Bring a generalized tensor to canonical form: S = R = I, B = Lambda diagonal.

    The gauge uses A = S^{-1/2} on the left/right pair and C = (R^T)^{1/2} on
    top/bottom, then a unitary diagonalization of the transformed B.  Lambda is
    returned positive and sorted descending; near-degenerate values are flagged
    and ordered by the phase-fixed eigenvector entries for determinism.
    """
    S, R, B = gauge.S, gauge.R, gauge.B
    A = _hermitian_root(S, inverse=True)
    C = _hermitian_root(R.T)
    _hermitian_root(B)  # positivity check; value unused
    T1 = gauge_tensor(T, A, C)
    Ainv_T = np.linalg.inv(A).T  # equals (S^{1/2})^T
    B1 = Ainv_T @ B @ np.conj(Ainv_T).T
    B1 = (B1 + B1.conj().T) / 2
    w, U = np.linalg.eigh(B1)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    U = _phase_fixed(U[:, order])
    # deterministic order inside degenerate groups: lexicographic on rounded entries
    degenerate = False
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and abs(w[j] - w[i]) <= 1e-9 * max(abs(w[i]), 1.0):
            j += 1
        if j - i > 1:
            degenerate = True
            keys = {k: tuple(np.round(np.concatenate([U[:, k].real, U[:, k].imag]), 9))
                    for k in range(i, j)}
            sub = sorted(range(i, j), key=keys.get)
            U[:, i:j] = U[:, sub]
        i = j
    T2 = gauge_tensor(T1, U.T, np.eye(T.chi))
    lam = w.copy()
    res_iso = float(np.linalg.norm(iso_defect(T2)))
    rep = check_generalized(T2, GaugeTriple(S=np.eye(T.chi), R=np.eye(T.chi), B=np.diag(lam)), tol=tol)
    res_dual = rep.residual_dual
    if max(res_iso, res_dual) > max(tol, 1e-9):
        raise CheckError(
            f"canonicalization failed: residuals {res_iso:.3e}, {res_dual:.3e} "
            "(non-normal input or inconsistent gauge triple)")
    return CanonicalForm(tensor=T2, lam=lam, residual_iso=res_iso,
                         residual_dual=res_dual, degenerate=degenerate)
