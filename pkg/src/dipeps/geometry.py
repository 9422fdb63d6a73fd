"""Parameter counting and the numerical tangent-space dimension of the variety.

The two defining contractions are quadratic in the tensor entries, so the
constraint map has an exact analytic differential.  Its components are the
independent real entries of the two Hermitian defect matrices (chi^4 real
numbers each: the real diagonal plus real/imaginary parts above it); the
tangent dimension is the parameter count minus the Jacobian rank, with the
rank decision audited through the singular-value gap at the cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conditions import CheckError, check_di
from .tensors import PepsTensor


def count_di_params(d: int, chi: int) -> int:
    """Free real parameters of an injective doubly isometric tensor."""
    if d < 1 or chi < 1:
        raise ValueError("d and chi must be >= 1")
    return 2 * (d - 1) * chi ** 4 + chi ** 2


def count_normal_peps_params(d: int, chi: int) -> int:
    """Free real parameters of the physical state of a generic normal tensor."""
    if d < 1 or chi < 1:
        raise ValueError("d and chi must be >= 1")
    return 2 * d * chi ** 4 - 4 * chi ** 2 + 2


def count_state_params(d: int, chi: int) -> int:
    """Free real parameters of the physical state of a normal member of the class."""
    if d < 1 or chi < 1:
        raise ValueError("d and chi must be >= 1")
    return 2 * (d - 1) * chi ** 4


@dataclass(frozen=True)
class DimensionReport:
    total_params: int
    constraint_rank: int
    tangent_dim: int
    formula_dim: int
    singular_values: np.ndarray
    gap_ratio: float
    conclusive: bool

    def as_dict(self) -> dict:
        return {"total_params": self.total_params,
                "constraint_rank": self.constraint_rank,
                "tangent_dim": self.tangent_dim,
                "formula_dim": self.formula_dim,
                "singular_values": self.singular_values.tolist(),
                "gap_ratio": self.gap_ratio,
                "conclusive": self.conclusive}


def _hermitian_components(H: np.ndarray) -> np.ndarray:
    """Independent real components: diagonal, then re/im above the diagonal."""
    n = H.shape[0]
    out = [H[i, i].real for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out.append(H[i, j].real)
            out.append(H[i, j].imag)
    return np.array(out)


def constraint_values(T: PepsTensor) -> np.ndarray:
    """Real components of both defect matrices, stacked (length 2 chi^4)."""
    from .conditions import dual_defect, iso_defect
    return np.concatenate([_hermitian_components(iso_defect(T)),
                           _hermitian_components(dual_defect(T))])


def constraint_jacobian(T: PepsTensor) -> np.ndarray:
    """Exact Jacobian of the constraint map w.r.t. the real tensor parameters.

    Parameters are ordered (Re T_0, Im T_0, Re T_1, ...) over the row-major
    entries of T.  Both defects are sesquilinear; differentiating gives, per
    parameter direction E,  A(E, T*) + A(T, E*) with A the defining
    contraction, assembled here index-by-index.
    """
    d, chi = T.d, T.chi
    c2 = chi * chi
    Te = T.entries
    n_par = 2 * d * chi ** 4
    n_con = 2 * chi ** 4
    J = np.zeros((n_con, n_par))
    # iso: M[(l1 b1), (l2 b2)] = sum_{p r t} T[p l1 b1 r t] T*[p l2 b2 r t]
    # dual: M[(r1 b1), (r2 b2)] = sum_{p l t} T[p l b1 r1 t] T*[p l b2 r2 t]
    for p in range(d):
        for l in range(chi):
            for b in range(chi):
                for r in range(chi):
                    for t in range(chi):
                        flat = np.ravel_multi_index((p, l, b, r, t), (d, chi, chi, chi, chi))
                        # derivative of iso defect w.r.t. T[p,l,b,r,t]
                        row_iso = np.zeros((c2, c2), dtype=complex)
                        contrib = np.conj(Te[p, :, :, r, t]).reshape(-1)   # over (l2 b2)
                        row_iso[l * chi + b, :] += contrib
                        row_dual = np.zeros((c2, c2), dtype=complex)
                        contrib2 = np.conj(Te[p, l, :, :, t]).T.reshape(-1)  # (r2 b2)
                        row_dual[r * chi + b, :] += contrib2
                        for which, E in ((0, 1.0), (1, 1.0j)):
                            dM1 = E * row_iso
                            dM1 = dM1 + dM1.conj().T
                            dM2 = E * row_dual
                            dM2 = dM2 + dM2.conj().T
                            col = np.concatenate([_hermitian_components(dM1),
                                                  _hermitian_components(dM2)])
                            J[:, 2 * flat + which] = col
    return J


def tangent_dimension(T: PepsTensor, rank_tol: float = 1e-8,
                      gap_floor: float = 1e2) -> DimensionReport:
    """Tangent-space dimension of the constraint variety at a verified point.

    The rank counts singular values above rank_tol * sigma_max; the decision
    is conclusive only when the spectrum jumps by at least gap_floor across
    the cut.
    """
    rep = check_di(T, tol=1e-8)
    if not rep.passed:
        raise CheckError(
            f"point is not on the variety (residuals {rep.residual_iso:.3e}, "
            f"{rep.residual_dual:.3e})")
    J = constraint_jacobian(T)
    sv = np.linalg.svd(J, compute_uv=False)
    cut = rank_tol * sv[0]
    rank = int(np.sum(sv > cut))
    n_par = J.shape[1]
    if rank == 0 or rank == len(sv):
        gap = math.inf
    else:
        below = sv[rank] if sv[rank] > 0 else np.finfo(float).tiny
        gap = float(sv[rank - 1] / below)
    conclusive = bool(gap >= gap_floor)
    if not conclusive:
        raise CheckError(
            f"rank decision inconclusive: singular gap {gap:.2e} < {gap_floor:g} at the cut")
    return DimensionReport(total_params=n_par, constraint_rank=rank,
                           tangent_dim=n_par - rank,
                           formula_dim=count_di_params(T.d, T.chi),
                           singular_values=sv, gap_ratio=float(gap),
                           conclusive=conclusive)
