"""Cylinder transfer operators of the Z2 plumbing family and phase diagnostics.

After folding, a phase-free Z2 plumbing tensor reduces to a rank-4 tensor with
the entries of the defining W squared element-wise.  In the reordered form it
splits as

    I_H (x) diag(alpha, beta)_V  +  sigma^1_H (x) [[0, 1-beta], [1-alpha, 0]]_V,

so a ring of M sites acts on M two-dimensional horizontal spaces while all
sites share one vertical space that is traced; threading a flux inserts
sigma^3 into that trace.  The trace-product construction (build_transfer) and
the explicit string series (analytic_transfer) are independent routes to the
same operator and cross-validate each other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .families import WMatrix

FLUX_VALUES = (0.0, math.pi)


class TransferError(ValueError):
    pass


@dataclass(frozen=True)
class WTilde:
    """Element-wise square of a phase-free Z2 W matrix."""

    alpha: float
    beta: float
    matrix: np.ndarray   # 4x4, indices (l b), (r t)

    def factors(self):
        """Per-site decomposition: (D, X) with W~ = I (x) D + sigma1 (x) X."""
        D = np.array([[self.alpha, 0.0], [0.0, self.beta]])
        X = np.array([[0.0, 1.0 - self.beta], [1.0 - self.alpha, 0.0]])
        return D, X


def doubled_w(W: WMatrix) -> WTilde:
    """Square a Z2-family W element-wise; rejects complex-phased input."""
    E = W.entries
    if np.abs(E.imag).max() > 1e-14 or E.real.min() < -1e-14:
        raise TransferError("doubled reduction needs the phase-free family "
                            "(real nonnegative entries)")
    if W.params is None or not {"alpha", "beta"} <= set(W.params):
        raise TransferError("expected a Z2-family W with recorded (alpha, beta)")
    return WTilde(alpha=float(W.params["alpha"]), beta=float(W.params["beta"]),
                  matrix=(E.real ** 2).astype(float))


def _flux_value(flux) -> float:
    if flux in (0, 0.0, "0"):
        return 0.0
    if flux in ("pi", math.pi) or (isinstance(flux, float) and abs(flux - math.pi) < 1e-12):
        return math.pi
    raise TransferError(f"flux must be 0 or pi, got {flux!r}")


def build_transfer(wt: WTilde, M: int, flux_diff=0.0, guard: int = 14) -> np.ndarray:
    """Transfer operator on 2^M from the vertical trace of the site factors.

    The matrix element between horizontal strings (h'_1..h'_M), (h_1..h_M) is
    the trace of the ordered product of per-site vertical 2x2 factors, D for
    h'_i = h_i and X otherwise, with sigma^3 appended when the bra and ket
    fluxes differ by pi.
    """
    if M % 2 != 0:
        raise TransferError("circumference must be even")
    if M > guard:
        raise TransferError(f"M = {M} exceeds the dense guard {guard}")
    flux = _flux_value(flux_diff)
    D, X = wt.factors()
    A = np.stack([np.stack([D, X]), np.stack([X, D])])   # A[h', h]
    A = A.reshape(4, 2, 2)

    def accumulate(n):
        """Ordered product over n sites, indexed by the interleaved string."""
        R = np.eye(2)[None, :, :]
        for _ in range(n):
            R = np.einsum("qab,gbc->qgac", R, A).reshape(-1, 2, 2)
        return R

    # split the ring so the transient stays of the order of the output size
    half = M // 2
    left = accumulate(half)
    right = accumulate(M - half)
    if flux == math.pi:
        right = right * np.array([1.0, -1.0])   # columns scaled by sigma3
    # Tr(L_i R_j) = sum_ab L_i[a, b] R_j[b, a]; accumulate the four outer
    # products elementwise so exact +-x cancellations survive (BLAS matmul
    # with fused multiply-adds would leave one-ulp residue where the series
    # vanishes identically, e.g. the flux-pi operator at alpha = beta)
    tr = np.multiply.outer(left[:, 0, 0], right[:, 0, 0])
    tr += np.multiply.outer(left[:, 0, 1], right[:, 1, 0])
    tr += np.multiply.outer(left[:, 1, 0], right[:, 0, 1])
    tr += np.multiply.outer(left[:, 1, 1], right[:, 1, 1])
    # entry index order is (h'_1, h_1, h'_2, h_2, ...): split into rows/cols
    tr = tr.reshape((2,) * (2 * M))
    perm = list(range(0, 2 * M, 2)) + list(range(1, 2 * M, 2))
    return tr.transpose(perm).reshape(2 ** M, 2 ** M)


def analytic_transfer(alpha: float, beta: float, M: int, flux_diff=0.0) -> np.ndarray:
    """Transfer operator assembled from the closed-form string series.

    Terms carry an even number 2m of sigma^1 factors at positions
    i_1 < ... < i_{2m}; the gaps between them alternate between the two
    diagonal weights, giving the coefficient
        (1-alpha)^m (1-beta)^m (alpha^E beta^O +- beta^E alpha^O)
    with E the even-position and O the odd-position gap sums and the minus
    sign for flux difference pi.  The flux-pi series has no full-string term.
    """
    if M % 2 != 0:
        raise TransferError("circumference must be even")
    flux = _flux_value(flux_diff)
    sign = -1.0 if flux == math.pi else 1.0
    dim = 2 ** M
    out = np.zeros((dim, dim))
    rows = np.arange(dim)
    for m in range(0, M // 2 + 1):
        pref = (1.0 - alpha) ** m * (1.0 - beta) ** m
        for pos in itertools.combinations(range(M), 2 * m):
            gaps = []
            prev = -1
            for p in pos:
                gaps.append(p - prev - 1)
                prev = p
            gaps.append(M - 1 - prev)
            even_sum = sum(gaps[0::2])
            odd_sum = sum(gaps[1::2])
            coeff = pref * (alpha ** even_sum * beta ** odd_sum
                            + sign * beta ** even_sum * alpha ** odd_sum)
            if coeff == 0.0:
                continue
            mask = 0
            for p in pos:
                mask |= 1 << (M - 1 - p)
            out[rows, rows ^ mask] += coeff
    return out


# ---------------------------------------------------------------------------
# Parity blocks and spectra

def parity_indices(M: int, parity: str) -> np.ndarray:
    bits = np.array([bin(i).count("1") % 2 for i in range(2 ** M)])
    want = 0 if parity == "even" else 1
    return np.where(bits == want)[0]


def parity_commutator_residual(op: np.ndarray, M: int) -> float:
    signs = np.array([1.0 - 2.0 * (bin(i).count("1") % 2) for i in range(2 ** M)])
    P = np.diag(signs)
    return float(np.linalg.norm(P @ op - op @ P))


@dataclass(frozen=True)
class TransferBlock:
    M: int
    parity: str
    flux_diff: float
    matrix: np.ndarray
    spectrum: np.ndarray       # eigenvalues sorted by descending magnitude

    def leading(self):
        return self.spectrum[0]

    def leading_degeneracy(self, rtol: float = 1e-8) -> int:
        mags = np.abs(self.spectrum)
        if mags[0] == 0.0:
            return len(mags)
        return int(np.sum(mags >= mags[0] * (1.0 - rtol)))


def block_spectrum(op: np.ndarray, parity: str, M: int,
                   rtol: float = 1e-8, flux_diff=0.0) -> TransferBlock:
    """Project on a parity sector, diagonalize, and sort by magnitude."""
    if parity not in ("even", "odd"):
        raise TransferError("parity must be 'even' or 'odd'")
    res = parity_commutator_residual(op, M)
    if res > 1e-10:
        raise TransferError(f"operator does not commute with the parity string ({res:.3e})")
    idx = parity_indices(M, parity)
    sub = op[np.ix_(idx, idx)]
    vals = np.linalg.eigvals(sub)
    order = np.argsort(-np.abs(vals), kind="stable")
    return TransferBlock(M=M, parity=parity, flux_diff=_flux_value(flux_diff),
                         matrix=sub, spectrum=vals[order])


def transfer_blocks(alpha: float, beta: float, M: int) -> dict:
    """All four distinct blocks at the given circumference, via the trace product."""
    wt = doubled_w_from_params(alpha, beta)
    same = build_transfer(wt, M, 0.0)
    shift = build_transfer(wt, M, math.pi)
    return {
        ("even", 0.0): block_spectrum(same, "even", M, flux_diff=0.0),
        ("odd", 0.0): block_spectrum(same, "odd", M, flux_diff=0.0),
        ("even", math.pi): block_spectrum(shift, "even", M, flux_diff=math.pi),
        ("odd", math.pi): block_spectrum(shift, "odd", M, flux_diff=math.pi),
    }


def doubled_w_from_params(alpha: float, beta: float) -> WTilde:
    from .families import w_z2
    return doubled_w(w_z2(alpha, beta))


# ---------------------------------------------------------------------------
# Topological diagnostics

GHZ_POINT = "GHZ-point"
TORIC_PHASE = "toric-code-phase"


class DiagnosticContradiction(RuntimeError):
    """Parameter test and spectral cross-check disagree."""


@dataclass(frozen=True)
class TopoReport:
    alpha: float
    beta: float
    M: int
    classification: str
    lambda_same: float
    lambda_shift: float
    degeneracy_even: int
    degeneracy_grown: bool

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "M": self.M,
                "class": self.classification,
                "lambda_same_flux": self.lambda_same,
                "lambda_flux_shift": self.lambda_shift,
                "degeneracy": self.degeneracy_even,
                "degeneracy_grown": self.degeneracy_grown}


def topo_diagnostic(alpha: float, beta: float, M: int, rtol: float = 1e-8) -> TopoReport:
    """Classify a parameter point, cross-checking the exact test spectrally.

    The parameter test calls a point trivial iff alpha = 1 or beta = 1 or
    alpha = beta = 0; the spectral cross-check detects leading-eigenvalue
    degeneracy growth with the circumference for those points, and a strict
    gap between same-flux and flux-shifted leaders with non-degenerate
    same-flux leaders otherwise.  A contradiction raises instead of being
    silently resolved.
    """
    if M % 2 != 0:
        raise TransferError("circumference must be even")
    param_ghz = (alpha == 1.0) or (beta == 1.0) or (alpha == 0.0 and beta == 0.0)

    blocks = transfer_blocks(alpha, beta, M)
    blocks_next = transfer_blocks(alpha, beta, M + 2)
    be, bo = blocks[("even", 0.0)], blocks[("odd", 0.0)]
    bshift = blocks[("even", math.pi)]
    lam_same = float(abs(be.leading()))
    lam_shift = float(abs(bshift.leading()))
    deg = be.leading_degeneracy(rtol)
    deg_next = blocks_next[("even", 0.0)].leading_degeneracy(rtol)
    grown = deg_next > deg

    spectral_ghz = grown
    parity_leaders_match = abs(abs(be.leading()) - abs(bo.leading())) <= 1e-10 * max(lam_same, 1.0)
    spectral_tc = (deg == 1 and not grown and parity_leaders_match
                   and lam_shift < lam_same * (1.0 - 1e-6))
    if param_ghz and not spectral_ghz:
        raise DiagnosticContradiction(
            f"({alpha}, {beta}): parameter test says {GHZ_POINT} but degeneracy "
            f"did not grow ({deg} -> {deg_next})")
    if not param_ghz and not spectral_tc:
        raise DiagnosticContradiction(
            f"({alpha}, {beta}): parameter test says {TORIC_PHASE} but spectrum "
            f"disagrees (deg {deg} -> {deg_next}, |l_same| {lam_same}, |l_shift| {lam_shift})")
    return TopoReport(alpha=alpha, beta=beta, M=M,
                      classification=GHZ_POINT if param_ghz else TORIC_PHASE,
                      lambda_same=lam_same, lambda_shift=lam_shift,
                      degeneracy_even=deg, degeneracy_grown=grown)
