"""Open-boundary lattices, the exact dense oracle, and the solvable reductions.

A lattice holds an N x M bulk of rank-5 tensors plus the default boundary:
every bulk-facing boundary leg pairs with one physical boundary site.  Input
sides (left, bottom) carry chi^{-1/2} pair normalization, output sides
(right, top) read out isometrically.  The perimeter chains terminate in four
chi^2-dimensional corner sites whose joint state is a fixed product of four
maximally entangled pairs, decoupled from everything else, so dense oracles
work on the bulk+edge factor and attach the corner factor only on request.

Site addresses are tuples:
    ("bulk", x, y)   x in 1..N (column), y in 1..M (row)
    ("left", y), ("right", y), ("bottom", x), ("top", x)
    ("corner", c)    c in {"bl", "br", "tl", "tr"}

The efficient paths implement the two reductions valid on the doubly isometric
variety: a local observable contracts as a single-column 1D channel chain, and
a two-point function as two 1D legs plus an exactly contracted rectangular
patch anchored at the lower operator.  Both refuse off-variety input unless
forced; both are validated against the dense oracle in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conditions import CheckError, check_di
from .families import boundary_default
from .tensors import ObservableVec, PepsTensor, cap, fold, fold_with_operator

DENSE_GUARD = 2 ** 24
PATCH_GUARD = 2 ** 20


class GuardError(ValueError):
    """Raised when a contraction would exceed its size guard."""


@dataclass(frozen=True)
class Lattice:
    """N x M bulk grid with the default solvable boundary."""

    N: int
    M: int
    chi: int
    bulk: dict

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be >= 1")
        for x in range(1, self.N + 1):
            for y in range(1, self.M + 1):
                T = self.bulk.get((x, y))
                if T is None:
                    raise ValueError(f"missing bulk tensor at {(x, y)}")
                if T.chi != self.chi:
                    raise ValueError(f"bond dimension mismatch at {(x, y)}")
        object.__setattr__(self, "bulk", dict(self.bulk))

    @classmethod
    def uniform(cls, N: int, M: int, T: PepsTensor) -> "Lattice":
        return cls(N=N, M=M, chi=T.chi,
                   bulk={(x, y): T for x in range(1, N + 1) for y in range(1, M + 1)})

    def tensor(self, x: int, y: int) -> PepsTensor:
        return self.bulk[(x, y)]

    def boundary(self, kind: str):
        return boundary_default(self.chi, kind)

    def sites(self, include_corners: bool = False) -> list:
        """Physical sites in canonical order with their local dimensions."""
        out = []
        for x in range(1, self.N + 1):
            out.append((("bottom", x), self.chi))
        for y in range(1, self.M + 1):
            out.append((("left", y), self.chi))
            for x in range(1, self.N + 1):
                out.append((("bulk", x, y), self.tensor(x, y).d))
            out.append((("right", y), self.chi))
        for x in range(1, self.N + 1):
            out.append((("top", x), self.chi))
        if include_corners:
            for c in ("bl", "br", "tl", "tr"):
                out.append((("corner", c), self.chi ** 2))
        return out

    def n_physical_sites(self) -> int:
        """Bulk plus edge sites; equals (N+2)(M+2) - 4."""
        return self.N * self.M + 2 * (self.N + self.M)

    def dense_dim(self, include_corners: bool = False) -> int:
        dim = 1
        for _, d in self.sites(include_corners):
            dim *= d
        return dim

    def check(self, tol: float = 1e-8) -> float:
        """Worst condition residual over all bulk tensors."""
        worst = 0.0
        for T in self.bulk.values():
            rep = check_di(T, tol=tol)
            worst = max(worst, rep.residual_iso, rep.residual_dual)
        return worst


# ---------------------------------------------------------------------------
# Dense oracle

@dataclass(frozen=True)
class DenseState:
    sites: tuple
    dims: tuple
    psi: np.ndarray

    def site_axis(self, site) -> int:
        return self.sites.index(tuple(site))

    def vector(self) -> np.ndarray:
        return self.psi.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))


def _corner_factor(chi: int) -> np.ndarray:
    """Four maximally entangled chain pairs on the corner sites (bl, br, tl, tr)."""
    c = chi
    psi = np.zeros((c, c) * 4, dtype=complex)  # (vertical, horizontal) pair per corner
    for wl in range(c):
        for wb in range(c):
            for wt in range(c):
                for wr in range(c):
                    psi[wl, wb, wr, wb, wl, wt, wr, wt] = 1.0
    psi /= c ** 2
    return psi.reshape((c * c,) * 4)


def dense_state(lat: Lattice, include_corners: bool = False,
                guard: int = DENSE_GUARD) -> DenseState:
    """Exact wavefunction by column-by-column boundary absorption."""
    dim = lat.dense_dim(include_corners)
    if dim > guard:
        raise GuardError(f"dense dimension {dim} exceeds guard {guard}")
    chi, N, M = lat.chi, lat.N, lat.M
    s = 1.0 / math.sqrt(chi)
    pair_in = s * np.eye(chi, dtype=complex)

    psi = np.ones((), dtype=complex)
    phys_order: list = []
    open_axes: dict = {}

    def reindex(removed):
        for k in list(open_axes):
            open_axes[k] -= sum(1 for r in removed if r < open_axes[k])

    for y in range(1, M + 1):
        psi = np.tensordot(psi, pair_in, axes=0)   # appends (p_left, leg)
        phys_order.append(("left", y))
        open_axes[("h", y)] = psi.ndim - 1

    for x in range(1, N + 1):
        psi = np.tensordot(psi, pair_in, axes=0)
        phys_order.append(("bottom", x))
        open_axes[("v", x)] = psi.ndim - 1
        for y in range(1, M + 1):
            ax_l, ax_b = open_axes.pop(("h", y)), open_axes.pop(("v", x))
            psi = np.tensordot(psi, lat.tensor(x, y).entries, axes=([ax_l, ax_b], [1, 2]))
            reindex([ax_l, ax_b])
            phys_order.append(("bulk", x, y))
            open_axes[("h", y)] = psi.ndim - 2
            open_axes[("v", x)] = psi.ndim - 1
        ax = open_axes.pop(("v", x))       # top read-out: the leg becomes the site
        psi = np.moveaxis(psi, ax, -1)
        reindex([ax])
        phys_order.append(("top", x))

    for y in range(1, M + 1):
        ax = open_axes.pop(("h", y))
        psi = np.moveaxis(psi, ax, -1)
        reindex([ax])
        phys_order.append(("right", y))

    canonical = [site for site, _ in lat.sites(include_corners=False)]
    perm = [phys_order.index(site) for site in canonical]
    psi = np.ascontiguousarray(psi.transpose(perm))
    sites = tuple(canonical)
    if include_corners:
        psi = np.tensordot(psi, _corner_factor(chi), axes=0)
        sites = sites + (("corner", "bl"), ("corner", "br"), ("corner", "tl"), ("corner", "tr"))
    return DenseState(sites=sites, dims=tuple(psi.shape), psi=psi)


def _apply_observable(sites, dims, psi, obs: ObservableVec) -> np.ndarray:
    axes = [sites.index(tuple(site)) for site in obs.support]
    block = [dims[a] for a in axes]
    O = obs.matrix().reshape(tuple(block) + tuple(block))
    n = len(axes)
    out = np.tensordot(O, psi, axes=(list(range(n, 2 * n)), axes))
    return np.moveaxis(out, list(range(n)), axes)


def dense_expectation(lat: Lattice, obs, guard: int = DENSE_GUARD) -> complex:
    """<psi| prod O |psi> by dense evaluation; the oracle for the efficient paths."""
    if isinstance(obs, ObservableVec):
        obs = [obs]
    for o in obs:
        for site in o.support:
            if site[0] == "corner":
                raise ValueError("corner sites carry a fixed decoupled state")
    state = dense_state(lat, include_corners=False, guard=guard)
    psi = state.psi
    for o in obs:
        psi = _apply_observable(state.sites, state.dims, psi, o)
    return complex(np.vdot(state.psi, psi))


# ---------------------------------------------------------------------------
# Kraus/channel view

@dataclass(frozen=True)
class Channel:
    """Kraus family E^p mapping the doubled (l, b) space to the doubled (t, r) space."""

    chi: int
    kraus: tuple

    def trace_preserving_residual(self) -> float:
        c2 = self.chi ** 2
        S = sum(E.conj().T @ E for E in self.kraus)
        return float(np.linalg.norm(S - np.eye(c2)))

    def dual_unital_residual(self) -> float:
        """Residual of the space-direction identity sum_{l,t} E E* = delta delta."""
        c = self.chi
        K = np.stack(self.kraus).reshape(len(self.kraus), c, c, c, c)  # p t r l b
        M = np.einsum("ptrlb,ptslc->rbsc", K, np.conj(K))
        return float(np.linalg.norm(M.reshape(c * c, c * c) - np.eye(c * c)))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(E @ rho @ E.conj().T for E in self.kraus)


def channel_from_tensor(T: PepsTensor) -> Channel:
    """Kraus operators E^p_{(t,r),(l,b)} = T^p_{lbrt}."""
    c = T.chi
    kraus = tuple(T.entries[p].transpose(3, 2, 0, 1).reshape(c * c, c * c)
                  for p in range(T.d))
    return Channel(chi=c, kraus=kraus)


# ---------------------------------------------------------------------------
# Folded building blocks

def _folded_open(T: PepsTensor) -> np.ndarray:
    """Folded tensor with the doubled physical pair kept open as a trailing axis."""
    c = T.chi
    F = np.einsum("iabcd,jefgh->aebfcgdhij", np.conj(T.entries), T.entries)
    return F.reshape((c * c,) * 4 + (T.d * T.d,))


def _channel_matrix(T: PepsTensor, O=None) -> np.ndarray:
    """Folded tensor with caps on l and r: matrix mapping the doubled b leg to t."""
    c2 = T.chi ** 2
    F = fold(T).entries if O is None else fold_with_operator(T, O)
    v = cap(T.chi)
    M = np.tensordot(v, F, axes=([0], [0]))       # b r t
    M = np.tensordot(v, M, axes=([0], [1]))       # b t
    return M.T.reshape(c2, c2)                    # t <- b


def _closure_vector(T: PepsTensor, O) -> np.ndarray:
    """Folded tensor with the observable inserted and caps on l, r, t: bra on b."""
    F = fold_with_operator(T, O)
    v = cap(T.chi)
    w = np.tensordot(v, F, axes=([0], [0]))       # b r t
    w = np.tensordot(w, v, axes=([1], [0]))       # b t
    return np.tensordot(w, v, axes=([1], [0]))    # b


# ---------------------------------------------------------------------------
# Local observables (single-column reduction)

@dataclass(frozen=True)
class ReducedResult:
    value: complex
    cost: int                 # folded-tensor applications performed
    residual: float           # worst condition residual over the lattice
    method: str

    def as_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "method": self.method,
                "residuals": self.residual, "cost": self.cost}


def _require_di(lat: Lattice, tol: float, force: bool):
    worst = lat.check(tol=tol)
    if worst > tol and not force:
        raise CheckError(
            f"lattice violates the two isometric conditions (worst residual {worst:.3e}); "
            "the reduction is invalid -- pass force=True to contract anyway (untrusted)")
    return worst, ("reduced" if worst <= tol else "reduced-forced")


def _bulk_support(lat: Lattice, obs: ObservableVec):
    for site in obs.support:
        if site[0] != "bulk":
            raise ValueError("efficient paths support bulk-site observables only")
        _, x, y = site
        if not (1 <= x <= lat.N and 1 <= y <= lat.M):
            raise ValueError(f"site {site} outside the bulk")


def local_expectation(lat: Lattice, obs: ObservableVec, tol: float = 1e-8,
                      force: bool = False) -> ReducedResult:
    """Local expectation via the single-column 1D channel chain.

    Cost is linear in the observable's row and independent of its column.
    Contiguous multi-column support in one row is blocked into channel steps
    of the support's width.
    """
    worst, method = _require_di(lat, tol, force)
    _bulk_support(lat, obs)
    if len(obs.support) == 1:
        _, x, y = obs.support[0]
        v = cap(lat.chi)
        cost = 0
        for j in range(1, y):
            v = _channel_matrix(lat.tensor(x, j)) @ v
            cost += 1
        z = _closure_vector(lat.tensor(x, y), obs.matrix())
        cost += 1
        return ReducedResult(value=complex(z @ v), cost=cost, residual=worst, method=method)
    return _blocked_local(lat, obs, worst, method)


def _blocked_row(lat: Lattice, xs, j: int, open_phys: bool) -> tuple:
    """One row of folded tensors over columns xs, side legs capped.

    Returns (array, names); axes are named t{k}, b{k} and ph{k} when open.
    """
    v = cap(lat.chi)
    arr, names = None, []
    for k, x in enumerate(xs):
        T = lat.tensor(x, j)
        F = _folded_open(T) if open_phys else fold(T).entries
        fnames = ["l", f"b{k}", "r", f"t{k}"] + ([f"ph{k}"] if open_phys else [])
        if k == 0:
            arr = np.tensordot(v, F, axes=([0], [0]))
            names = fnames[1:]
        else:
            ax = names.index("r")
            arr = np.tensordot(arr, F, axes=([ax], [0]))
            names = [n for i, n in enumerate(names) if i != ax] + fnames[1:]
    ax = names.index("r")
    arr = np.tensordot(arr, v, axes=([ax], [0]))
    names = [n for i, n in enumerate(names) if i != ax]
    return arr, names


def _blocked_local(lat: Lattice, obs: ObservableVec, worst: float, method: str) -> ReducedResult:
    ys = {s[2] for s in obs.support}
    if len(ys) != 1:
        raise ValueError("blocked support must occupy a single row")
    y = ys.pop()
    xs = sorted(s[1] for s in obs.support)
    if xs != list(range(xs[0], xs[0] + len(xs))):
        raise ValueError("blocked support must be contiguous columns")
    if tuple(obs.support) != tuple(("bulk", x, y) for x in xs):
        raise ValueError("support sites must be ordered left to right")
    w = len(xs)
    c2 = lat.chi ** 2
    if c2 ** (2 * w) > PATCH_GUARD:
        raise GuardError(f"support width {w} exceeds the declared block width")
    v = cap(lat.chi)
    state = np.ones((), dtype=complex)
    for _ in range(w):
        state = np.tensordot(state, v, axes=0)     # caps entering the b legs
    cost = 0
    for j in range(1, y):
        arr, names = _blocked_row(lat, xs, j, open_phys=False)
        b_axes = [names.index(f"b{k}") for k in range(w)]
        state = np.tensordot(arr, state, axes=(b_axes, list(range(w))))
        # remaining axes are t0..t{w-1} in name order
        rem = [n for i, n in enumerate(names) if i not in b_axes]
        state = state.transpose([rem.index(f"t{k}") for k in range(w)])
        cost += 1
    arr, names = _blocked_row(lat, xs, y, open_phys=True)
    b_axes = [names.index(f"b{k}") for k in range(w)]
    out = np.tensordot(arr, state, axes=(b_axes, list(range(w))))
    rem = [n for i, n in enumerate(names) if i not in b_axes]
    cost += 1
    for k in range(w):                             # cap the top legs
        ax = rem.index(f"t{k}")
        out = np.tensordot(out, v, axes=([ax], [0]))
        rem.pop(ax)
    out = out.transpose([rem.index(f"ph{k}") for k in range(w)])
    d_loc = lat.tensor(xs[0], y).d
    Ovec = obs.entries.reshape((d_loc,) * w + (d_loc,) * w)
    perm = []
    for k in range(w):
        perm += [k, w + k]
    Ovec = Ovec.transpose(perm).reshape([d_loc * d_loc] * w)
    val = complex(np.tensordot(Ovec, out, axes=(list(range(w)), list(range(w)))))
    return ReducedResult(value=val, cost=cost, residual=worst, method=method)


# ---------------------------------------------------------------------------
# Two-point functions (patch reduction)

def _column_tensor(lat: Lattice, x: int, height: int, op_row: int | None,
                   O, open_top: bool) -> tuple:
    """Column of folded tensors from the bottom cap up to the given height.

    Returns (array, names) with axes l1..lh, r1..rh and t when open_top.
    """
    v = cap(lat.chi)
    arr, names = v.copy(), ["carry"]
    for j in range(1, height + 1):
        T = lat.tensor(x, j)
        F = fold(T).entries if j != op_row else fold_with_operator(T, O)
        ax = names.index("carry")
        arr = np.tensordot(arr, F, axes=([ax], [1]))
        names = [n for i, n in enumerate(names) if i != ax] + [f"l{j}", f"r{j}", "carry"]
    ax = names.index("carry")
    if open_top:
        names[ax] = "t"
    else:
        arr = np.tensordot(arr, v, axes=([ax], [0]))
        names = [n for i, n in enumerate(names) if i != ax]
    return arr, names


def two_point(lat: Lattice, obs1: ObservableVec, obs2: ObservableVec,
              tol: float = 1e-8, force: bool = False,
              guard: int = PATCH_GUARD) -> ReducedResult:
    """Two-point function via the reduced network: a patch plus two 1D legs.

    The patch spans the columns between the operators and the rows below the
    lower one; it is contracted column by column with exact dense
    intermediates.  Degenerate placements (same column, or same row) reduce to
    the pure-1D special cases automatically.
    """
    worst, method = _require_di(lat, tol, force)
    for o in (obs1, obs2):
        _bulk_support(lat, o)
        if len(o.support) != 1:
            raise ValueError("two_point takes single-site observables")
    (_, x1, y1), (_, x2, y2) = obs1.support[0], obs2.support[0]
    if (x1, y1) == (x2, y2):
        raise ValueError("operators coincide; multiply them and use local_expectation")
    if y1 > y2:
        (x1, y1, obs1), (x2, y2, obs2) = (x2, y2, obs2), (x1, y1, obs1)
    xl, xr = min(x1, x2), max(x1, x2)
    c2 = lat.chi ** 2
    if c2 ** (2 * y1 + 1) > guard:
        raise GuardError(
            f"patch intermediate would hold {c2 ** (2 * y1 + 1)} amplitudes (> {guard})")

    has_leg = y2 > y1
    ops_in_patch = {(x1, y1): obs1.matrix()}
    if not has_leg:
        ops_in_patch[(x2, y2)] = obs2.matrix()

    v = cap(lat.chi)
    interface = None          # axes: r1..r{y1} of the last processed column (+ "t" spectator)
    cost = 0
    for x in range(xl, xr + 1):
        O = ops_in_patch.get((x, y1))
        open_top = has_leg and x == x2
        arr, names = _column_tensor(lat, x, y1, y1 if O is not None else None, O, open_top)
        cost += y1
        l_axes = [names.index(f"l{j}") for j in range(1, y1 + 1)]
        if x == xl:
            for ax in sorted(l_axes, reverse=True):
                arr = np.tensordot(arr, v, axes=([ax], [0]))
                names.pop(ax)
            interface, inames = arr, names
        else:
            r_axes = [inames.index(f"r{j}") for j in range(1, y1 + 1)]
            interface = np.tensordot(arr, interface, axes=(l_axes, r_axes))
            names_left = [n for i, n in enumerate(names) if i not in l_axes]
            inames = names_left + [n for i, n in enumerate(inames) if i not in r_axes]
        # keep a spectator "t" axis if present; nothing else to do positionally
    r_axes = sorted((inames.index(f"r{j}") for j in range(1, y1 + 1)), reverse=True)
    for ax in r_axes:
        interface = np.tensordot(interface, v, axes=([ax], [0]))
        inames.pop(ax)
    if not has_leg:
        return ReducedResult(value=complex(interface), cost=cost, residual=worst, method=method)
    assert inames == ["t"]
    vec = interface
    for j in range(y1 + 1, y2):
        vec = _channel_matrix(lat.tensor(x2, j)) @ vec
        cost += 1
    z = _closure_vector(lat.tensor(x2, y2), obs2.matrix())
    cost += 1
    return ReducedResult(value=complex(z @ vec), cost=cost, residual=worst, method=method)


# ---------------------------------------------------------------------------
# General folded-network evaluation (norms, pinned sites, reduced overlaps)

def folded_value(lat: Lattice, site_ops: dict | None = None, open_sites=(),
                 guard: int = DENSE_GUARD) -> np.ndarray:
    """Contract <psi| (x)_s A_s |psi> in the folded picture, column by column.

    site_ops maps sites to operators inserted at those sites (identity
    elsewhere); open_sites lists sites whose doubled physical legs stay open.
    Returns a scalar array, or a tensor with one (bra, ket)-flattened axis of
    dimension d_s^2 per open site, in the given order.  Corner sites carry a
    fixed decoupled normalized state and accept no operators.
    """
    site_ops = {tuple(k): np.asarray(v, dtype=complex) for k, v in (site_ops or {}).items()}
    open_sites = [tuple(s) for s in open_sites]
    for s in list(site_ops) + open_sites:
        if s[0] == "corner":
            raise ValueError("corner sites carry a fixed decoupled state")
    chi, N, M = lat.chi, lat.N, lat.M
    c2 = chi * chi

    def edge_vec(site, scale):
        """Folded input/read-out edge on its doubled bulk leg."""
        A = site_ops.get(site)
        if site in open_sites:
            X = scale * np.eye(c2, dtype=complex)   # (leg doubled, phys doubled)
            if A is not None:
                raise ValueError(f"site {site} cannot be both pinned and open")
            return X, True
        A = np.eye(chi, dtype=complex) if A is None else A
        return scale * A.reshape(-1), False         # vector on the doubled leg

    acc = np.ones((), dtype=complex)
    open_axes: dict = {}
    phys_open: list = []

    def reindex(removed):
        for k in list(open_axes):
            open_axes[k] -= sum(1 for r in removed if r < open_axes[k])

    def guard_check():
        if acc.size > guard:
            raise GuardError(f"folded intermediate {acc.size} exceeds guard {guard}")

    for y in range(1, M + 1):
        X, is_open = edge_vec(("left", y), 1.0 / chi)
        acc = np.tensordot(acc, X, axes=0)
        if is_open:
            open_axes[("h", y)] = acc.ndim - 2
            phys_open.append((("left", y), acc.ndim - 1))
        else:
            open_axes[("h", y)] = acc.ndim - 1
        guard_check()

    for x in range(1, N + 1):
        X, is_open = edge_vec(("bottom", x), 1.0 / chi)
        acc = np.tensordot(acc, X, axes=0)
        if is_open:
            open_axes[("v", x)] = acc.ndim - 2
            phys_open.append((("bottom", x), acc.ndim - 1))
        else:
            open_axes[("v", x)] = acc.ndim - 1
        guard_check()
        for y in range(1, M + 1):
            site = ("bulk", x, y)
            T = lat.tensor(x, y)
            if site in open_sites:
                F = _folded_open(T)
            elif site in site_ops:
                F = fold_with_operator(T, site_ops[site])
            else:
                F = fold(T).entries
            ax_l, ax_b = open_axes.pop(("h", y)), open_axes.pop(("v", x))
            acc = np.tensordot(acc, F, axes=([ax_l, ax_b], [0, 1]))
            reindex([ax_l, ax_b])
            if site in open_sites:
                phys_open.append((site, acc.ndim - 1))
                open_axes[("h", y)] = acc.ndim - 3
                open_axes[("v", x)] = acc.ndim - 2
            else:
                open_axes[("h", y)] = acc.ndim - 2
                open_axes[("v", x)] = acc.ndim - 1
            guard_check()
        site = ("top", x)
        X, is_open = edge_vec(site, 1.0)
        ax = open_axes.pop(("v", x))
        acc = np.tensordot(acc, X, axes=([ax], [0]))
        reindex([ax])
        if is_open:
            phys_open.append((site, acc.ndim - 1))
        guard_check()

    for y in range(1, M + 1):
        site = ("right", y)
        X, is_open = edge_vec(site, 1.0)
        ax = open_axes.pop(("h", y))
        acc = np.tensordot(acc, X, axes=([ax], [0]))
        reindex([ax])
        if is_open:
            phys_open.append((site, acc.ndim - 1))
        guard_check()

    if not open_sites:
        return acc
    # tensordot preserves the relative order of surviving axes, so the
    # remaining axes are exactly the open physical ones in creation order
    assert acc.ndim == len(open_sites)
    created = [s for s, _ in phys_open]
    perm = [created.index(s) for s in open_sites]
    return acc.transpose(perm)


def expect_joint(lat: Lattice, sites, A: np.ndarray, site_ops: dict | None = None) -> complex:
    """<psi| (pins) (x) A_joint |psi> with A acting jointly on the given sites."""
    R = folded_value(lat, site_ops=site_ops, open_sites=sites)
    dims = []
    lookup = dict(lat.sites(include_corners=True))
    for s in sites:
        dims.append(lookup[tuple(s)])
    n = len(dims)
    R = R.reshape([d for dd in dims for d in (dd, dd)])   # (bra_s, ket_s) per site
    bra = list(range(0, 2 * n, 2))
    ket = list(range(1, 2 * n, 2))
    R = R.transpose(bra + ket).reshape(math.prod(dims), math.prod(dims))
    A = np.asarray(A, dtype=complex).reshape(math.prod(dims), math.prod(dims))
    return complex(np.einsum("bk,bk->", A, R))
