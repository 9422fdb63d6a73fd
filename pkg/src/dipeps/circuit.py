"""Brickwork circuit simulation and its encoding into the tensor class.

The virtual space of a lattice, read along the diagonal, is a 1+1D brickwork
circuit: the tensor at (x, y) is a gate from its (l, b) legs to (t, r), acting
at time slice s = x + y on the two wire lanes adjacent to u = x - y.  Wires
zigzag up-right inside fixed diagonal lanes; a pass-through tensor is a lane
crossing, so the encoder needs only four ingredients:

* pair-source tensors along one slice prepare the initial entangled pairs and
  dump the junk arriving from the lower-left region into their physical legs,
* gate tensors apply the circuit's two-qubit gates where adjacent lanes meet,
* transmitting boundary tensors flank the band where an edge wire idles,
  heralding a joint outcome whose first-Bell component transmits the wire
  cleanly; those components are what the pattern pins,
* crossing tensors fill everything else and route the outputs straight to the
  top/right read-out boundary.

The brickwork convention, shared by simulator and encoder, is that layer 1
couples the even-start pairs (2,3), (4,5), ... and layer 2 the odd-start
pairs; the initial state entangles pairs (1,2), (3,4), ... and an odd trailing
wire starts in |0>, seeded in the encoding by pinning one bottom boundary site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conditions import check_dual_unitary
from .contraction import Lattice, dense_state, expect_joint, folded_value
from .families import complexity_tensors
from .gates import random_dual_unitary, swap_gate

SIM_WIDTH_GUARD = 12
ENCODE_SIZE_GUARD = 400


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class DuCircuit:
    """Brickwork circuit of two-site gates on `width` wires.

    layers[t] lists (a, V) pairs: gate V on wires (a, a+1), 1-based, with the
    matrix convention V[(out_a, out_{a+1}), (in_a, in_{a+1})].  Every gate must
    pass the dual-unitarity check.
    """

    width: int
    layers: tuple

    def __post_init__(self):
        if self.width < 1:
            raise CircuitError("width must be >= 1")
        layers = []
        for t, layer in enumerate(self.layers, start=1):
            start = 2 if t % 2 == 1 else 1
            fixed = []
            for (a, V) in layer:
                V = np.asarray(V, dtype=complex)
                if not (1 <= a < self.width):
                    raise CircuitError(f"gate start {a} out of range")
                if (a - start) % 2 != 0:
                    raise CircuitError(
                        f"layer {t} couples pairs starting at {start}, {start + 2}, ...")
                rep = check_dual_unitary(V, tol=1e-12)
                if not rep.passed:
                    raise CircuitError(
                        f"gate on ({a},{a + 1}) in layer {t} is not dual-unitary "
                        f"({rep.residual_iso:.2e}, {rep.residual_dual:.2e})")
                fixed.append((a, V))
            layers.append(tuple(sorted(fixed)))
        object.__setattr__(self, "layers", tuple(layers))

    @property
    def depth(self) -> int:
        return len(self.layers)


def brickwork_pairs(width: int, layer: int):
    start = 2 if layer % 2 == 1 else 1
    return [a for a in range(start, width, 2)]


def random_brickwork(width: int, depth: int, seed) -> DuCircuit:
    rng = np.random.default_rng(seed)
    layers = []
    for t in range(1, depth + 1):
        layers.append(tuple((a, random_dual_unitary(rng)) for a in brickwork_pairs(width, t)))
    return DuCircuit(width=width, layers=tuple(layers))


def swap_circuit(width: int, depth: int) -> DuCircuit:
    layers = []
    for t in range(1, depth + 1):
        layers.append(tuple((a, swap_gate()) for a in brickwork_pairs(width, t)))
    return DuCircuit(width=width, layers=tuple(layers))


def epr_chain_state(width: int) -> np.ndarray:
    """Pairs (1,2), (3,4), ... entangled; an odd trailing wire starts in |0>."""
    pair = np.zeros(4)
    pair[0] = pair[3] = 1.0 / math.sqrt(2)
    psi = np.array([1.0])
    for _ in range(width // 2):
        psi = np.kron(psi, pair)
    if width % 2 == 1:
        psi = np.kron(psi, np.array([1.0, 0.0]))
    return psi.astype(complex)


def apply_two_qubit(psi: np.ndarray, V: np.ndarray, a: int, width: int) -> np.ndarray:
    """Apply V on wires (a, a+1), wire 1 being the first tensor factor."""
    phi = psi.reshape([2] * width)
    op = V.reshape(2, 2, 2, 2)
    phi = np.tensordot(op, phi, axes=([2, 3], [a - 1, a]))
    phi = np.moveaxis(phi, [0, 1], [a - 1, a])
    return phi.reshape(-1)


def simulate_circuit(c: DuCircuit) -> np.ndarray:
    """Dense state-vector simulation from the entangled-pair initial state."""
    if c.width > SIM_WIDTH_GUARD:
        raise CircuitError(f"width {c.width} exceeds the guard {SIM_WIDTH_GUARD}")
    psi = epr_chain_state(c.width)
    for layer in c.layers:
        for (a, V) in layer:
            psi = apply_two_qubit(psi, V, a, c.width)
    return psi


# ---------------------------------------------------------------------------
# Post-selection patterns

@dataclass(frozen=True)
class Pin:
    """Fixed outcome at one site: the whole index, or one factor of a 4x4 site."""

    kind: str            # "full" or "factor"
    value: int
    factor: int = 0      # 1 or 2 for bipartite pins

    def projector(self, dim: int) -> np.ndarray:
        if self.kind == "full":
            P = np.zeros((dim, dim), dtype=complex)
            P[self.value, self.value] = 1.0
            return P
        if dim != 16:
            raise CircuitError("factor pins apply to bipartite 16-dimensional sites")
        e = np.zeros((4, 4), dtype=complex)
        e[self.value, self.value] = 1.0
        return np.kron(e, np.eye(4)) if self.factor == 1 else np.kron(np.eye(4), e)


@dataclass(frozen=True)
class PostselectPattern:
    pins: dict           # site -> Pin

    def __post_init__(self):
        object.__setattr__(self, "pins", {tuple(k): v for k, v in self.pins.items()})

    def projectors(self, lat: Lattice) -> dict:
        dims = dict(lat.sites(include_corners=True))
        return {site: pin.projector(dims[site]) for site, pin in self.pins.items()}


# ---------------------------------------------------------------------------
# Encoding

@dataclass(frozen=True)
class EncodingInfo:
    lattice: Lattice
    pattern: PostselectPattern
    readout: tuple          # ((wire, site), ...) in wire order
    placements: dict        # (x, y) -> color string
    expected_probability: float
    circuit: DuCircuit = field(repr=False, default=None)


def _layout(c: DuCircuit):
    """Coordinates of sources, gates, and transmitters; origin chosen so all fit."""
    w, D = c.width, c.depth
    s0 = w + 1 if (w + 1) % 2 == 1 else w + 2   # smallest odd slice >= w+1
    def site(s, L):
        x, y = (s + L) // 2, (s - L) // 2
        if (s + L) % 2 != 0:
            raise CircuitError("parity violation in layout")
        return (x, y)

    sources = {k: site(s0, 2 * k - 1) for k in range(1, w // 2 + 1)}
    gates = {}
    for t, layer in enumerate(c.layers, start=1):
        for (a, V) in layer:
            gates[site(s0 + t, a)] = (t, a, V)
    mirrors = {}
    for t in range(1, D):                        # a transmitter only feeds a next gate
        if t % 2 == 1:
            mirrors[site(s0 + t, 0)] = "left"
        if t % 2 == (w + 1) % 2:
            mirrors[site(s0 + t, w)] = "right"
    seed_col = None
    if w % 2 == 1 and D >= 1 and brickwork_pairs(w, 1):
        # trailing wire rises from the bottom boundary into its first gate
        gx, _ = site(s0 + 1, w - 1)
        seed_col = gx
    return s0, sources, gates, mirrors, seed_col


def _trace_wires(c: DuCircuit, sources, gates, mirrors, seed_col, N, M):
    """Follow every wire through the placement; returns exits and checks gates."""
    w = c.width
    state = {}
    for k, (x, y) in sources.items():
        state[2 * k - 1] = ((x, y + 1), "b")
        state[2 * k] = ((x + 1, y), "l")
    if w % 2 == 1:
        if seed_col is not None:
            state[w] = ((seed_col, 1), "b")
    gate_hits = {pos: {} for pos in gates}
    exits = {}
    for wire in sorted(state):
        pos, leg = state[wire]
        for _ in range(4 * (N + M) + 16):
            x, y = pos
            if y > M:
                exits[wire] = ("top", x)
                break
            if x > N:
                exits[wire] = ("right", y)
                break
            if pos in gates:
                t, a, _ = gates[pos]
                gate_hits[pos][leg] = wire
                expected = a if leg == "l" else a + 1
                if wire != expected:
                    raise CircuitError(
                        f"wire {wire} reached gate {(t, a)} at {pos} on leg {leg}")
                pos, leg = ((x, y + 1), "b") if leg == "l" else ((x + 1, y), "l")
            elif pos in mirrors:
                pos, leg = ((x + 1, y), "l") if leg == "b" else ((x, y + 1), "b")
            elif pos in sources.values():
                raise CircuitError(f"wire {wire} ran into a pair source at {pos}")
            else:                                   # crossing tensor
                pos, leg = ((x, y + 1), "b") if leg == "b" else ((x + 1, y), "l")
        else:
            raise CircuitError(f"wire {wire} failed to exit the lattice")
    for pos, hits in gate_hits.items():
        if set(hits) != {"l", "b"}:
            raise CircuitError(f"gate at {pos} missing inputs: got {hits}")
    return exits


def encode(c: DuCircuit, U_iso=None) -> EncodingInfo:
    """Embed the circuit into a lattice plus a post-selection pattern.

    Every placed tensor is a member of the class (checked by construction);
    the pattern pins the transmitters' band-side Bell component and, for odd
    width, one bottom boundary site to |0>.
    """
    if c.width < 2:
        raise CircuitError("encoding needs at least two wires")
    s0, sources, gates, mirrors, seed_col = _layout(c)
    all_pos = list(sources.values()) + list(gates) + list(mirrors)
    if len(set(all_pos)) != len(all_pos):
        raise CircuitError("layout conflict")
    N = max(x for x, _ in all_pos) + 1
    M = max(y for _, y in all_pos) + 1
    if N * M > ENCODE_SIZE_GUARD:
        raise CircuitError(f"layout {N}x{M} exceeds the size guard")
    exits = _trace_wires(c, sources, gates, mirrors, seed_col, N, M)

    base = complexity_tensors(swap_gate(), U_iso=U_iso)
    bulk = {}
    placements = {}
    for (x, y) in [(i, j) for i in range(1, N + 1) for j in range(1, M + 1)]:
        bulk[(x, y)] = base["grey"]
        placements[(x, y)] = "grey"
    for pos in sources.values():
        bulk[pos] = base["dark_blue"]
        placements[pos] = "dark_blue"
    for pos, side in mirrors.items():
        bulk[pos] = base["light_green"]
        placements[pos] = f"light_green_{side}"
    for pos, (t, a, V) in gates.items():
        bulk[pos] = complexity_tensors(V, U_iso=U_iso)["orange"]
        placements[pos] = f"orange_{t}_{a}"
    lat = Lattice(N=N, M=M, chi=2, bulk=bulk)

    pins = {}
    for pos, side in mirrors.items():
        # left transmitters pass the band wire through their (r, b) pair,
        # right transmitters through (l, t); pin that factor to the first Bell state
        pins[("bulk",) + pos] = Pin(kind="factor", factor=2 if side == "left" else 1, value=0)
    n_seed = 0
    if c.width % 2 == 1 and seed_col is not None:
        pins[("bottom", seed_col)] = Pin(kind="full", value=0)
        n_seed = 1
    pattern = PostselectPattern(pins=pins)
    prob = (0.25 ** len(mirrors)) * (0.5 ** n_seed)
    readout = tuple((wire, exits[wire]) for wire in sorted(exits))
    return EncodingInfo(lattice=lat, pattern=pattern, readout=readout,
                        placements=placements, expected_probability=prob, circuit=c)


# ---------------------------------------------------------------------------
# Post-selected contraction and the equivalence check

def postselect_contract(lat: Lattice, pattern: PostselectPattern, guard=None):
    """Dense contraction with fixed outcomes substituted.

    Returns (state, norm): the unnormalized post-selected state on the
    remaining sites (factor-pinned sites stay, projected) and its norm, the
    post-selection probability amplitude.  Zero-probability patterns are
    reported distinctly.
    """
    kwargs = {} if guard is None else {"guard": guard}
    state = dense_state(lat, include_corners=False, **kwargs)
    psi = state.psi
    sites = list(state.sites)
    for site, pin in sorted(pattern.pins.items(), key=lambda kv: sites.index(kv[0])):
        ax = sites.index(site)
        if pin.kind == "full":
            psi = np.take(psi, pin.value, axis=ax)
            sites.pop(ax)
        else:
            P = pin.projector(psi.shape[ax])
            psi = np.moveaxis(np.tensordot(P, psi, axes=([1], [ax])), 0, ax)
    norm = float(np.linalg.norm(psi))
    if norm < 1e-14:
        raise CircuitError("post-selection pattern has vanishing probability")
    return (tuple(sites), psi), norm


def postselect_probability(lat: Lattice, pattern: PostselectPattern) -> float:
    """Norm^2 of the post-selected state, contracted in the folded picture."""
    val = folded_value(lat, site_ops=pattern.projectors(lat))
    return float(np.real(val))


@dataclass(frozen=True)
class EncodingCheck:
    fidelity: float
    postselect_probability: float
    expected_probability: float
    tensor_residual: float

    def as_dict(self) -> dict:
        return {"fidelity": self.fidelity,
                "postselect_probability": self.postselect_probability,
                "expected_probability": self.expected_probability,
                "residuals": self.tensor_residual}


def check_encoding(enc: EncodingInfo) -> EncodingCheck:
    """Fidelity of the post-selected read-out state against the simulator."""
    c = enc.circuit
    target = simulate_circuit(c)
    sites = [site for _, site in enc.readout]
    pins = enc.pattern.projectors(enc.lattice)
    prob = postselect_probability(enc.lattice, enc.pattern)
    A = np.outer(target, np.conj(target))
    num = expect_joint(enc.lattice, sites, A, site_ops=pins)
    fid = float(np.real(num) / prob)
    residual = enc.lattice.check(tol=1e-12)
    return EncodingCheck(fidelity=fid, postselect_probability=prob,
                         expected_probability=enc.expected_probability,
                         tensor_residual=residual)
