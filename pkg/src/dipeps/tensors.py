"""Dense complex tensors, the PEPS tensor type, folding, and vectorized observables.

Conventions fixed once and used everywhere:

* A PEPS tensor carries five legs in the order ``(p, l, b, r, t)``:
  physical, left, bottom, right, top.  The four virtual legs share one bond
  dimension ``chi``.
* Folding pairs the complex conjugate with the original, conjugate first.
  Every doubled leg is ordered ``(bra, ket)`` and flattened as
  ``bra * chi + ket``.
* Operators are vectorized row-major, ``O_{ij} -> <O|`` with the bra index
  first, so that ``<O| (psi* (x) psi) = <psi|O|psi>``.

All types are immutable after construction and all functions are pure, so
values can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


class TensorShapeError(ValueError):
    """Raised when tensor extents do not line up."""


def as_complex_array(data, shape=None) -> np.ndarray:
    arr = np.asarray(data, dtype=complex)
    if shape is not None:
        if math.prod(shape) != arr.size:
            raise TensorShapeError(f"shape {shape} needs {math.prod(shape)} entries, got {arr.size}")
        arr = arr.reshape(shape)
    return arr


def contract(a: np.ndarray, b: np.ndarray, pairs) -> np.ndarray:
    """Contract two dense tensors over the given ``(axis_of_a, axis_of_b)`` pairs.

    Remaining axes are ordered as (free axes of ``a``, then free axes of ``b``).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    ax_a = [p[0] for p in pairs]
    ax_b = [p[1] for p in pairs]
    if len(set(ax_a)) != len(ax_a) or len(set(ax_b)) != len(ax_b):
        raise TensorShapeError("repeated contraction axis")
    for i, j in pairs:
        if not (0 <= i < a.ndim and 0 <= j < b.ndim):
            raise TensorShapeError(f"axis pair ({i},{j}) out of range")
        if a.shape[i] != b.shape[j]:
            raise TensorShapeError(
                f"extent mismatch: a.shape[{i}]={a.shape[i]} vs b.shape[{j}]={b.shape[j]}")
    return np.tensordot(a, b, axes=(ax_a, ax_b))


@dataclass(frozen=True)
class PepsTensor:
    """Rank-5 tensor ``T^p_{lbrt}`` with physical dimension d and bond dimension chi."""

    d: int
    chi: int
    entries: np.ndarray

    def __post_init__(self):
        if self.d < 1 or self.chi < 1:
            raise TensorShapeError("d and chi must be >= 1")
        want = (self.d,) + (self.chi,) * 4
        arr = as_complex_array(self.entries, want)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_entries(cls, entries) -> "PepsTensor":
        arr = np.asarray(entries, dtype=complex)
        if arr.ndim != 5 or len(set(arr.shape[1:])) != 1:
            raise TensorShapeError(f"expected shape (d, chi, chi, chi, chi), got {arr.shape}")
        return cls(d=arr.shape[0], chi=arr.shape[1], entries=arr)


@dataclass(frozen=True)
class FoldedTensor:
    """Physical contraction of T* with T; four doubled virtual legs of dimension chi**2."""

    chi: int
    entries: np.ndarray

    def __post_init__(self):
        c2 = self.chi ** 2
        arr = as_complex_array(self.entries, (c2, c2, c2, c2))
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    def braket_swapped(self) -> np.ndarray:
        """Conjugate of the entries with bra and ket exchanged on every doubled leg."""
        c = self.chi
        e = self.entries.reshape((c, c) * 4)
        e = e.transpose(1, 0, 3, 2, 5, 4, 7, 6)
        return np.conj(e).reshape((c * c,) * 4)


def fold(T: PepsTensor) -> FoldedTensor:
    """Return sum_p (T^p)* (x) T^p with (bra, ket)-ordered doubled legs."""
    c = T.chi
    F = np.einsum("pabcd,pefgh->aebfcgdh", np.conj(T.entries), T.entries)
    return FoldedTensor(chi=c, entries=F.reshape((c * c,) * 4))


def fold_with_operator(T: PepsTensor, O: np.ndarray) -> np.ndarray:
    """Folded tensor with a single-site operator inserted: sum_ij O_ij (T^i)* (x) T^j."""
    O = as_complex_array(O, (T.d, T.d))
    c = T.chi
    F = np.einsum("ij,iabcd,jefgh->aebfcgdh", O, np.conj(T.entries), T.entries)
    return F.reshape((c * c,) * 4)


def cap(chi: int) -> np.ndarray:
    """Normalized identity cap on a doubled leg, chi**-1/2 * sum_i |ii>."""
    v = np.zeros(chi * chi, dtype=complex)
    v[:: chi + 1] = 1.0 / math.sqrt(chi)
    return v


@dataclass(frozen=True)
class ObservableVec:
    """Vectorized operator <O| on a list of sites, row-major over (bra, ket)."""

    support: tuple
    entries: np.ndarray
    dim: int = field(default=0)  # Hilbert dimension of the support block

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex).reshape(-1)
        dim = self.dim if self.dim else math.isqrt(arr.size)
        if dim * dim != arr.size:
            raise TensorShapeError("vectorized operator length is not a perfect square")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "support", tuple(self.support))

    def matrix(self) -> np.ndarray:
        return self.entries.reshape(self.dim, self.dim)


def vectorize(O, support) -> ObservableVec:
    """Vectorize a dense operator matrix on the given sites."""
    O = np.asarray(O, dtype=complex)
    if O.ndim != 2 or O.shape[0] != O.shape[1]:
        raise TensorShapeError(f"operator must be square, got shape {O.shape}")
    return ObservableVec(support=tuple(support), entries=O.reshape(-1), dim=O.shape[0])


# ---------------------------------------------------------------------------
# Tensor file format: {"d": int, "chi": int, "data": [[re, im], ...]} with the
# data row-major in leg order (p, l, b, r, t).  Readers reject length mismatches.

def tensor_to_json(T: PepsTensor) -> dict:
    flat = T.entries.reshape(-1)
    return {"d": T.d, "chi": T.chi, "data": [[float(z.real), float(z.imag)] for z in flat]}


def tensor_from_json(obj: dict) -> PepsTensor:
    d, chi = int(obj["d"]), int(obj["chi"])
    data = obj["data"]
    if len(data) != d * chi ** 4:
        raise TensorShapeError(f"data length {len(data)} != d*chi^4 = {d * chi ** 4}")
    flat = np.array([complex(re, im) for re, im in data])
    return PepsTensor(d=d, chi=chi, entries=flat.reshape(d, chi, chi, chi, chi))


def save_tensor(T: PepsTensor, path) -> None:
    with open(path, "w") as fh:
        json.dump(tensor_to_json(T), fh)


def load_tensor(path) -> PepsTensor:
    with open(path) as fh:
        return tensor_from_json(json.load(fh))
