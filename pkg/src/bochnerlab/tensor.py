"""Dense pointwise tensors: contraction, complex-multilinear evaluation, symmetry checks.

Slots are 0-based, like numpy axes.  A bare ``ndarray`` passed where a
:class:`PointTensor` is expected is taken to be fully covariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

CO = "co"
CONTRA = "contra"


@dataclass(frozen=True)
class PointTensor:
    """A tensor at one point, stored as a dense row-major array.

    ``variance[k]`` is ``"co"`` or ``"contra"`` for slot ``k``.
    """

    entries: np.ndarray
    variance: tuple[str, ...]

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if not np.iscomplexobj(entries):
            entries = entries.astype(float)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "variance", tuple(self.variance))
        if len(self.variance) != entries.ndim:
            raise ValueError("one variance flag per slot is required")
        if any(v not in (CO, CONTRA) for v in self.variance):
            raise ValueError(f"variance flags must be {CO!r} or {CONTRA!r}")
        if entries.ndim and len(set(entries.shape)) != 1:
            raise ValueError(f"all slots must share one dimension, got {entries.shape}")

    @property
    def degree(self) -> int:
        return self.entries.ndim

    @property
    def dim(self) -> int:
        return self.entries.shape[0] if self.degree else 0

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def as_tensor(T, variance: Sequence[str] | None = None) -> PointTensor:
    if isinstance(T, PointTensor):
        return T
    arr = np.asarray(T)
    return PointTensor(arr, tuple(variance) if variance is not None else (CO,) * arr.ndim)


def max_norm(T) -> float:
    arr = np.asarray(T)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def contract(T, slot_a: int, slot_b: int, metric_inverse=None, metric=None) -> PointTensor:
    """Trace over two slots, raising or lowering one of them when needed.

    Two covariant slots require ``metric_inverse``; two contravariant slots
    require ``metric``.
    """
    T = as_tensor(T)
    k = T.degree
    if not (0 <= slot_a < k and 0 <= slot_b < k):
        raise IndexError(f"slots ({slot_a}, {slot_b}) out of range for degree {k}")
    if slot_a == slot_b:
        raise ValueError("contraction slots must be distinct")
    va, vb = T.variance[slot_a], T.variance[slot_b]
    arr = T.entries
    if va == vb:
        pairing = metric_inverse if va == CO else metric
        if pairing is None:
            need = "metric_inverse" if va == CO else "metric"
            raise ValueError(f"contracting two {va}variant slots requires {need}")
        pairing = np.asarray(pairing)
        arr = np.tensordot(arr, pairing, axes=([slot_a, slot_b], [0, 1]))
    else:
        arr = np.trace(arr, axis1=slot_a, axis2=slot_b)
    variance = tuple(v for i, v in enumerate(T.variance) if i not in (slot_a, slot_b))
    return PointTensor(arr, variance)


def complex_eval(T, args: Sequence) -> complex:
    """Complex-multilinear value of ``T`` on ``args`` (one vector per slot).

    Contravariant slots take covectors.  Real tensors are promoted to complex
    on the fly.
    """
    T = as_tensor(T)
    if len(args) != T.degree:
        raise ValueError(f"expected {T.degree} arguments, got {len(args)}")
    out = T.entries
    for v in args:
        v = np.asarray(v)
        if v.shape != (T.dim,):
            raise ValueError(f"argument of shape {v.shape} for a dimension-{T.dim} tensor")
        out = np.tensordot(v, out, axes=(0, 0))
    return complex(out)


def apply(T, v) -> np.ndarray:
    """Image of the vector ``v`` under a (1,1) tensor stored as ``T[i, j] = T^i_j``."""
    arr = np.asarray(as_tensor(T, (CONTRA, CO)).entries)
    return arr @ np.asarray(v)


def symmetry_defect(T, kind: str, slots: tuple[int, int] | None = None) -> float:
    """Max-norm of the combination that vanishes when ``T`` has the symmetry.

    ``kind`` is one of ``"sym"`` or ``"antisym"`` (with ``slots``),
    ``"pair_exchange"`` or ``"first_bianchi"`` (degree 4 only).
    """
    arr = np.asarray(as_tensor(T).entries)
    if kind in ("sym", "antisym"):
        if slots is None:
            raise ValueError(f"{kind} needs a pair of slots")
        a, b = slots
        if not (0 <= a < arr.ndim and 0 <= b < arr.ndim) or a == b:
            raise ValueError(f"slots {slots} incompatible with degree {arr.ndim}")
        swapped = np.swapaxes(arr, a, b)
        return max_norm(arr - swapped if kind == "sym" else arr + swapped)
    if kind in ("pair_exchange", "first_bianchi"):
        if arr.ndim != 4:
            raise ValueError(f"{kind} needs a degree-4 tensor, got degree {arr.ndim}")
        if kind == "pair_exchange":
            return max_norm(arr - arr.transpose(2, 3, 0, 1))
        # T(x,y,z,u) + T(y,z,x,u) + T(z,x,y,u)
        return max_norm(arr + arr.transpose(2, 0, 1, 3) + arr.transpose(1, 2, 0, 3))
    raise ValueError(f"unknown symmetry kind {kind!r}")


def curvature_defects(T) -> dict[str, float]:
    """All four algebraic curvature symmetries of a degree-4 covariant tensor."""
    return {
        "antisym_12": symmetry_defect(T, "antisym", (0, 1)),
        "antisym_34": symmetry_defect(T, "antisym", (2, 3)),
        "pair_exchange": symmetry_defect(T, "pair_exchange"),
        "first_bianchi": symmetry_defect(T, "first_bianchi"),
    }
