"""Truncated Taylor (jet) arithmetic up to third order.

A :class:`Jet` carries the value of a (possibly tensor-valued) field at a
point together with all of its partial derivatives up to ``order``.  The
derivatives are stored as dense symmetric arrays: ``derivs[k-1]`` has shape
``value.shape + (nvars,) * k`` and holds the k-th partials, derivative axes
trailing.  Products follow the Leibniz rule and unary compositions follow
Faa di Bruno, so every coefficient is exact up to floating point rounding.
"""

from __future__ import annotations

import itertools
import string
from typing import Sequence

import numpy as np

MAX_ORDER = 3


def multi_indices(nvars: int, order: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree <= ``order`` in graded-lex order.

    Degrees ascend; within one degree tuples are sorted lexicographically
    descending, so ``x1**2`` precedes ``x1*x2`` precedes ``x2**2``.
    """
    out = [(0,) * nvars]
    for k in range(1, order + 1):
        level = []
        for combo in itertools.combinations_with_replacement(range(nvars), k):
            alpha = [0] * nvars
            for i in combo:
                alpha[i] += 1
            level.append(tuple(alpha))
        level.sort(reverse=True)
        out.extend(level)
    return out


def _axes_of(alpha: Sequence[int]) -> tuple[int, ...]:
    axes: list[int] = []
    for i, a in enumerate(alpha):
        axes.extend([i] * a)
    return tuple(axes)


class Jet:
    """Value plus partial derivatives up to ``order`` of a field at a point."""

    __slots__ = ("value", "derivs", "nvars")

    def __init__(self, value, derivs: Sequence[np.ndarray] = (), nvars: int | None = None):
        self.value = np.asarray(value, dtype=float)
        self.derivs = tuple(np.asarray(d, dtype=float) for d in derivs)
        if nvars is None:
            if not self.derivs:
                raise ValueError("nvars is required for an order-0 jet")
            nvars = self.derivs[0].shape[-1]
        self.nvars = int(nvars)
        if len(self.derivs) > MAX_ORDER:
            raise ValueError(f"jets are truncated at order {MAX_ORDER}")
        for k, d in enumerate(self.derivs, start=1):
            if d.shape != self.value.shape + (self.nvars,) * k:
                raise ValueError(f"derivative of order {k} has shape {d.shape}")

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c, nvars: int, order: int) -> "Jet":
        c = np.asarray(c, dtype=float)
        derivs = [np.zeros(c.shape + (nvars,) * k) for k in range(1, order + 1)]
        return cls(c, derivs, nvars)

    @classmethod
    def variable(cls, index: int, point: Sequence[float], order: int) -> "Jet":
        """Jet of the coordinate function ``x[index]`` (0-based) at ``point``."""
        nvars = len(point)
        derivs = [np.zeros((nvars,) * k) for k in range(1, order + 1)]
        if order >= 1:
            derivs[0][index] = 1.0
        return cls(point[index], derivs, nvars)

    @classmethod
    def stack(cls, jets, shape: tuple[int, ...]) -> "Jet":
        """Assemble scalar jets (flat, row-major) into a tensor-valued jet."""
        jets = list(jets)
        order = min(j.order for j in jets)
        nvars = jets[0].nvars
        value = np.array([j.value for j in jets]).reshape(shape)
        derivs = [
            np.array([j.derivs[k] for j in jets]).reshape(shape + (nvars,) * (k + 1))
            for k in range(order)
        ]
        return cls(value, derivs, nvars)

    # -- accessors --------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.derivs)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def truncate(self, order: int) -> "Jet":
        return Jet(self.value, self.derivs[:order], self.nvars)

    def coefficient(self, alpha: Sequence[int]):
        """Partial derivative ``d^alpha`` (an exponent tuple) of the field."""
        if len(alpha) != self.nvars:
            raise ValueError("multi-index length must equal the number of variables")
        k = sum(alpha)
        if k == 0:
            return self.value
        if k > self.order:
            raise ValueError(f"order {k} exceeds jet order {self.order}")
        return self.derivs[k - 1][(Ellipsis,) + _axes_of(alpha)]

    def coefficients(self) -> list[tuple[tuple[int, ...], np.ndarray]]:
        """``(alpha, d^alpha)`` pairs in graded-lex order."""
        return [(a, self.coefficient(a)) for a in multi_indices(self.nvars, self.order)]

    def grad(self) -> "Jet":
        """Jet of the gradient field; the new derivative axis is appended last."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.derivs[0], self.derivs[1:], self.nvars)

    # -- linear operations ------------------------------------------------
    def _check(self, other: "Jet") -> int:
        if other.nvars != self.nvars:
            raise ValueError("jets over different variable counts")
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            order = self._check(other)
            return Jet(self.value + other.value,
                       [a + b for a, b in zip(self.derivs[:order], other.derivs[:order])],
                       self.nvars)
        return Jet(self.value + other, self.derivs, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, [-d for d in self.derivs], self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: float) -> "Jet":
        return Jet(c * self.value, [c * d for d in self.derivs], self.nvars)

    def __mul__(self, other):
        if isinstance(other, Jet):
            if self.shape or other.shape:
                raise ValueError("use jet_einsum for tensor-valued products")
            return _scalar_product(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self.scale(1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal().scale(other)

    def linear(self, spec: str) -> "Jet":
        """Apply a single-operand einsum such as ``'ijk->kji'`` to every order."""
        src, dst = spec.split("->")
        free = [c for c in string.ascii_letters if c not in spec][: self.order]
        derivs = [
            np.einsum(f"{src}{''.join(free[:k])}->{dst}{''.join(free[:k])}", d)
            for k, d in enumerate(self.derivs, start=1)
        ]
        return Jet(np.einsum(spec, self.value), derivs, self.nvars)

    # -- scalar nonlinear operations --------------------------------------
    def compose(self, f0, f1, f2, f3) -> "Jet":
        """Jet of ``f(self)`` given ``f`` and its first three derivatives at the value."""
        if self.shape:
            raise ValueError("compose is defined for scalar jets only")
        derivs = []
        if self.order >= 1:
            a1 = self.derivs[0]
            derivs.append(f1 * a1)
        if self.order >= 2:
            a2 = self.derivs[1]
            derivs.append(f1 * a2 + f2 * np.multiply.outer(a1, a1))
        if self.order >= 3:
            a3 = self.derivs[2]
            mixed = (np.einsum("i,jk->ijk", a1, a2) + np.einsum("j,ik->ijk", a1, a2)
                     + np.einsum("k,ij->ijk", a1, a2))
            cube = np.einsum("i,j,k->ijk", a1, a1, a1)
            derivs.append(f1 * a3 + f2 * mixed + f3 * cube)
        return Jet(f0, derivs, self.nvars)

    def reciprocal(self) -> "Jet":
        t = float(self.value)
        if t == 0.0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        r = 1.0 / t
        return self.compose(r, -r * r, 2 * r ** 3, -6 * r ** 4)

    def __pow__(self, k: int) -> "Jet":
        if not isinstance(k, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        t = float(self.value)
        if k < 0 and t == 0.0:
            raise ZeroDivisionError("negative power of a jet with zero value")
        fs = []
        coef = 1.0
        for m in range(4):
            # coef = k (k-1) ... (k-m+1); a zero coefficient kills t**(k-m)
            fs.append(0.0 if coef == 0.0 else coef * t ** (k - m))
            coef *= k - m
        return self.compose(*fs)

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, order={self.order}, value={self.value!r})"


def _scalar_product(a: Jet, b: Jet) -> Jet:
    order = a._check(b)
    a0, b0 = float(a.value), float(b.value)
    derivs = []
    if order >= 1:
        a1, b1 = a.derivs[0], b.derivs[0]
        derivs.append(a0 * b1 + b0 * a1)
    if order >= 2:
        a2, b2 = a.derivs[1], b.derivs[1]
        ab = np.multiply.outer(a1, b1)
        derivs.append(a0 * b2 + b0 * a2 + ab + ab.T)
    if order >= 3:
        a3, b3 = a.derivs[2], b.derivs[2]
        t = np.einsum("i,jk->ijk", a1, b2) + np.einsum("i,jk->ijk", b1, a2)
        derivs.append(a0 * b3 + b0 * a3 + t + t.transpose(1, 0, 2) + t.transpose(2, 1, 0))
    return Jet(a0 * b0, derivs, a.nvars)


def jet_einsum(spec: str, a: Jet, b: Jet) -> Jet:
    """Leibniz-rule product of two tensor jets contracted by an einsum ``spec``.

    ``spec`` names only the value axes, e.g. ``'kl,lij->kij'``; derivative
    axes are threaded through automatically.
    """
    order = a._check(b)
    ins, out = spec.split("->")
    sa, sb = ins.split(",")
    free = [c for c in string.ascii_letters if c not in spec][:order]

    def part(j: Jet, m: int):
        return j.value if m == 0 else j.derivs[m - 1]

    derivs = []
    for k in range(1, order + 1):
        letters = free[:k]
        total = 0.0
        for m in range(k + 1):
            for subset in itertools.combinations(range(k), m):
                rest = [i for i in range(k) if i not in subset]
                la = "".join(letters[i] for i in subset)
                lb = "".join(letters[i] for i in rest)
                total = total + np.einsum(f"{sa}{la},{sb}{lb}->{out}{''.join(letters)}",
                                          part(a, m), part(b, k - m))
        derivs.append(total)
    return Jet(np.einsum(spec, a.value, b.value), derivs, a.nvars)


def inverse(a: Jet) -> Jet:
    """Jet of the matrix inverse of a square-matrix-valued jet."""
    if a.value.ndim != 2 or a.value.shape[0] != a.value.shape[1]:
        raise ValueError("inverse needs a square-matrix jet")
    m0 = np.linalg.inv(a.value)
    ad = a.derivs
    derivs = []
    if a.order >= 1:
        m1 = -np.einsum("ij,jkA,kl->ilA", m0, ad[0], m0)
        derivs.append(m1)
    if a.order >= 2:
        inner = np.einsum("ijAB,jk->ikAB", ad[1], m0)
        t = np.einsum("ijA,jkB->ikAB", ad[0], m1)
        inner = inner + t + t.transpose(0, 1, 3, 2)
        m2 = -np.einsum("ij,jkAB->ikAB", m0, inner)
        derivs.append(m2)
    if a.order >= 3:
        inner = np.einsum("ijABC,jk->ikABC", ad[2], m0)
        t2 = np.einsum("ijAB,jkC->ikABC", ad[1], m1)
        t1 = np.einsum("ijA,jkBC->ikABC", ad[0], m2)
        # sum over the three ways to split {A,B,C} into a pair and a single
        inner = inner + t2 + t2.transpose(0, 1, 2, 4, 3) + t2.transpose(0, 1, 4, 3, 2)
        inner = inner + t1 + t1.transpose(0, 1, 3, 2, 4) + t1.transpose(0, 1, 4, 3, 2)
        derivs.append(-np.einsum("ij,jkABC->ikABC", m0, inner))
    return Jet(m0, derivs, a.nvars)
