"""Bochner tensor ``B = R - phi(Q)`` and the pointwise identities it implies.

``phi(Q)`` is assembled term by term; :data:`PHI_TERMS` lists the ten terms in
order, and :func:`phi` accepts a mask to switch any of them off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .manifold import CurvaturePackage, q_coefficients
from .tensor import max_norm

# (coefficient, first factor, second factor) read as  c * F1[a, b] * F2[c, d]
# over the slots (x, y, z, u).  "g" is g(., .), "gJ" is g(., J .),
# "Q" is Q(., .), "QJ" is Q(., J .).
PHI_TERMS = (
    (+1, "g", "xu", "Q", "yz"),
    (-1, "g", "xz", "Q", "yu"),
    (+1, "g", "yz", "Q", "xu"),
    (-1, "g", "yu", "Q", "xz"),
    (+1, "gJ", "xu", "QJ", "yz"),
    (-1, "gJ", "xz", "QJ", "yu"),
    (-2, "gJ", "xy", "QJ", "zu"),
    (+1, "gJ", "yz", "QJ", "xu"),
    (-1, "gJ", "yu", "QJ", "xz"),
    (-2, "gJ", "zu", "QJ", "xy"),
)


def _check_square(*arrays):
    d = arrays[0].shape[0]
    for a in arrays:
        if any(s != d for s in a.shape):
            raise ValueError(f"dimension mismatch: shapes {[x.shape for x in arrays]}")
    return d


def q_tensor(ricci, scalar: float, g, n: int) -> np.ndarray:
    """``Q = ricci / (2(n+2)) - scalar * g / (8(n+1)(n+2))``."""
    ricci, g = np.asarray(ricci, dtype=float), np.asarray(g, dtype=float)
    if n < 1:
        raise ValueError("n must be positive")
    d = _check_square(ricci, g)
    if d != 2 * n:
        raise ValueError(f"tensors of dimension {d} do not match n = {n}")
    a, b = q_coefficients(n)
    return a * ricci - b * scalar * g


def phi(Q, g, J, terms: Sequence[bool] | None = None, J_first=None, J_second=None) -> np.ndarray:
    """Degree-4 covariant ``phi(Q)``.

    ``J_first`` replaces J inside the ``g(., J .)`` factors and ``J_second``
    inside the ``Q(., J .)`` factors; both default to ``J``.  This is what
    differentiating the J-dependent terms along a direction needs.
    """
    Q, g, J = (np.asarray(a) for a in (Q, g, J))
    _check_square(Q, g, J)
    Ja = J if J_first is None else np.asarray(J_first)
    Jb = J if J_second is None else np.asarray(J_second)
    factors = {"g": g, "gJ": g @ Ja, "Q": Q, "QJ": Q @ Jb}
    if terms is None:
        terms = [True] * len(PHI_TERMS)
    if len(terms) != len(PHI_TERMS):
        raise ValueError(f"terms mask needs {len(PHI_TERMS)} entries")
    dtype = np.result_type(Q, g, Ja, Jb)
    out = np.zeros((g.shape[0],) * 4, dtype=dtype)
    for on, (c, f1, s1, f2, s2) in zip(terms, PHI_TERMS):
        if on:
            out += c * np.einsum(f"{s1},{s2}->xyzu", factors[f1], factors[f2])
    return out


J_LINES = tuple(i >= 4 for i in range(len(PHI_TERMS)))


def bochner(R, phiQ) -> np.ndarray:
    R, phiQ = np.asarray(R), np.asarray(phiQ)
    if R.shape != phiQ.shape or R.ndim != 4:
        raise ValueError(f"dimension mismatch: {R.shape} vs {phiQ.shape}")
    return R - phiQ


def ricci_of(T, g_inv) -> np.ndarray:
    """``(x, y) -> sum_i T(x, e_i, e_i, y)`` via metric contraction of the middle slots."""
    T, g_inv = np.asarray(T), np.asarray(g_inv)
    if T.ndim != 4 or T.shape[1:3] != g_inv.shape:
        raise ValueError(f"dimension mismatch: {T.shape} vs {g_inv.shape}")
    return np.einsum("ab,xaby->xy", g_inv, T)


def hybrid(T, J) -> np.ndarray:
    """``T(J x, J y)`` for a degree-2 covariant ``T``."""
    return np.einsum("ab,ax,by->xy", T, J, J)


@dataclass(frozen=True)
class BochnerPackage:
    Q: np.ndarray
    Q1: np.ndarray
    phiQ: np.ndarray
    B: np.ndarray
    residuals: dict = field(default_factory=dict)

    @property
    def norm(self) -> float:
        return max_norm(self.B)


def section2_residuals(pkg: CurvaturePackage, bpkg: BochnerPackage | None = None) -> dict[str, float]:
    """Max-norm residuals of the identities that hold when ``B = 0``."""
    n = pkg.n
    rho, R, J = pkg.ricci, pkg.riemann, pkg.J
    Q = bpkg.Q if bpkg is not None else q_tensor(rho, pkg.scalar, pkg.g, n)
    rho_J = hybrid(rho, J)
    R_J = np.einsum("xyab,az,bu->xyzu", R, J, J)
    return {
        "hybrid_ricci": max_norm(rho - rho_J),
        "trace_identity": max_norm(rho - ((2 * n + 1) * rho + 3 * rho_J) / (2 * (n + 2))),
        "ah1": max_norm(R - R_J),
        "q_hybrid": max_norm(Q - hybrid(Q, J)),
        "q_symmetric": max_norm(Q - Q.T),
    }


def bochner_package(pkg: CurvaturePackage) -> BochnerPackage:
    Q = q_tensor(pkg.ricci, pkg.scalar, pkg.g, pkg.n)
    phiQ = phi(Q, pkg.g, pkg.J)
    B = bochner(pkg.riemann, phiQ)
    bp = BochnerPackage(Q=Q, Q1=pkg.g_inv @ Q, phiQ=phiQ, B=B)
    object.__setattr__(bp, "residuals", section2_residuals(pkg, bp))
    return bp
