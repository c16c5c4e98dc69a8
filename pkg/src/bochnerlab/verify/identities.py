"""The differentiated AH1 identity and the substitution steps of the flatness argument.

Every step is described by the five complex frame vectors plugged into either
the differentiated identity (``source="eq24"``) or the second Bianchi
identity (``source="bianchi"``), together with the closed form the
substitution is expected to reduce to.  Frame vectors are named by
``("Z", k)`` for ``Z_k`` and ``("Zb", k)`` for ``Z_kbar``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..bochner import J_LINES, phi


@dataclass(frozen=True)
class PointData:
    """Everything the step formulas read at one point (all arrays in coordinates)."""

    g: np.ndarray
    J: np.ndarray
    Q: np.ndarray
    N: np.ndarray          # N[a, j, k] = g((nabla_a J) e_j, e_k)
    DQ: np.ndarray         # DQ[a, x, y] = (nabla_a Q)(e_x, e_y)
    mu: np.ndarray
    Z: np.ndarray          # rows Z_k
    Zbar: np.ndarray

    @property
    def g_inv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    def vec(self, ref: tuple[str, int]) -> np.ndarray:
        kind, k = ref
        return self.Z[k] if kind == "Z" else self.Zbar[k]

    def n_(self, *refs) -> complex:
        """``g((nabla_X J) Y, W)`` on frame vectors."""
        x, y, w = (self.vec(r) for r in refs)
        return complex(np.einsum("abc,a,b,c->", self.N, x, y, w))

    def dq(self, *refs) -> complex:
        """``(nabla_X Q)(Y, W)`` on frame vectors."""
        x, y, w = (self.vec(r) for r in refs)
        return complex(np.einsum("abc,a,b,c->", self.DQ, x, y, w))


def nabla_j_image(N, g_inv, x, u) -> np.ndarray:
    """The vector ``(nabla_x J) u`` recovered from N by raising its last slot."""
    return np.einsum("a,b,abl,lk->k", x, u, N, g_inv)


def eq24_lhs(R, N, J, g, args) -> complex:
    """Six-term cyclic sum of the differentiated identity ``R(x,y,z,u) = R(x,y,Jz,Ju)``.

    ``args = (x, y, z, u, v)``; complex vectors are allowed.
    """
    if len(args) != 5:
        raise ValueError(f"eq24_lhs takes five vectors, got {len(args)}")
    R, N, J, g = (np.asarray(a) for a in (R, N, J, g))
    d = g.shape[0]
    if R.shape != (d,) * 4 or N.shape != (d,) * 3 or J.shape != (d, d):
        raise ValueError("tensor dimensions do not match the metric")
    x, y, z, u, v = (np.asarray(a) for a in args)
    if any(w.shape != (d,) for w in (x, y, z, u, v)):
        raise ValueError("argument dimension mismatch")
    g_inv = np.linalg.inv(g)
    Ju, Jv = J @ u, J @ v

    def pair(w, a, b):
        Du = nabla_j_image(N, g_inv, w, u)
        Dv = nabla_j_image(N, g_inv, w, v)
        return (np.einsum("ijkl,i,j,k,l->", R, a, b, Du, Jv)
                + np.einsum("ijkl,i,j,k,l->", R, a, b, Ju, Dv))

    return complex(pair(x, y, z) + pair(y, z, x) + pair(z, x, y))


def bianchi_cyclic(nabla_R, args) -> complex:
    """``(nabla_x R)(y,z,u,v) + (nabla_y R)(z,x,u,v) + (nabla_z R)(x,y,u,v)``."""
    x, y, z, u, v = (np.asarray(a) for a in args)

    def term(a, b, c):
        return np.einsum("aijkl,a,i,j,k,l->", nabla_R, a, b, c, u, v)

    return complex(term(x, y, z) + term(y, z, x) + term(z, x, y))


def nabla_phi(Q, DQ, N, g, J) -> np.ndarray:
    """Covariant derivative of ``phi(Q)`` given ``nabla Q`` and ``nabla J``.

    Returns ``T[a, x, y, z, u] = (nabla_a phi(Q))(x, y, z, u)``; the J-dependent
    terms pick up ``nabla_a J`` in each J slot.
    """
    g_inv = np.linalg.inv(g)
    d = g.shape[0]
    out = np.empty((d,) * 5)
    for a in range(d):
        Ma = np.einsum("jl,lk->kj", N[a], g_inv)  # (nabla_a J)^k_j
        out[a] = (phi(DQ[a], g, J)
                  + phi(Q, g, J, terms=J_LINES, J_first=Ma)
                  + phi(Q, g, J, terms=J_LINES, J_second=Ma))
    return out


# -- step table --------------------------------------------------------------

Ref = tuple[str, int]


@dataclass(frozen=True)
class Step:
    name: str
    source: str                      # "eq24" or "bianchi"
    arity: int                       # number of distinct frame indices used
    args: Callable[..., tuple[Ref, ...]]
    closed: Callable[..., complex]   # closed(pd, a, b, c, d)
    mu_zero: tuple[int, ...] = ()    # positions (into a, b, c, d) forced to mu = 0


def _z(k):
    return ("Z", k)


def _zb(k):
    return ("Zb", k)


def _det(mu, a, b, c) -> float:
    """``(5 mu_a + mu_c)(5 mu_b + mu_c) - (mu_a + mu_b)^2``."""
    return (5 * mu[a] + mu[c]) * (5 * mu[b] + mu[c]) - (mu[a] + mu[b]) ** 2


STEPS: dict[str, Step] = {s.name: s for s in (
    Step("3.1", "eq24", 2,
         lambda a, b, c=None, d=None: (_z(a), _zb(a), _zb(b), _z(a), _z(b)),
         lambda p, a, b, c=None, d=None: (5 * p.mu[a] + p.mu[b]) * p.n_(_zb(b), _z(b), _z(a))),
    Step("3.2", "eq24", 3,
         lambda a, b, c, d=None: (_z(a), _zb(b), _zb(c), _z(b), _z(c)),
         lambda p, a, b, c, d=None: ((p.mu[a] + p.mu[c]) * p.n_(_zb(b), _z(b), _z(a))
                                     + (p.mu[a] + p.mu[b]) * p.n_(_zb(c), _z(c), _z(a)))),
    Step("3.3", "eq24", 3,
         lambda a, b, c, d=None: (_zb(b), _z(c), _zb(c), _z(b), _z(a)),
         lambda p, a, b, c, d=None: ((p.mu[a] + p.mu[b] + 2 * p.mu[c]) * p.n_(_zb(b), _z(b), _z(a))
                                     - (p.mu[b] + p.mu[c]) * p.n_(_zb(c), _z(c), _z(a)))),
    Step("3.4", "eq24", 3,
         lambda a, b, c, d=None: (_z(a), _z(b), _zb(b), _z(c), _z(b)),
         lambda p, a, b, c, d=None: ((5 * p.mu[b] + p.mu[c]) * p.n_(_z(a), _z(b), _z(c))
                                     - (p.mu[a] + p.mu[b]) * p.n_(_z(b), _z(a), _z(c)))),
    Step("3.5", "eq24", 3,
         lambda a, b, c, d=None: (_z(b), _z(a), _zb(a), _z(c), _z(a)),
         lambda p, a, b, c, d=None: ((5 * p.mu[a] + p.mu[c]) * p.n_(_z(b), _z(a), _z(c))
                                     - (p.mu[a] + p.mu[b]) * p.n_(_z(a), _z(b), _z(c)))),
    Step("family4", "eq24", 3,
         lambda a, b, c, d=None: (_zb(a), _z(b), _zb(b), _z(c), _z(b)),
         lambda p, a, b, c, d=None: (5 * p.mu[b] + p.mu[c]) * p.n_(_zb(a), _z(b), _z(c))),
    Step("ext3", "eq24", 4,
         lambda a, b, c, d: (_z(a), _z(d), _zb(d), _z(b), _z(c)),
         lambda p, a, b, c, d: (p.mu[b] + p.mu[c] + 2 * p.mu[d]) * p.n_(_z(a), _z(b), _z(c))),
    Step("ext4", "eq24", 4,
         lambda a, b, c, d: (_zb(a), _z(d), _zb(d), _z(b), _z(c)),
         lambda p, a, b, c, d: (p.mu[b] + p.mu[c] + 2 * p.mu[d]) * p.n_(_zb(a), _z(b), _z(c))),
    Step("3.7", "bianchi", 3,
         lambda a, b, c, d=None: (_zb(a), _z(b), _z(c), _z(b), _zb(b)),
         lambda p, a, b, c, d=None: p.dq(_z(b), _zb(a), _z(c)) - 2 * p.dq(_z(c), _zb(a), _z(b)),
         mu_zero=(1, 2)),
    Step("final_nablaQ", "bianchi", 3,
         lambda a, b, c, d=None: (_z(a), _zb(a), _z(b), _z(c), _zb(a)),
         lambda p, a, b, c, d=None: (2 * p.dq(_zb(a), _z(b), _z(c))
                                     + 1j * p.mu[a] * p.n_(_zb(a), _z(b), _z(c))),
         mu_zero=(1, 2)),
)}

EQ24_STEPS = ("3.1", "3.2", "3.3", "3.4", "3.5", "family4")
EXTENSION_STEPS = ("ext3", "ext4")
BIANCHI_STEPS = ("3.7", "final_nablaQ")

# Steps accepted by proof_step_residual, including the derived conditions.
PROOF_STEPS = ("3.1", "3.2", "3.3", "3.4", "3.5", "3.6", "det_34_35", "3.7", "final_nablaQ",
               "family4", "ext3", "ext4")


def check_indices(step: str, indices: tuple[int, ...], n: int) -> tuple[int, ...]:
    need = STEPS[step].arity if step in STEPS else 3
    idx = tuple(int(i) for i in indices[:need])
    if len(idx) < need:
        raise ValueError(f"step {step} needs {need} frame indices")
    if len(set(idx)) != len(idx):
        raise ValueError(f"step {step} requires distinct indices, got {idx}")
    if any(not 0 <= i < n for i in idx):
        raise ValueError(f"indices {idx} out of range for n = {n}")
    return idx


def step_closed_form(step: str, pd: PointData, idx: tuple[int, ...]) -> complex:
    return complex(STEPS[step].closed(pd, *idx))


def step_vectors(step: str, pd: PointData, idx: tuple[int, ...]) -> list[np.ndarray]:
    return [pd.vec(r) for r in STEPS[step].args(*idx)]


def proof_step_residual(step: str, pd: PointData, indices, b_residual: float | None = None,
                        tol: float = 1e-8) -> float:
    """Modulus of the relation asserted at ``step`` for frame indices ``indices``.

    The relations only hold where the Bochner tensor vanishes; a large
    ``b_residual`` triggers a warning but the value is still returned.
    ``3.6`` and ``det_34_35`` are multiplied by the component whose
    non-vanishing they presuppose, and ``3.7`` and ``final_nablaQ`` by
    ``|g((nabla_{Z_abar} J) Z_b, Z_c)|``; each product vanishes unconditionally
    when B = 0.
    """
    if step not in PROOF_STEPS:
        raise ValueError(f"unknown step {step!r}; choose from {PROOF_STEPS}")
    if b_residual is not None and b_residual > tol:
        warnings.warn(f"Bochner residual {b_residual:.3e} exceeds {tol:g}; step {step} "
                      "is informational only", RuntimeWarning, stacklevel=2)
    n = len(pd.mu)
    idx = check_indices(step, tuple(indices), n)
    if step == "det_34_35":
        a, b, c = idx
        return abs(_det(pd.mu, a, b, c) * pd.n_(_z(a), _z(b), _z(c)))
    if step == "3.6":
        a, b, c = idx
        return abs(_det(pd.mu, a, c, b) * pd.n_(_z(a), _z(c), _z(b)))
    if step == "3.7":
        a, b, c = idx
        gate = abs(pd.n_(_zb(a), _z(b), _z(c)))
        return gate * max(abs(pd.dq(_z(b), _zb(a), _z(c))), abs(pd.dq(_z(c), _zb(a), _z(b))))
    if step == "final_nablaQ":
        a, b, c = idx
        return abs(pd.n_(_zb(a), _z(b), _z(c))) * abs(step_closed_form(step, pd, idx))
    return abs(step_closed_form(step, pd, idx))
