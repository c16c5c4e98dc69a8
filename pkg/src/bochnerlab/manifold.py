"""Chart-level Riemannian geometry of an almost Hermitian manifold.

Index conventions (all 0-based, coordinate basis):

* ``christoffel[k, i, j] = Gamma^k_ij``
* ``riemann[i, j, k, l] = R(d_i, d_j, d_k, d_l) = g(R(d_i, d_j) d_k, d_l)`` with
  ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``.  In components
  ``R_ijkl = g_lm (d_i Gamma^m_jk - d_j Gamma^m_ik + Gamma^m_ip Gamma^p_jk - Gamma^m_jp Gamma^p_ik)``.
  With this sign ``R(x, y, y, x)`` is the (positive) sectional curvature of a
  round sphere and ``ricci[x, y] = sum_i R(x, e_i, e_i, y)``.
* ``J[i, j] = J^i_j`` so ``J @ v`` is the image of ``v``.
* ``nabla_J[a, j, k] = g((nabla_a J) d_j, d_k)``.
* Covariant derivatives put the differentiation slot first:
  ``nabla_riemann[a, i, j, k, l] = (nabla_a R)_ijkl``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exprjet import Expression, eval_jets, max_variable, parse_expr
from .jet import Jet, inverse, jet_einsum

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8


class StructureError(ValueError):
    """The chart data does not define an almost Hermitian structure at a point."""


@dataclass(frozen=True)
class ChartManifold:
    """A single chart carrying metric components ``g_ij`` and ``J^i_j`` as expressions."""

    dim: int
    metric: tuple[tuple[Expression, ...], ...]
    J: tuple[tuple[Expression, ...], ...]
    embedding: tuple[Expression, ...] | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise StructureError(f"dimension must be even and >= 2, got {self.dim}")
        for label, mat in (("metric", self.metric), ("J", self.J)):
            if len(mat) != self.dim or any(len(row) != self.dim for row in mat):
                raise StructureError(f"{label} must be a {self.dim}x{self.dim} matrix")
            for row in mat:
                for e in row:
                    if max_variable(e) > self.dim:
                        raise StructureError(f"{label} entry {e} uses a variable beyond x{self.dim}")
        # upper triangle is authoritative
        sym = tuple(tuple(self.metric[min(i, j)][max(i, j)] for j in range(self.dim))
                    for i in range(self.dim))
        object.__setattr__(self, "metric", sym)

    @property
    def n(self) -> int:
        return self.dim // 2

    @classmethod
    def from_strings(cls, metric: Sequence[Sequence[str]], J: Sequence[Sequence[str]],
                     embedding: Sequence[str] | None = None, name: str = "custom",
                     params: dict | None = None) -> "ChartManifold":
        dim = len(metric)
        parse = lambda s: parse_expr(str(s), dim)  # noqa: E731
        return cls(
            dim=dim,
            metric=tuple(tuple(parse(s) for s in row) for row in metric),
            J=tuple(tuple(parse(s) for s in row) for row in J),
            embedding=None if embedding is None else tuple(parse(s) for s in embedding),
            name=name,
            params=dict(params or {}),
        )

    def jets(self, p: Sequence[float], metric_order: int = 3, j_order: int = 1) -> tuple[Jet, Jet]:
        """Tensor-valued jets of ``g`` and ``J`` at ``p``."""
        p = _point(self, p)
        d = self.dim
        g = eval_jets([e for row in self.metric for e in row], p, metric_order)
        J = eval_jets([e for row in self.J for e in row], p, j_order)
        return Jet.stack(g, (d, d)), Jet.stack(J, (d, d))

    def evaluate(self, p: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        g, J = self.jets(p, 0, 0)
        return g.value, J.value


def _point(M: ChartManifold, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (M.dim,):
        raise ValueError(f"point must have {M.dim} coordinates, got shape {p.shape}")
    return p


@dataclass(frozen=True)
class StructureDiagnostics:
    symmetry: float
    min_eigenvalue: float
    j_squared: float
    hermitian: float
    tol: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "metric_symmetry_defect": self.symmetry,
            "metric_min_eigenvalue": self.min_eigenvalue,
            "j_squared_plus_identity_defect": self.j_squared,
            "hermitian_defect": self.hermitian,
            "tol": self.tol,
            "passed": self.passed,
        }


def check_structure(g: np.ndarray, J: np.ndarray, tol: float = DEFAULT_TOL) -> StructureDiagnostics:
    """Pointwise almost Hermitian checks on raw matrices.

    Defects are reported raw; the pass test scales ``tol`` by ``1 + |input|_max``.
    """
    d = g.shape[0]
    sym = float(np.max(np.abs(g - g.T)))
    eig = float(np.min(np.linalg.eigvalsh((g + g.T) / 2)))
    jsq = float(np.max(np.abs(J @ J + np.eye(d))))
    herm = float(np.max(np.abs(J.T @ g @ J - g)))
    gs = 1.0 + float(np.max(np.abs(g)))
    js = 1.0 + float(np.max(np.abs(J)))
    passed = (sym <= tol * gs and eig > tol * gs and jsq <= tol * js ** 2
              and herm <= tol * gs * js ** 2)
    return StructureDiagnostics(sym, eig, jsq, herm, tol, bool(passed))


def validate(M: ChartManifold, p: Sequence[float], tol: float = DEFAULT_TOL) -> StructureDiagnostics:
    """Check that ``(g, J)`` is almost Hermitian at ``p``."""
    g, J = M.evaluate(p)
    return check_structure(g, J, tol)


def christoffel(M: ChartManifold, p: Sequence[float]) -> np.ndarray:
    """Levi-Civita symbols ``Gamma^k_ij`` at ``p``."""
    gj, _ = M.jets(p, metric_order=1, j_order=0)
    g_inv = np.linalg.inv(_nonsingular(gj.value))
    dg = gj.derivs[0]  # dg[i, j, a] = d_a g_ij
    first = 0.5 * (np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg))
    return np.einsum("kl,lij->kij", g_inv, first)


def _nonsingular(g: np.ndarray) -> np.ndarray:
    if abs(np.linalg.det(g)) < 1e-300 or np.linalg.cond(g) > 1e14:
        raise StructureError("metric is singular at this point")
    return g


@dataclass(frozen=True)
class CurvaturePackage:
    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    J: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    nabla_J: np.ndarray
    nabla_riemann: np.ndarray
    nabla_ricci: np.ndarray
    nabla_scalar: np.ndarray
    nabla_Q: np.ndarray

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @property
    def n(self) -> int:
        return self.dim // 2

    def bianchi_residual(self) -> float:
        """Max-norm of the cyclic sum of the second Bianchi identity."""
        dR = self.nabla_riemann
        cyc = dR + dR.transpose(2, 0, 1, 3, 4) + dR.transpose(1, 2, 0, 3, 4)
        return float(np.max(np.abs(cyc)))


def q_coefficients(n: int) -> tuple[float, float]:
    """``(a, b)`` with ``Q = a*ricci - b*scalar*g``."""
    return 1.0 / (2 * (n + 2)), 1.0 / (8 * (n + 1) * (n + 2))


def curvature_package(M: ChartManifold, p: Sequence[float]) -> CurvaturePackage:
    """Metric, curvature and first covariant derivatives at ``p`` from exact jets."""
    p = _point(M, p)
    gj, Jj = M.jets(p, metric_order=3, j_order=1)
    _nonsingular(gj.value)
    ginv = inverse(gj)

    dg = gj.grad()  # [i, j, a] = d_a g_ij, order 2
    first = (dg.linear("jli->lij") + dg.linear("ilj->lij") - dg.linear("ijl->lij")).scale(0.5)
    gamma = jet_einsum("kl,lij->kij", ginv.truncate(2), first)  # order 2

    dgamma = gamma.grad()  # [m, j, k, i] = d_i Gamma^m_jk, order 1
    gamma1 = gamma.truncate(1)
    rup = (dgamma.linear("mjki->mkij") - dgamma.linear("mikj->mkij")
           + jet_einsum("mip,pjk->mkij", gamma1, gamma1)
           - jet_einsum("mjp,pik->mkij", gamma1, gamma1))
    riem = jet_einsum("lm,mkij->ijkl", gj.truncate(1), rup)
    ric = jet_einsum("ab,xaby->xy", ginv.truncate(1), riem)
    tau = jet_einsum("xy,xy->", ginv.truncate(1), ric)

    G = gamma.value
    R = riem.value
    dR = np.moveaxis(riem.derivs[0], -1, 0)  # [a, i, j, k, l]
    nabla_R = (dR
               - np.einsum("mai,mjkl->aijkl", G, R)
               - np.einsum("maj,imkl->aijkl", G, R)
               - np.einsum("mak,ijml->aijkl", G, R)
               - np.einsum("mal,ijkm->aijkl", G, R))
    rho = ric.value
    drho = np.moveaxis(ric.derivs[0], -1, 0)
    nabla_rho = drho - np.einsum("max,my->axy", G, rho) - np.einsum("may,xm->axy", G, rho)
    nabla_tau = tau.derivs[0].copy()

    g = gj.value
    J = Jj.value
    dJ = np.moveaxis(Jj.derivs[0], -1, 0)  # [a, k, j] = d_a J^k_j
    nablaJ_up = dJ + np.einsum("kam,mj->akj", G, J) - np.einsum("maj,km->akj", G, J)
    N = np.einsum("zk,akj->ajz", g, nablaJ_up)

    a, b = q_coefficients(M.n)
    nabla_Q = a * nabla_rho - b * np.einsum("a,xy->axy", nabla_tau, g)

    return CurvaturePackage(
        point=p, g=g, g_inv=ginv.value, J=J, christoffel=G, riemann=R, ricci=rho,
        scalar=float(tau.value), nabla_J=N, nabla_riemann=nabla_R, nabla_ricci=nabla_rho,
        nabla_scalar=nabla_tau, nabla_Q=nabla_Q,
    )


def sectional_curvature(pkg: CurvaturePackage, x: np.ndarray, y: np.ndarray) -> float:
    """``K(x, y) = R(x, y, y, x) / (|x|^2 |y|^2 - g(x, y)^2)``."""
    g = pkg.g
    num = np.einsum("ijkl,i,j,k,l->", pkg.riemann, x, y, y, x)
    den = (x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2
    return float(num / den)
