"""Classification of manifold points against the flatness theorem, and pointwise proof reports."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..bochner import BochnerPackage, bochner_package
from ..cframe import AdaptedFrame, FrameError, frame_for
from ..exprjet import DomainError
from ..manifold import (DEFAULT_TOL, ChartManifold, CurvaturePackage, StructureError,
                        curvature_package, validate)
from ..tensor import max_norm
from .cases import FAMILIES, case_deduction
from .identities import PROOF_STEPS, STEPS, PointData, eq24_lhs, proof_step_residual

CONSISTENT = "consistent"
VIOLATION = "violation-candidate"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class Classification:
    n: int
    tol: float
    bochner0: bool
    kahler: bool
    flat: bool
    norms: dict
    verdict: str

    def as_dict(self) -> dict:
        return {"n": self.n, "tol": self.tol, "bochner0": self.bochner0, "kahler": self.kahler,
                "flat": self.flat, "norms": dict(self.norms), "verdict": self.verdict}


def classify_package(pkg: CurvaturePackage, bpkg: BochnerPackage | None = None,
                     tol: float = DEFAULT_TOL) -> Classification:
    if tol <= 0:
        raise ValueError("tol must be positive")
    bpkg = bpkg or bochner_package(pkg)
    nR, nB, nN, ng = (max_norm(pkg.riemann), bpkg.norm, max_norm(pkg.nabla_J), max_norm(pkg.g))
    bochner0 = nB <= tol * (1.0 + nR)
    kahler = nN <= tol
    flat = nR <= tol * (1.0 + ng ** 2)
    if pkg.n <= 2:
        warnings.warn("theorem requires n > 2; verdict is not-applicable", UserWarning, stacklevel=3)
        verdict = NOT_APPLICABLE
    else:
        verdict = VIOLATION if (bochner0 and not kahler and not flat) else CONSISTENT
    norms = {"riemann": nR, "bochner": nB, "nabla_J": nN, "metric": ng}
    return Classification(pkg.n, tol, bool(bochner0), bool(kahler), bool(flat), norms, verdict)


def classify(M: ChartManifold, p: Sequence[float], tol: float = DEFAULT_TOL) -> Classification:
    """Booleans ``bochner0``, ``kahler``, ``flat`` at ``p`` and the resulting verdict.

    The verdict is ``violation-candidate`` exactly when B vanishes, J is not
    parallel and R does not vanish; n <= 2 is ``not-applicable``.
    """
    diag = validate(M, p, tol)
    if not diag.passed:
        raise StructureError(f"(g, J) is not almost Hermitian at {list(p)}: {diag.as_dict()}")
    return classify_package(curvature_package(M, p), tol=tol)


# -- neighbourhood sampling ---------------------------------------------------

@dataclass(frozen=True)
class ScanReport:
    center: list
    radius: float
    grid_per_axis: int
    evaluated: int
    clipped: int
    max_riemann: float
    argmax: list | None
    clipped_points: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"center": self.center, "radius": self.radius, "grid_per_axis": self.grid_per_axis,
                "evaluated": self.evaluated, "clipped": self.clipped,
                "max_riemann": self.max_riemann, "argmax": self.argmax,
                "clipped_points": self.clipped_points}


def neighborhood_scan(M: ChartManifold, p: Sequence[float], radius: float = 0.5,
                      grid_per_axis: int = 3, tol: float = DEFAULT_TOL,
                      keep_clipped: int = 10) -> ScanReport:
    """Max-norm of R over the cube grid of half-width ``radius`` centred at ``p``.

    Grid points where an expression leaves its domain or (g, J) stops being
    almost Hermitian are skipped and counted.
    """
    if radius < 0 or grid_per_axis < 1:
        raise ValueError("radius must be >= 0 and grid_per_axis >= 1")
    p = np.asarray(p, dtype=float)
    axis = np.linspace(-radius, radius, grid_per_axis) if grid_per_axis > 1 else np.zeros(1)
    best, arg, done, clipped = 0.0, None, 0, []
    for offset in itertools.product(axis, repeat=M.dim):
        q = p + np.array(offset)
        try:
            if not validate(M, q, tol).passed:
                raise StructureError("not almost Hermitian")
            r = max_norm(curvature_package(M, q).riemann)
        except (DomainError, StructureError, np.linalg.LinAlgError):
            clipped.append(q.tolist())
            continue
        done += 1
        if arg is None or r > best:
            best, arg = r, q.tolist()
    return ScanReport(p.tolist(), float(radius), grid_per_axis, done, len(clipped), float(best), arg,
                      clipped[:keep_clipped])


# -- pointwise proof data on a manifold ---------------------------------------

def manifold_point_data(pkg: CurvaturePackage, bpkg: BochnerPackage, frame: AdaptedFrame) -> PointData:
    return PointData(g=pkg.g, J=pkg.J, Q=bpkg.Q, N=pkg.nabla_J, DQ=pkg.nabla_Q, mu=frame.mu,
                     Z=frame.Z, Zbar=frame.Zbar)


def eq24_residual(pkg: CurvaturePackage, rng: np.random.Generator, samples: int = 10) -> float:
    """Largest ``|eq24_lhs|`` over random complex argument tuples of unit size."""
    d = pkg.dim
    worst = 0.0
    for _ in range(samples):
        args = [rng.normal(size=d) + 1j * rng.normal(size=d) for _ in range(5)]
        args = [v / np.linalg.norm(v) for v in args]
        worst = max(worst, abs(eq24_lhs(pkg.riemann, pkg.nabla_J, pkg.J, pkg.g, args)))
    return worst


def family_magnitudes(pd: PointData) -> list[float]:
    """Largest modulus of each of the four component families over distinct indices."""
    n = len(pd.mu)
    z, zb = (lambda k: ("Z", k)), (lambda k: ("Zb", k))
    out = [0.0] * 4
    for a, b in itertools.permutations(range(n), 2):
        out[0] = max(out[0], abs(pd.n_(z(b), z(b), z(a))))
        out[1] = max(out[1], abs(pd.n_(zb(b), z(b), z(a))))
    for a, b, c in itertools.permutations(range(n), 3):
        out[2] = max(out[2], abs(pd.n_(z(a), z(b), z(c))))
        out[3] = max(out[3], abs(pd.n_(zb(a), z(b), z(c))))
    return out


@dataclass
class ProofReport:
    residuals: dict
    asserted: bool
    tol: float
    mu: list
    families: dict
    case: dict | None
    classification: Classification
    constants: dict | None = None

    @property
    def verdict(self) -> str:
        return self.classification.verdict

    def as_dict(self) -> dict:
        return {
            "tol": self.tol,
            "asserted": self.asserted,
            "residuals": dict(self.residuals),
            "mu": list(self.mu),
            "families": dict(self.families),
            "case_deduction": self.case,
            "calibration_constants": self.constants,
            "verdict": self.verdict,
        }


def proof_report(pkg: CurvaturePackage, bpkg: BochnerPackage | None = None,
                 tol: float = DEFAULT_TOL, frame: AdaptedFrame | None = None) -> ProofReport:
    """Step residuals (max over index tuples), family magnitudes and the case replay.

    Residuals are only asserted (``asserted=True``) when the relative Bochner
    norm is below ``tol``; otherwise they are informational.
    """
    bpkg = bpkg or bochner_package(pkg)
    cls = classify_package(pkg, bpkg, tol)
    frame = frame or frame_for(pkg, bpkg.Q)
    pd = manifold_point_data(pkg, bpkg, frame)
    n = pkg.n
    residuals: dict[str, float | None] = {}
    if n >= 3:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            for step in PROOF_STEPS:
                arity = STEPS[step].arity if step in STEPS else 3
                if arity > n:
                    residuals[step] = None
                    continue
                residuals[step] = max(proof_step_residual(step, pd, idx)
                                      for idx in itertools.permutations(range(n), arity))
    fam = family_magnitudes(pd) if n >= 2 else [0.0] * 4
    scale = 1.0 + max_norm(pkg.nabla_J)
    flags = [m > tol * scale for m in fam]
    case = case_deduction(flags, n).as_dict() if n >= 3 else None
    if case is not None:
        # the replay is an implication from B = 0; it says nothing where B does not vanish
        case["applies"] = cls.bochner0
    families = {name: m for name, m in zip(FAMILIES, fam)}
    return ProofReport(residuals, cls.bochner0, tol, [float(m) for m in frame.mu], families, case, cls)


__all__ = [
    "CONSISTENT", "VIOLATION", "NOT_APPLICABLE", "Classification", "classify", "classify_package",
    "ScanReport", "neighborhood_scan", "manifold_point_data", "eq24_residual", "family_magnitudes",
    "ProofReport", "proof_report", "FrameError",
]
