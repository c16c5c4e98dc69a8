"""Exact replay of the eigenvalue case analysis behind the flatness argument.

Each nonzero family of ``nabla J`` components forces a polynomial system on
the eigenvalues ``mu``.  A conclusion ``mu_k = 0`` is accepted only when
``mu_k`` lies in the radical of the system's ideal over QQ (checked with a
Groebner basis and the Rabinowitsch trick), so every conclusion is an exact
algebraic consequence and holds over C as well.

Symbols: ``a, b, c, d`` stand for ``mu_alpha, mu_beta, mu_gamma, mu_delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import sympy as sp

a, b, c, d = MU = sp.symbols("a b c d")
_NAMES = {a: "mu_alpha", b: "mu_beta", c: "mu_gamma", d: "mu_delta"}

FAMILIES = (
    "g((nabla_{Z_b} J) Z_b, Z_a)",
    "g((nabla_{Z_bbar} J) Z_b, Z_a)",
    "g((nabla_{Z_a} J) Z_b, Z_c)",
    "g((nabla_{Z_abar} J) Z_b, Z_c)",
)

FLAT = "all mu = 0 => flat at p"
KAHLER = "no nonzero family => Kählerian at p"


def det_condition(x, y, z):
    """``(5x + z)(5y + z) - (x + y)^2``: the 2x2 determinant of a pair of steps."""
    return sp.expand((5 * x + z) * (5 * y + z) - (x + y) ** 2)


def in_radical(equations: Sequence, target) -> bool:
    """True iff ``target`` vanishes on every complex solution of ``equations``."""
    t = sp.Symbol("_t")
    gens = (t, *MU)
    basis = sp.groebner([*equations, 1 - t * target], *gens, order="lex", domain=sp.QQ)
    return list(basis.exprs) == [1]


@dataclass
class SystemRecord:
    family: int
    case: str
    source: str
    equations: list
    targets: list
    mirrored: bool = False
    proven: dict = field(default_factory=dict)

    def solve(self) -> "SystemRecord":
        self.proven = {_NAMES[s]: in_radical(self.equations, s) for s in self.targets}
        return self

    @property
    def ok(self) -> bool:
        return all(self.proven.values())

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "case": self.case,
            "source": self.source,
            "equations": [f"{sp.sstr(e)} = 0" for e in self.equations],
            "conclusion": {k: ("0" if v else "undetermined") for k, v in self.proven.items()},
            "mirrored": self.mirrored,
        }


def _family2(n: int, family: int, mirrored: bool) -> list[SystemRecord]:
    # steps 3.1-3.3 as a linear system in the two components (beta, alpha), (gamma, alpha)
    recs = [
        SystemRecord(family, "I", "3.1 with the (gamma, alpha) component zero in 3.2, 3.3",
                     [5 * a + b, a + c, a + b + 2 * c], [a, b, c], mirrored),
        SystemRecord(family, "II", "3.1 for beta and gamma, 3.2/3.3 determinant",
                     [5 * a + b, 5 * a + c,
                      sp.expand(-(a + c) * (b + c) - (a + b) * (a + b + 2 * c))],
                     [a, b, c], mirrored),
    ]
    if n > 3:
        # the same two systems with delta in the role of gamma
        recs += [
            SystemRecord(family, "I (delta)", "3.1-3.3 with gamma := delta",
                         [5 * a + b, a + d, a + b + 2 * d], [d], mirrored),
            SystemRecord(family, "II (delta)", "3.1-3.3 with gamma := delta",
                         [5 * a + b, 5 * a + d,
                          sp.expand(-(a + d) * (b + d) - (a + b) * (a + b + 2 * d))],
                         [d], mirrored),
        ]
    return recs


def _family3(n: int) -> list[SystemRecord]:
    recs = [
        SystemRecord(3, "I", "3.4/3.5 determinants for all three orderings",
                     [det_condition(a, b, c), det_condition(a, c, b), det_condition(b, c, a)],
                     [a, b, c]),
        SystemRecord(3, "II", "3.4, 3.5 with one component zero, then 3.6",
                     [5 * b + c, a + b, det_condition(a, c, b)], [a, b, c]),
    ]
    if n > 3:
        recs.append(SystemRecord(3, "extension", "ext3 with mu_beta = mu_gamma = 0",
                                 [b, c, b + c + 2 * d], [d]))
    return recs


def _family4(n: int) -> list[SystemRecord]:
    recs = [
        SystemRecord(4, "I", "family-4 substitution and its beta <-> gamma swap",
                     [5 * b + c, b + 5 * c], [b, c]),
        # symmetric/antisymmetric split of the final relation gives mu_alpha * A = 0
        SystemRecord(4, "final", "final relation split into symmetric and antisymmetric parts",
                     [b, c, a], [a]),
    ]
    if n > 3:
        recs.append(SystemRecord(4, "extension", "ext4 with mu_beta = mu_gamma = 0",
                                 [b, c, b + c + 2 * d], [d]))
    return recs


@dataclass
class CaseResult:
    n: int
    flags: tuple[bool, bool, bool, bool]
    conclusion: str
    zero: tuple[str, ...]
    trace: list[SystemRecord]

    @property
    def mirrored(self) -> bool:
        return any(r.mirrored for r in self.trace)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "flags": list(self.flags),
            "conclusion": self.conclusion,
            "zero": list(self.zero),
            "mirrored": self.mirrored,
            "trace": [r.as_dict() for r in self.trace],
        }


def case_deduction(flags: Sequence[bool], n: int) -> CaseResult:
    """Replay the case systems for every flagged family of nonzero ``nabla J`` components.

    ``flags[i]`` says whether family ``i + 1`` (see :data:`FAMILIES`) has a
    nonzero component.  Family 1 is not printed separately in the source
    argument; it reuses the family-2 systems and is marked ``mirrored``.
    """
    if n <= 2:
        raise ValueError("case deduction is not applicable for n <= 2 (requires n > 2)")
    flags = tuple(bool(f) for f in flags)
    if len(flags) != 4:
        raise ValueError("flags must have four entries, one per component family")
    if not any(flags):
        return CaseResult(n, flags, KAHLER, (), [])

    trace: list[SystemRecord] = []
    builders = (lambda: _family2(n, 1, True), lambda: _family2(n, 2, False),
                lambda: _family3(n), lambda: _family4(n))
    for on, build in zip(flags, builders):
        if on:
            trace += [r.solve() for r in build()]

    expected = ["mu_alpha", "mu_beta", "mu_gamma"] + (["mu_delta"] if n > 3 else [])
    zero = set()
    for fam in {r.family for r in trace}:
        recs = [r for r in trace if r.family == fam]
        # within a family the cases are alternatives: a value is zero if every case proves it
        by_case: dict[str, set] = {}
        for r in recs:
            key = r.case.split()[0] if r.case.split()[0] in ("I", "II") else "all"
            by_case.setdefault(key, set()).update(k for k, v in r.proven.items() if v)
        common = by_case.pop("all", set())
        alts = list(by_case.values())
        fam_zero = set.intersection(*alts) if alts else set()
        zero |= fam_zero | common
    ok = all(m in zero for m in expected)
    conclusion = FLAT if ok else "undetermined"
    return CaseResult(n, flags, conclusion, tuple(m for m in expected if m in zero), trace)
