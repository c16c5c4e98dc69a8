"""Built-in almost Hermitian charts used as a test corpus.

``flat_cn``            Euclidean C^n with the standard complex structure.
``fubini_study_cpn``   CP^n in one inhomogeneous chart (Kahler, Bochner-flat).
``s6_nearly_kahler``   Unit S^6 as the graph of ``x7 = sqrt(1 - |x|^2)`` with the
                       octonionic structure ``J_p(v) = p x v``.
``flat_twisted_j``     Euclidean R^2n with ``J = A J0 A^T``, ``A`` a rotation by a
                       coordinate-dependent angle in the (e1, e2)-plane.
``round_sphere_diag``  Unit S^2n in hyperspherical angles, J pairing the
                       orthonormal coframe (not Kahler).

The standard structure on R^2n is ``J0 e_k = e_{k+n}``.
"""

from __future__ import annotations

import numpy as np

from .manifold import ChartManifold

NAMES = ("flat_cn", "fubini_study_cpn", "s6_nearly_kahler", "flat_twisted_j", "round_sphere_diag")

# Oriented Fano-plane lines: e_a e_b = e_c for each cyclic (a, b, c).
OCTONION_TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


def cross_product_tensor() -> np.ndarray:
    """Structure constants ``eps[a, b, c]`` with ``(u x v)_c = eps[a, b, c] u_a v_b`` on R^7."""
    eps = np.zeros((7, 7, 7))
    for a, b, c in OCTONION_TRIPLES:
        for (i, j, k), s in (((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
                             ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)):
            eps[i - 1, j - 1, k - 1] = s
    return eps


def standard_j(n: int) -> np.ndarray:
    J = np.zeros((2 * n, 2 * n))
    J[n:, :n] = np.eye(n)
    J[:n, n:] = -np.eye(n)
    return J


def _numeric_matrix(M: np.ndarray) -> list[list[str]]:
    return [[_num(v) for v in row] for row in M]


def _num(v: float) -> str:
    v = float(v)
    if v == int(v):
        return str(int(v)) if v >= 0 else f"(-{int(-v)})"
    return repr(v) if v >= 0 else f"(-{-v!r})"


def _linear_combination(terms: list[tuple[float, str]]) -> str:
    """Text for ``sum c * expr``; zero coefficients are dropped."""
    parts = []
    for c, e in terms:
        if c == 0:
            continue
        body = e if abs(c) == 1 else f"{_num(abs(c))}*{e}"
        parts.append(("+" if c > 0 else "-", body))
    if not parts:
        return "0"
    text = parts[0][1] if parts[0][0] == "+" else f"-{parts[0][1]}"
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def flat_cn(n: int = 3) -> ChartManifold:
    d = 2 * n
    g = _numeric_matrix(np.eye(d))
    return ChartManifold.from_strings(g, _numeric_matrix(standard_j(n)), name="flat_cn",
                                      params={"n": n})


def fubini_study_cpn(n: int = 3) -> ChartManifold:
    """Real form of ``h = d dbar log(1 + |z|^2)`` with ``z_k = x_k + i x_{n+k}``."""
    d = 2 * n
    x = [f"x{k + 1}" for k in range(n)]
    y = [f"x{n + k + 1}" for k in range(n)]
    r2 = " + ".join(f"{v}^2" for v in x + y)
    w = f"(1 + {r2})"
    g = [["0"] * d for _ in range(d)]
    for j in range(n):
        for k in range(n):
            lead = f"{w} - " if j == k else "-"
            A = f"({lead}{x[j]}*{x[k]} - {y[j]}*{y[k]})/{w}^2"
            B = f"({y[j]}*{x[k]} - {x[j]}*{y[k]})/{w}^2"
            g[j][k] = A
            g[n + j][n + k] = A
            g[j][n + k] = B
            g[n + k][j] = B
    return ChartManifold.from_strings(g, _numeric_matrix(standard_j(n)), name="fubini_study_cpn",
                                      params={"n": n})


def s6_nearly_kahler() -> ChartManifold:
    """Graph chart ``|x| < 1`` of the unit S^6 in R^7 with ``J_p(v) = p x v``."""
    d = 6
    x = [f"x{i + 1}" for i in range(d)]
    one_minus = "(1 - " + " - ".join(f"{v}^2" for v in x) + ")"
    s = f"sqrt{one_minus}"
    p = x + [s]
    g = [[f"{int(i == j)} + {x[i]}*{x[j]}/{one_minus}" for j in range(d)] for i in range(d)]
    eps = cross_product_tensor()
    J = [["0"] * d for _ in range(d)]
    for k in range(d):
        along7 = _linear_combination([(eps[a, 6, k], p[a]) for a in range(7)])
        for i in range(d):
            # J d_i = p x (e_i - (x_i / s) e_7), projected to the first six slots
            direct = _linear_combination([(eps[a, i, k], p[a]) for a in range(7)])
            J[k][i] = direct if along7 == "0" else f"{direct} - ({x[i]}/{s})*({along7})"
    return ChartManifold.from_strings(g, J, embedding=p, name="s6_nearly_kahler", params={})


def flat_twisted_j(n: int = 3, angle: str = "x3") -> ChartManifold:
    if n < 2:
        raise ValueError("flat_twisted_j needs n >= 2 so the rotation does not commute with J0")
    d = 2 * n
    c, s = f"cos({angle})", f"sin({angle})"
    A = [[str(int(i == j)) for j in range(d)] for i in range(d)]
    A[0][0], A[0][1], A[1][0], A[1][1] = c, f"(-{s})", s, c
    J0 = standard_j(n)
    J = [["0"] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            terms = []
            for k in range(d):
                for l in range(d):
                    if J0[k, l] == 0 or A[i][k] == "0" or A[j][l] == "0":
                        continue
                    factors = [f for f in (A[i][k], A[j][l]) if f != "1"]
                    terms.append((J0[k, l], "*".join(factors) if factors else "1"))
            J[i][j] = _linear_combination(terms)
    g = _numeric_matrix(np.eye(d))
    return ChartManifold.from_strings(g, J, name="flat_twisted_j", params={"n": n, "angle": angle})


def round_sphere_diag(n: int = 3) -> ChartManifold:
    """Unit S^2n with ``g = diag(1, sin^2 x1, sin^2 x1 sin^2 x2, ...)``."""
    d = 2 * n
    g = [["0"] * d for _ in range(d)]
    for i in range(d):
        g[i][i] = "*".join(f"sin(x{k + 1})^2" for k in range(i)) or "1"
    J = [["0"] * d for _ in range(d)]
    for i in range(0, d, 2):
        # |d_{i+1}| / |d_i| = sin(x_{i+1}); J rotates the orthonormal pair by 90 degrees
        J[i + 1][i] = f"1/sin(x{i + 1})"
        J[i][i + 1] = f"-sin(x{i + 1})"
    return ChartManifold.from_strings(g, J, name="round_sphere_diag", params={"n": n})


def zoo(name: str, **params) -> ChartManifold:
    """Build a named chart; ``params`` are forwarded (``n``, ``angle``)."""
    builders = {
        "flat_cn": flat_cn,
        "fubini_study_cpn": fubini_study_cpn,
        "s6_nearly_kahler": s6_nearly_kahler,
        "flat_twisted_j": flat_twisted_j,
        "round_sphere_diag": round_sphere_diag,
    }
    if name not in builders:
        raise KeyError(f"unknown zoo manifold {name!r}; choose from {', '.join(NAMES)}")
    params = {k: v for k, v in params.items() if v is not None}
    if name == "s6_nearly_kahler":
        if params.get("n", 3) != 3:
            raise ValueError("s6_nearly_kahler is six-dimensional (n = 3)")
        params.pop("n", None)
    try:
        return builders[name](**params)
    except TypeError as exc:
        raise ValueError(f"unsupported parameters for {name}: {params}") from exc


def default_point(name: str, n: int = 3) -> np.ndarray:
    """A generic interior point of each chart (used by the CLI when none is given)."""
    d = 2 * n
    if name == "round_sphere_diag":
        return np.full(d, 1.1)
    if name == "s6_nearly_kahler":
        return np.array([0.1, -0.2, 0.15, 0.05, 0.3, -0.1])
    return np.zeros(d) + 0.1 * np.arange(1, d + 1) / d


def random_point(name: str, n: int, rng: np.random.Generator) -> np.ndarray:
    d = 2 * n
    if name == "round_sphere_diag":
        return rng.uniform(0.4, np.pi - 0.4, size=d)
    if name == "s6_nearly_kahler":
        v = rng.normal(size=6)
        return v / np.linalg.norm(v) * rng.uniform(0.05, 0.7)
    return rng.uniform(-0.8, 0.8, size=d)
