import numpy as np
import pytest

from bochnerlab.exprjet import eval_jet, eval_value
from bochnerlab.manifold import (ChartManifold, StructureError, check_structure, christoffel,
                                 curvature_package, sectional_curvature, validate)
from bochnerlab.tensor import curvature_defects, max_norm
from bochnerlab.zoo import (NAMES, OCTONION_TRIPLES, cross_product_tensor, default_point,
                            random_point, zoo)


def test_flat_cn_structure_is_exact():
    d = validate(zoo("flat_cn", n=3), np.zeros(6))
    assert d.passed
    assert d.symmetry == 0 and d.j_squared == 0 and d.hermitian == 0
    assert d.min_eigenvalue == 1.0


def test_identity_j_fails():
    d = check_structure(np.eye(6), np.eye(6))
    assert d.j_squared == 2.0
    assert not d.passed


def test_fubini_study_structure():
    d = validate(zoo("fubini_study_cpn", n=3), np.full(6, 0.1))
    assert d.passed
    assert max(d.symmetry, d.j_squared, d.hermitian) <= 1e-12


def test_chart_validation():
    with pytest.raises(StructureError):
        ChartManifold.from_strings([["1"] * 3] * 3, [["0"] * 3] * 3)
    with pytest.raises(StructureError):
        ChartManifold.from_strings([["1", "0"], ["0", "1"]], [["0", "-1"]])
    with pytest.raises(Exception):
        ChartManifold.from_strings([["1", "0"], ["0", "x3"]], [["0", "-1"], ["1", "0"]])


def test_upper_triangle_is_authoritative():
    M = ChartManifold.from_strings([["1", "0"], ["5", "1"]], [["0", "-1"], ["1", "0"]])
    g, _ = M.evaluate([0.0, 0.0])
    assert np.array_equal(g, np.eye(2))


def test_zoo_errors():
    with pytest.raises(KeyError):
        zoo("torus")
    with pytest.raises(ValueError):
        zoo("s6_nearly_kahler", n=4)
    with pytest.raises(ValueError):
        zoo("flat_twisted_j", n=1)
    with pytest.raises(ValueError):
        zoo("flat_cn", radius=2)


def test_christoffel_euclidean_and_scaled():
    assert max_norm(christoffel(zoo("flat_cn"), np.zeros(6))) == 0.0
    M = ChartManifold.from_strings([["3", "0"], ["0", "3"]], [["0", "-1"], ["1", "0"]])
    assert max_norm(christoffel(M, [0.2, 0.4])) == 0.0


def test_christoffel_two_sphere():
    M = ChartManifold.from_strings([["1", "0"], ["0", "sin(x1)^2"]],
                                   [["0", "-sin(x1)"], ["1/sin(x1)", "0"]])
    G = christoffel(M, [np.pi / 4, 0.3])
    assert G[0, 1, 1] == pytest.approx(-0.5, abs=1e-14)
    assert G[1, 0, 1] == pytest.approx(1.0, abs=1e-14)  # cot(pi/4)
    assert np.allclose(G, G.transpose(0, 2, 1))


def _fd_christoffel(M, p, h=1e-5):
    d = M.dim
    dg = np.zeros((d, d, d))
    for a in range(d):
        e = np.zeros(d)
        e[a] = h
        dg[:, :, a] = (M.evaluate(p + e)[0] - M.evaluate(p - e)[0]) / (2 * h)
    g_inv = np.linalg.inv(M.evaluate(p)[0])
    first = 0.5 * (np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg))
    return np.einsum("kl,lij->kij", g_inv, first)


@pytest.mark.parametrize("name", ["fubini_study_cpn", "s6_nearly_kahler", "round_sphere_diag"])
def test_christoffel_matches_finite_differences(name, rng):
    M = zoo(name)
    p = random_point(name, M.n, rng)
    assert np.allclose(christoffel(M, p), _fd_christoffel(M, p), atol=1e-8)


def test_flat_package(zoo_packages):
    _, pkg, _ = zoo_packages["flat_cn"]
    for arr in (pkg.riemann, pkg.ricci, pkg.nabla_J, pkg.nabla_riemann):
        assert max_norm(arr) == 0.0
    assert pkg.scalar == 0.0


def test_s6_constant_curvature(zoo_packages, rng):
    _, pkg, _ = zoo_packages["s6_nearly_kahler"]
    assert pkg.scalar == pytest.approx(30.0, abs=1e-6)
    assert np.allclose(pkg.ricci, 5 * pkg.g, atol=1e-10)
    assert max_norm(pkg.nabla_J) > 0.1
    g = pkg.g
    for _ in range(10):
        x, y = rng.normal(size=6), rng.normal(size=6)
        x /= np.sqrt(x @ g @ x)
        y -= (x @ g @ y) * x
        y /= np.sqrt(y @ g @ y)
        assert sectional_curvature(pkg, x, y) == pytest.approx(1.0, abs=1e-6)


def test_twisted_j_is_flat_but_not_kahler(zoo_packages):
    _, pkg, _ = zoo_packages["flat_twisted_j"]
    assert max_norm(pkg.riemann) == 0.0
    assert max_norm(pkg.nabla_J) > 0.1


def test_fubini_study_kahler(zoo_packages, rng):
    M, pkg, _ = zoo_packages["fubini_study_cpn"]
    assert max_norm(pkg.nabla_J) <= 1e-10
    R, J = pkg.riemann, pkg.J
    RJ = np.einsum("xyab,az,bu->xyzu", R, J, J)
    assert max_norm(R - RJ) <= 1e-9 * (1 + max_norm(R))
    assert pkg.scalar == pytest.approx(48.0, rel=1e-10)
    # holomorphic sectional curvature 4 everywhere
    for _ in range(5):
        x = rng.normal(size=6)
        assert sectional_curvature(pkg, x, J @ x) == pytest.approx(4.0, rel=1e-9)


def test_two_sphere_chart():
    M = zoo("round_sphere_diag", n=1)
    pkg = curvature_package(M, [1.0, 0.3])
    assert pkg.scalar == pytest.approx(2.0, rel=1e-12)
    assert max_norm(pkg.nabla_J) < 1e-12  # every 2-dim almost Hermitian manifold is Kahler


@pytest.mark.parametrize("name", NAMES)
def test_curvature_symmetries_on_zoo(name, rng):
    M = zoo(name)
    for _ in range(3):
        pkg = curvature_package(M, random_point(name, M.n, rng))
        scale = 1 + max_norm(pkg.riemann)
        assert max(curvature_defects(pkg.riemann).values()) <= 1e-10 * scale
        assert max_norm(pkg.ricci - pkg.ricci.T) <= 1e-12 * scale
        N, J = pkg.nabla_J, pkg.J
        assert max_norm(N + N.transpose(0, 2, 1)) <= 1e-10 * (1 + max_norm(N))
        # N(x, y, Jy) = 0
        NJ = np.einsum("ajl,lk->ajk", N, J)
        assert max_norm(NJ + NJ.transpose(0, 2, 1)) <= 1e-10 * (1 + max_norm(N))
        assert max_norm(pkg.christoffel - pkg.christoffel.transpose(0, 2, 1)) == 0.0


@pytest.mark.parametrize("name", NAMES)
def test_second_bianchi_on_zoo(name, rng):
    M = zoo(name)
    for _ in range(10):
        pkg = curvature_package(M, random_point(name, M.n, rng))
        assert pkg.bianchi_residual() <= 1e-8 * (1 + max_norm(pkg.nabla_riemann))


def test_nabla_riemann_matches_finite_differences(rng):
    # covariant derivative of R along a coordinate direction, from differences of R itself
    M = zoo("round_sphere_diag")
    p = random_point("round_sphere_diag", 3, rng)
    pkg = curvature_package(M, p)
    h = 1e-5
    a = 2
    e = np.zeros(6)
    e[a] = h
    dR = (curvature_package(M, p + e).riemann - curvature_package(M, p - e).riemann) / (2 * h)
    G, R = pkg.christoffel, pkg.riemann
    nabla = (dR - np.einsum("mi,mjkl->ijkl", G[:, a], R) - np.einsum("mj,imkl->ijkl", G[:, a], R)
             - np.einsum("mk,ijml->ijkl", G[:, a], R) - np.einsum("ml,ijkm->ijkl", G[:, a], R))
    assert np.allclose(nabla, pkg.nabla_riemann[a], atol=1e-7)


# -- octonions and the S^6 embedding ------------------------------------------

def test_octonion_cross_product(rng):
    eps = cross_product_tensor()
    assert len(OCTONION_TRIPLES) == 7
    assert np.array_equal(eps, -eps.transpose(1, 0, 2))
    assert np.array_equal(eps, eps.transpose(1, 2, 0))
    for _ in range(10):
        u, v = rng.normal(size=7), rng.normal(size=7)
        w = np.einsum("abc,a,b->c", eps, u, v)
        assert w @ u == pytest.approx(0, abs=1e-12) and w @ v == pytest.approx(0, abs=1e-12)
        assert w @ w == pytest.approx((u @ u) * (v @ v) - (u @ v) ** 2, rel=1e-12)
        # u x (u x v) = -|u|^2 v + (u.v) u
        uuv = np.einsum("abc,a,b->c", eps, u, w)
        assert np.allclose(uuv, -(u @ u) * v + (u @ v) * u)


def test_s6_embedding_pullback(rng):
    M = zoo("s6_nearly_kahler")
    eps = cross_product_tensor()
    for _ in range(3):
        p = random_point("s6_nearly_kahler", 3, rng)
        P = np.array([eval_value(e, p) for e in M.embedding])
        assert P @ P == pytest.approx(1.0, abs=1e-14)
        D = np.array([eval_jet(e, p, 1).derivs[0] for e in M.embedding])  # 7 x 6
        g, J = M.evaluate(p)
        assert np.allclose(D.T @ D, g, atol=1e-12)
        # pushforward of J v is p x (pushforward of v)
        cross = np.einsum("abc,a,bi->ci", eps, P, D)
        assert np.allclose(D @ J, cross, atol=1e-12)
