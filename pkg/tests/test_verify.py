import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bochnerlab.bochner import phi, q_tensor
from bochnerlab.manifold import curvature_package
from bochnerlab.tensor import complex_eval, max_norm
from bochnerlab.verify.identities import (BIANCHI_STEPS, EQ24_STEPS, PROOF_STEPS, STEPS, PointData,
                                          bianchi_cyclic, eq24_lhs, nabla_phi, proof_step_residual)
from bochnerlab.verify.synthetic import (EXPECTED_CONSTANTS, calibrate_and_check_31_to_35,
                                         calibrate_and_check_37, check_steps, impose_37,
                                         project_admissible, run_oracle, step_sides, symmetry_split,
                                         synthetic_point)
from bochnerlab.zoo import random_point, standard_j, zoo

# -- synthetic points ---------------------------------------------------------


def test_synthetic_point_requires_n_above_two():
    with pytest.raises(ValueError):
        synthetic_point(0, 2)
    with pytest.raises(ValueError):
        synthetic_point(0, 3, mu=[1.0, 2.0])


def test_synthetic_point_is_deterministic():
    a, b = synthetic_point(7, 3), synthetic_point(7, 3)
    assert np.array_equal(a.A, b.A) and np.array_equal(a.DQ, b.DQ) and a.indices == b.indices
    assert not np.array_equal(a.A, synthetic_point(8, 3).A)


def test_zero_mu_gives_zero_q():
    sp = synthetic_point(0, 3, mu=[0, 0, 0])
    assert max_norm(sp.Q) == 0.0
    for step in EQ24_STEPS:
        value, closed = step_sides(sp, step)
        assert abs(value) < 1e-14 and abs(closed) < 1e-14


@given(st.integers(0, 10_000), st.sampled_from([3, 4]))
@settings(max_examples=30, deadline=None)
def test_admissible_data(seed, n):
    sp = synthetic_point(seed, n)
    A, J = sp.A, sp.J
    assert max_norm(A + A.transpose(0, 2, 1)) <= 1e-12
    assert max_norm(np.einsum("xyy->xy", A)) <= 1e-12
    AJJ = np.einsum("xab,ay,bz->xyz", A, J, J)
    assert max_norm(AJJ + A) <= 1e-12
    # (nabla J) J + J (nabla J) = 0 with g = I: A(x, Jy, z) = A(x, y, Jz)
    assert max_norm(np.einsum("xaz,ay->xyz", A, J) - np.einsum("xya,az->xyz", A, J)) <= 1e-12
    assert np.array_equal(project_admissible(A, J), A) or max_norm(project_admissible(A, J) - A) <= 1e-15
    assert max_norm(sp.DQ - sp.DQ.transpose(0, 2, 1)) == 0.0


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_nabla_j_pairing_vanishes(seed):
    sp = synthetic_point(seed, 3)
    Z, Zb = sp.frame_vectors
    rng = np.random.default_rng(seed)
    X = rng.normal(size=6) + 1j * rng.normal(size=6)
    for a in range(3):
        for b in range(3):
            assert abs(complex_eval(sp.A, [X, Z[a], Zb[b]])) <= 1e-12


def test_projection_is_idempotent(rng):
    J = standard_j(3)
    for _ in range(10):
        P = project_admissible(rng.normal(size=(6, 6, 6)), J)
        assert max_norm(project_admissible(P, J) - P) <= 1e-15


# -- eq24 -----------------------------------------------------------------------

def _args(rng, d=6):
    return [rng.normal(size=d) + 1j * rng.normal(size=d) for _ in range(5)]


def test_eq24_trivial_cases(rng):
    g, J = np.eye(6), standard_j(3)
    R = rng.normal(size=(6,) * 4)
    assert eq24_lhs(R, np.zeros((6,) * 3), J, g, _args(rng)) == 0
    assert eq24_lhs(np.zeros((6,) * 4), rng.normal(size=(6,) * 3), J, g, _args(rng)) == 0


def test_eq24_argument_errors(rng):
    g, J = np.eye(6), standard_j(3)
    with pytest.raises(ValueError):
        eq24_lhs(np.zeros((6,) * 4), np.zeros((6,) * 3), J, g, _args(rng)[:4])
    with pytest.raises(ValueError):
        eq24_lhs(np.zeros((4,) * 4), np.zeros((6,) * 3), J, g, _args(rng))
    with pytest.raises(ValueError):
        eq24_lhs(np.zeros((6,) * 4), np.zeros((6,) * 3), J, g, _args(rng, 4))


@pytest.mark.parametrize("name", ["flat_cn", "fubini_study_cpn", "s6_nearly_kahler",
                                  "flat_twisted_j", "round_sphere_diag"])
def test_eq24_vanishes_where_ah1_holds(name, rng):
    M = zoo(name)
    for _ in range(10):
        pkg = curvature_package(M, random_point(name, M.n, rng))
        R, J = pkg.riemann, pkg.J
        ah1 = max_norm(R - np.einsum("xyab,az,bu->xyzu", R, J, J))
        if ah1 > 1e-9:
            continue
        scale = 1 + max_norm(R) * max_norm(pkg.nabla_J)
        for _ in range(3):
            args = [v / np.abs(v).max() for v in _args(rng)]
            assert abs(eq24_lhs(R, pkg.nabla_J, J, pkg.g, args)) <= 1e-8 * scale


def _covariant_fd(M, p, field, h=1e-5):
    """``nabla_a T`` for a covariant tensor field ``field(pkg)`` by central differences."""
    pkg = curvature_package(M, p)
    G = pkg.christoffel
    T = field(pkg)
    k = T.ndim
    out = []
    for a in range(M.dim):
        e = np.zeros(M.dim)
        e[a] = h
        dT = (field(curvature_package(M, p + e)) - field(curvature_package(M, p - e))) / (2 * h)
        for s in range(k):
            corr = np.tensordot(G[:, a, :], T, axes=([0], [s]))  # [i_s, ...rest]
            dT = dT - np.moveaxis(corr, 0, s)
        out.append(dT)
    return pkg, np.array(out)


def test_eq24_equals_minus_cyclic_derivative_of_ah1_defect(rng):
    # Independent oracle: with F = R(., ., z, u) - R(., ., Jz, Ju), eq24 = -sum_cyc (nabla_x F)(y, z, u, v).
    M = zoo("s6_nearly_kahler")
    p = random_point("s6_nearly_kahler", 3, rng)
    F = lambda pk: pk.riemann - np.einsum("xyab,az,bu->xyzu", pk.riemann, pk.J, pk.J)  # noqa: E731
    pkg, dF = _covariant_fd(M, p, F)
    for _ in range(3):
        x, y, z, u, v = _args(rng)
        value = eq24_lhs(pkg.riemann, pkg.nabla_J, pkg.J, pkg.g, [x, y, z, u, v])
        oracle = -bianchi_cyclic(dF, [x, y, z, u, v])
        assert abs(value) > 1e-3
        assert value == pytest.approx(oracle, rel=1e-6)


@pytest.mark.parametrize("name", ["s6_nearly_kahler", "round_sphere_diag", "fubini_study_cpn"])
def test_nabla_phi_matches_finite_differences(name, rng):
    M = zoo(name)
    p = random_point(name, M.n, rng)
    Qf = lambda pk: phi(q_tensor(pk.ricci, pk.scalar, pk.g, pk.n), pk.g, pk.J)  # noqa: E731
    pkg, dphi = _covariant_fd(M, p, Qf)
    Q = q_tensor(pkg.ricci, pkg.scalar, pkg.g, pkg.n)
    got = nabla_phi(Q, pkg.nabla_Q, pkg.nabla_J, pkg.g, pkg.J)
    assert np.allclose(got, dphi, atol=1e-6 * (1 + max_norm(dphi)))


# -- step residuals -----------------------------------------------------------------

def test_step_31_vanishes_when_coefficient_does():
    sp = synthetic_point(3, 3, mu=[1.0, -5.0, 0.7])
    pd = sp.point_data()
    assert proof_step_residual("3.1", pd, (0, 1)) == 0.0
    value, closed = step_sides(sp, "3.1", (0, 1))
    assert closed == 0 and abs(value) < 1e-12


def test_step_rejects_repeated_indices():
    sp = synthetic_point(1, 3)
    with pytest.raises(ValueError):
        step_sides(sp, "3.2", (0, 1, 0))
    with pytest.raises(ValueError):
        proof_step_residual("3.2", sp.point_data(), (0, 1, 0))
    with pytest.raises(ValueError):
        proof_step_residual("3.9", sp.point_data(), (0, 1, 2))
    with pytest.raises(ValueError):
        proof_step_residual("3.3", sp.point_data(), (0, 1, 5))


def test_step_warns_when_bochner_is_large():
    pd = synthetic_point(1, 3).point_data()
    with pytest.warns(RuntimeWarning):
        proof_step_residual("3.1", pd, (0, 1), b_residual=1.0, tol=1e-8)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        proof_step_residual("3.1", pd, (0, 1), b_residual=0.0, tol=1e-8)


def test_all_proof_steps_zero_on_kahler_flat():
    d = 6
    pd = PointData(g=np.eye(d), J=standard_j(3), Q=np.zeros((d, d)), N=np.zeros((d,) * 3),
                   DQ=np.zeros((d,) * 3), mu=np.zeros(3),
                   Z=synthetic_point(0, 3).frame_vectors[0], Zbar=synthetic_point(0, 3).frame_vectors[1])
    for step in PROOF_STEPS:
        arity = STEPS[step].arity if step in STEPS else 3
        if arity <= 3:
            assert proof_step_residual(step, pd, (0, 1, 2)[:arity]) == 0.0


def test_bianchi_steps_trivial_data():
    sp = synthetic_point(2, 3)
    sp = replace(sp, A=np.zeros_like(sp.A), DQ=np.zeros_like(sp.DQ))
    for step in BIANCHI_STEPS:
        value, closed = step_sides(sp, step)
        assert value == 0 and closed == 0


def test_impose_37_removes_only_target_components():
    sp = synthetic_point(5, 3)
    Z = sp.frame_vectors[0]
    a, b, c = sp.indices[:3]
    DQ2 = impose_37(sp.DQ, Z, a, b, c)
    pd = replace(sp.point_data(), DQ=DQ2)
    z, zb = (lambda k: ("Z", k)), (lambda k: ("Zb", k))
    assert abs(pd.dq(z(b), zb(a), z(c))) < 1e-12 and abs(pd.dq(z(c), zb(a), z(b))) < 1e-12
    assert max_norm(DQ2 - DQ2.transpose(0, 2, 1)) < 1e-12
    assert abs(pd.dq(zb(a), z(b), z(c)) - sp.point_data().dq(zb(a), z(b), z(c))) < 1e-12


def test_symmetry_split():
    for seed in range(20):
        s = symmetry_split(synthetic_point(seed, 3))
        assert s["nablaQ_symmetric_defect"] <= 1e-12
        assert s["nablaJ_antisymmetric_defect"] <= 1e-12
        assert s["nablaQ_magnitude"] > 1e-6


# -- oracle -------------------------------------------------------------------------

@pytest.mark.parametrize("n,seeds", [(3, 100), (4, 50)])
def test_oracle_constants_are_frozen(n, seeds):
    run = run_oracle(n, seeds)
    assert run.max_rel_error <= 1e-9
    for name, chk in run.checks.items():
        assert chk.constant == pytest.approx(EXPECTED_CONSTANTS[name], abs=1e-9)
        assert chk.draws == seeds
    assert ("ext3" in run.checks) == (n >= 4)


def test_calibration_against_given_constants():
    pts = [synthetic_point(s, 4) for s in range(100, 110)]
    res = calibrate_and_check_31_to_35(pts, EXPECTED_CONSTANTS)
    assert max(c.max_rel_error for c in res.values()) <= 1e-9
    res = calibrate_and_check_37(pts, EXPECTED_CONSTANTS)
    assert max(c.max_rel_error for c in res.values()) <= 1e-9


def test_wrong_constant_is_detected():
    pts = [synthetic_point(s, 3) for s in range(5)]
    res = check_steps(pts, ["3.1"], {"3.1": -4j})
    assert res["3.1"].max_rel_error > 0.5


def test_uninformative_draws_are_regenerated():
    pts = [synthetic_point(0, 3, mu=[0.0, 0.0, 0.0])]
    res = check_steps(pts, ["3.1"])
    assert res["3.1"].regenerated >= 1
    assert res["3.1"].constant == pytest.approx(4j)
