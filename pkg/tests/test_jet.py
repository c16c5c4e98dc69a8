import math
from math import comb

import numpy as np
import pytest

from bochnerlab.jet import Jet, inverse, jet_einsum, multi_indices


def test_multi_indices_graded_lex():
    assert multi_indices(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


@pytest.mark.parametrize("nvars,order", [(1, 3), (3, 2), (6, 3)])
def test_multi_index_count(nvars, order):
    idx = multi_indices(nvars, order)
    assert len(idx) == comb(nvars + order, order)
    assert len(set(idx)) == len(idx)


def test_variable_and_constant():
    x = Jet.variable(0, [2.0, 3.0], 3)
    assert x.value == 2.0
    assert x.coefficient((1, 0)) == 1.0
    assert all(c == 0 for a, c in x.coefficients() if sum(a) > 1)
    k = Jet.constant(4.0, 2, 3)
    assert all(c == 0 for a, c in k.coefficients() if sum(a) > 0)


def test_product_leibniz():
    p = [2.0, 3.0]
    x, y = Jet.variable(0, p, 3), Jet.variable(1, p, 3)
    f = x * x * y  # x^2 y
    assert f.value == 12.0
    assert f.coefficient((1, 0)) == 12.0
    assert f.coefficient((0, 1)) == 4.0
    assert f.coefficient((2, 0)) == 6.0
    assert f.coefficient((1, 1)) == 4.0
    assert f.coefficient((2, 1)) == 2.0
    assert f.coefficient((3, 0)) == 0.0


def test_quotient_and_power():
    p = [0.7]
    x = Jet.variable(0, p, 3)
    f = 1.0 / (1.0 + x * x)
    t = 0.7
    exact = [1 / (1 + t * t), -2 * t / (1 + t * t) ** 2,
             (6 * t * t - 2) / (1 + t * t) ** 3, 24 * t * (1 - t * t) / (1 + t * t) ** 4]
    got = [f.coefficient((k,)) for k in range(4)]
    assert np.allclose(got, exact, rtol=1e-13)
    g = (1.0 + x * x) ** -1
    assert np.allclose([g.coefficient((k,)) for k in range(4)], exact, rtol=1e-13)


def test_compose_sin():
    x = Jet.variable(0, [0.3], 3)
    s, c = math.sin(0.3), math.cos(0.3)
    f = x.compose(s, c, -s, -c)
    assert np.allclose([f.coefficient((k,)) for k in range(4)], [s, c, -s, -c])


def test_chain_rule_multivariate():
    # sin(x*y): d_xy = cos(xy) - xy sin(xy)
    p = [0.4, 1.3]
    x, y = Jet.variable(0, p, 3), Jet.variable(1, p, 3)
    u = x * y
    t = float(u.value)
    f = u.compose(math.sin(t), math.cos(t), -math.sin(t), -math.cos(t))
    assert f.coefficient((1, 1)) == pytest.approx(math.cos(t) - t * math.sin(t), rel=1e-13)
    # d_xxy = -2 y sin(xy) - x y^2 cos(xy)
    a, b = p
    assert f.coefficient((2, 1)) == pytest.approx(-2 * b * math.sin(t) - a * b * b * math.cos(t),
                                                    rel=1e-12)


def test_jet_einsum_matches_elementwise(rng):
    p = rng.normal(size=3)
    xs = [Jet.variable(i, p, 3) for i in range(3)]
    A = Jet.stack([xs[0], xs[1] * xs[2], xs[2], xs[0] * xs[0]], (2, 2))
    v = Jet.stack([xs[1], xs[2] * xs[2]], (2,))
    Av = jet_einsum("ij,j->i", A, v)
    first = xs[0] * xs[1] + xs[1] * xs[2] * xs[2] * xs[2]
    for alpha, c in first.coefficients():
        assert Av.coefficient(alpha)[0] == pytest.approx(float(c), abs=1e-12)


def test_matrix_inverse_jet(rng):
    p = rng.normal(size=2) * 0.3
    x, y = Jet.variable(0, p, 3), Jet.variable(1, p, 3)
    one = Jet.constant(1.0, 2, 3)
    A = Jet.stack([one + x * x, x * y, x * y, one + y * y * y], (2, 2))
    Ainv = inverse(A)
    prod = jet_einsum("ij,jk->ik", A, Ainv)
    assert np.allclose(prod.value, np.eye(2), atol=1e-14)
    for d in prod.derivs:
        assert np.max(np.abs(d)) < 1e-12


def test_grad_and_truncate():
    x = Jet.variable(0, [1.0, 2.0], 3)
    y = Jet.variable(1, [1.0, 2.0], 3)
    f = x * x * y
    g = f.grad()
    assert g.order == 2 and g.shape == (2,)
    assert np.allclose(g.value, [4.0, 1.0])
    assert f.truncate(1).order == 1


def test_errors():
    x = Jet.variable(0, [1.0], 2)
    with pytest.raises(ValueError):
        x.coefficient((3,))
    with pytest.raises(ValueError):
        x.coefficient((1, 0))
    with pytest.raises(ValueError):
        Jet(1.0, [np.zeros(2)] * 4)
