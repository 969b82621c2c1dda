import numpy as np
import pytest
from hypothesis import given, strategies as st

from pwdfinite import polynomial as P
from pwdfinite.polynomial import Poly

coeff = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
polys = st.lists(coeff, min_size=1, max_size=9).map(Poly)


def test_zero_is_canonical_empty():
    assert Poly([]).coeffs.size == 0
    assert Poly([0.0, 0.0]).coeffs.size == 0
    assert Poly.zero().is_zero()
    assert Poly([1.0, 0.0, 1e-20]).degree() == 0


def test_add_examples():
    assert P.add(Poly([1, 1]), Poly([0, -1])) == Poly([1])
    p = Poly([3, 0, 2])
    assert P.add(Poly.zero(), p) == p
    assert P.add(Poly([0, 2, 1]), Poly([1, -2, 1])).allclose(Poly([1, 0, 2]))


def test_mul_examples():
    a, b = 0.3, -1.2
    assert P.mul(Poly([-a, 1]), Poly([-b, 1])).allclose(Poly([a * b, -(a + b), 1]))
    p = Poly([1, 2, 3])
    assert P.mul(p, Poly.const(1)) == p
    got = P.mul(Poly.from_roots([0.5, 0.5]), Poly([4, 0, 1]))
    assert got.allclose(Poly([1, -4, 4.25, -1, 1]))


def test_derivative_examples():
    assert P.derivative(Poly.monomial(3), 1) == Poly([0, 0, 3])
    assert P.derivative(Poly.const(7), 1).is_zero()
    assert P.derivative(Poly.monomial(4), 3) == Poly([0, 24])


def test_eval_examples():
    assert P.evaluate(Poly([-1, 0, 1]), 2) == 3
    assert P.evaluate(Poly.zero(), 17.5) == 0
    assert P.evaluate(Poly.from_roots([0.5, 0.5]), 0.6) == pytest.approx(0.01, abs=1e-15)


def test_roots_examples():
    assert sorted(np.real(P.roots(Poly([-1, 0, 1])))) == pytest.approx([-1, 1])
    assert P.roots(Poly([-0.3, 1]))[0] == pytest.approx(0.3)
    r = sorted(P.roots(Poly.from_roots([0.5, 0.5, 0.9])), key=lambda z: z.real)
    assert abs(r[0] - 0.5) < 1e-6 and abs(r[1] - 0.5) < 1e-6 and abs(r[2] - 0.9) < 1e-6


def test_roots_of_zero_raises():
    with pytest.raises(ValueError, match="no roots of zero polynomial"):
        P.roots(Poly.zero())


def test_divmod_and_shift():
    p = Poly.from_roots([0.2, 0.7, -1.0])
    q, r = p.divmod(Poly.from_roots([0.7]))
    assert r.is_zero() or np.max(np.abs(r.coeffs)) < 1e-14
    assert q.allclose(Poly.from_roots([0.2, -1.0]))
    # shift(r) gives k -> p(k + r)
    assert p.shift(2)(1.5) == pytest.approx(p(3.5))


@given(polys, polys, st.floats(-2, 2))
def test_eval_of_product_is_product_of_evals(p, q, x):
    lhs = (p * q)(x)
    rhs = p(x) * q(x)
    scale = max(1.0, float(np.sum(np.abs(p.coeffs))) * float(np.sum(np.abs(q.coeffs))) * 2.0 ** 16)
    assert abs(lhs - rhs) <= 1e-12 * scale


@given(st.floats(-1, -0.5), st.lists(st.floats(0.1, 0.4), max_size=6))
def test_separated_roots_are_recovered(start, gaps):
    rs = start + np.cumsum([0.0, *gaps])
    rs = rs[rs <= 1.0]
    got = np.sort(np.real(P.roots(Poly.from_roots(rs))))
    assert np.max(np.abs(got - rs)) <= 1e-8


@given(polys, st.integers(0, 4), st.floats(-1.5, 1.5))
def test_derivative_degree_and_finite_difference(p, k, x):
    d = p.derivative(k)
    if p.degree() < k:
        assert d.is_zero()
    else:
        assert d.degree() == p.degree() - k or d.is_zero()
    if k == 1:
        h = 1e-5
        fd = (p(x + h) - p(x - h)) / (2 * h)
        assert abs(d(x) - fd) <= 1e-6 * max(1.0, float(np.sum(np.abs(p.coeffs))) * 10)


def test_format():
    assert Poly([1, -2, 3]).format("k") == "3*k^2 - 2*k + 1"
