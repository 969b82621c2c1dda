import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from pwdfinite import signals as S
from pwdfinite.diffop import DiffOperator
from pwdfinite.polynomial import Poly
from pwdfinite.signals import (
    Exponential,
    PiecewiseSignal,
    Polynomial,
    Rational,
    SampledSignal,
    Sinusoid,
)


def test_sample_examples():
    one = PiecewiseSignal((0.0, 1.0), (Polynomial((1.0,)),))
    assert S.sample(one, 3).values.tolist() == [1, 1, 1]
    two = S.piecewise_constant([0.5], [1, 2])
    assert S.sample(two, 5).values.tolist() == [1, 1, 2, 2, 2]
    sig = PiecewiseSignal((0.0, 1.0), (Sinusoid(1.0, 2.0, 0.0),))
    s = S.sample(sig, 101)
    assert np.allclose(s.values, np.sin(2 * np.linspace(0, 1, 101)), atol=1e-15)
    with pytest.raises(ValueError):
        S.sample(one, 1)


def test_add_noise_examples():
    s = S.sample(PiecewiseSignal((0.0, 1.0), (Sinusoid(1.0, 3.0, 0.2),)), 1000)
    assert np.array_equal(S.add_noise(s, math.inf, 1).values, s.values)
    a, b = S.add_noise(s, 20, 7), S.add_noise(s, 20, 7)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, S.add_noise(s, 20, 8).values)
    zero = SampledSignal(np.linspace(0, 1, 5), np.zeros(5))
    with pytest.raises(ValueError, match="zero"):
        S.add_noise(zero, 10, 0)


@pytest.mark.parametrize("snr", [0.0, 10.0, 25.0, 40.0])
def test_empirical_snr(snr):
    s = S.sample(S.piecewise_constant([0.3, 0.6], [1.0, -2.0, 0.5]), 100_000)
    noisy = S.add_noise(s, snr, 2024)
    assert abs(S.empirical_snr_db(s, noisy) - snr) <= 0.5


def test_moments_quadrature_examples():
    one = PiecewiseSignal((0.0, 1.0), (Polynomial((1.0,)),))
    m = S.moments_quadrature(S.sample(one, 2001), 6)
    h = 1 / 2000
    assert np.allclose(m.values, 1 / np.arange(1, 8), atol=h * h * 10)
    two = S.piecewise_constant([0.5], [1, 2])
    assert S.moments_quadrature(S.sample(two, 4097), 0)[0] == pytest.approx(1.5, abs=1e-3)


def _smooth():
    return PiecewiseSignal((0.0, 1.0), (Sinusoid(1.3, 4.0, 0.5),))


def test_trapezoid_order():
    sig = _smooth()
    exact = S.moments_exact(sig, 8).values
    errs = []
    for n in (65, 129, 257, 513):
        q = S.moments_quadrature(S.sample(sig, n), 8).values
        errs.append(np.max(np.abs(q - exact)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders >= 1.8) & (orders <= 2.2)), orders


def test_moments_exact_examples():
    sig = PiecewiseSignal((0.0, 1.0), (Polynomial((0.0, 1.0)),))
    assert np.allclose(S.moments_exact(sig, 10).values, 1 / np.arange(2, 13), rtol=1e-14)
    beta = 0.7
    m0 = S.moments_exact(PiecewiseSignal((0.0, 1.0), (Exponential(1.0, beta),)), 0)[0]
    assert 1.0 * math.expm1(beta) == pytest.approx(beta * m0, rel=1e-14)
    sig = S.piecewise_constant([0.25, 0.5, 0.8], [1, -2, 3, 0.5])
    assert S.moments_exact(sig, 0)[0] == pytest.approx(0.75, rel=1e-14)


def test_no_closed_form_for_rational():
    sig = S.rational_signal([1.0, 0.0, 1.0], [9.0, -4.0, 1.0])
    with pytest.raises(S.NoClosedForm, match="no closed form"):
        S.moments_exact(sig, 3)
    # Gauss-Legendre fallback is accurate
    m = S.moments_gauss(sig, 5)
    for k in range(6):
        ref = mpmath.quad(lambda x: x ** k * (x * x + 1) / (x * x - 4 * x + 9), [0, 1])
        assert m[k] == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("piece,interval", [
    (Sinusoid(0.8, 12.0, 0.3), (0.0, 1.0)),
    (Sinusoid(1.0, 0.3, -1.0), (-1.0, 2.0)),
    (Exponential(1.5, -3.0), (0.2, 1.7)),
    (Exponential(0.5, 25.0), (0.0, 1.0)),
    (Polynomial((1.0, -2.0, 0.5, 3.0)), (-1.0, 1.0)),
])
def test_exact_moments_against_mpmath(piece, interval):
    lo, hi = interval
    m = piece.moments(lo, hi, 25)
    mpmath.mp.dps = 30
    for k in (0, 1, 5, 12, 25):
        ref = float(mpmath.quad(lambda x: x ** k * _mp_eval(piece, x), [lo, hi]))
        assert m[k] == pytest.approx(ref, rel=1e-11, abs=1e-14 * abs(m[0]))


def _mp_eval(piece, x):
    if isinstance(piece, Sinusoid):
        return piece.amplitude * mpmath.sin(piece.omega * x + piece.phase)
    if isinstance(piece, Exponential):
        return piece.alpha * mpmath.exp(piece.beta * x)
    return sum(c * x ** i for i, c in enumerate(piece.coeffs))


def test_moment_additivity():
    sig = S.piecewise_sinusoid([0.3, 0.7], [1.0, -0.4, 2.0], 6.0, [0.0, 0.5, 1.0])
    per_piece = sig.piece_moments(10)
    assert np.allclose(per_piece.sum(axis=0), S.moments_exact(sig, 10).values, rtol=0, atol=0)
    q = S.moments_quadrature(S.sample(sig, 2 ** 16 + 1), 10).values
    assert np.max(np.abs(q - per_piece.sum(axis=0))) < 1e-4


def test_mse_examples():
    x = np.linspace(0, 1, 11)
    f = SampledSignal(x, np.ones(11))
    assert S.mse(f, f) == 0
    assert S.mse(f, SampledSignal(x, 2 * np.ones(11))) == 1
    assert S.mse(f, SampledSignal(x, np.ones(11) + 0.1)) == pytest.approx(0.01)
    with pytest.raises(ValueError, match="different grids"):
        S.mse(f, SampledSignal(np.linspace(0, 2, 11), np.ones(11)))


def test_rational_pole_check():
    with pytest.raises(ValueError):
        S.rational_signal([1.0], [-0.5, 1.0])  # pole at 0.5


def test_ode_solution_piece():
    op = DiffOperator([Poly([4.0]), Poly.zero(), Poly([1.0])])
    piece = S.OdeSolution(op, (0.0, 2.0), 0.0, 1.0)
    x = np.linspace(0, 1, 7)
    assert np.allclose(piece(x), np.sin(2 * x), atol=1e-9)


def test_json_round_trip(tmp_path):
    sig = S.piecewise_sinusoid([0.6], [1.0, 0.7], 5.0, [0.0, 1.0])
    path = tmp_path / "sig.json"
    path.write_text(json.dumps(sig.to_dict()))
    back, doc = S.load_signal(path)
    assert back == sig
    x = np.linspace(0, 1, 50)
    assert np.array_equal(back(x), sig(x))


def test_csv_round_trip(tmp_path):
    m = S.moments_exact(S.piecewise_constant([0.4], [1.0, 3.0]), 7)
    S.write_moments_csv(tmp_path / "m.csv", m)
    assert (tmp_path / "m.csv").read_text().splitlines()[0] == "k,m_k"
    back = S.read_moments_csv(tmp_path / "m.csv", (0.0, 1.0))
    assert np.array_equal(back.values, m.values)
    s = S.sample(S.piecewise_constant([0.4], [1.0, 3.0]), 33)
    S.write_samples_csv(tmp_path / "s.csv", s)
    back = S.read_samples_csv(tmp_path / "s.csv")
    assert np.array_equal(back.values, s.values) and np.array_equal(back.grid, s.grid)


@given(st.floats(-3, 3), st.floats(0.1, 3), st.integers(0, 15))
def test_exponential_recursion_matches_quadrature(beta, width, K):
    piece = Exponential(1.0, beta)
    m = piece.moments(-0.5, -0.5 + width, K)
    xg, wg = np.polynomial.legendre.leggauss(80)
    x = -0.5 + 0.5 * width * (xg + 1)
    ref = [0.5 * width * np.sum(wg * x ** k * np.exp(beta * x)) for k in range(K + 1)]
    assert np.allclose(m, ref, rtol=1e-11, atol=1e-14)
