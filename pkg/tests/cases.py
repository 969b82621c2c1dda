"""Closed-form signals paired with operators that annihilate every piece."""

import math

import numpy as np

from pwdfinite.diffop import DiffOperator, jump_encoded
from pwdfinite.polynomial import Poly
from pwdfinite.signals import (
    Exponential,
    PiecewiseSignal,
    Polynomial,
    Sinusoid,
    piecewise_constant,
    piecewise_polynomial,
    piecewise_sinusoid,
)


def sinusoid_operator(omega: float) -> DiffOperator:
    return DiffOperator([Poly([omega * omega]), Poly.zero(), Poly([1.0])])


def exponential_operator(beta: float) -> DiffOperator:
    return DiffOperator([Poly([-beta]), Poly([1.0])])


def legendre_signal(n: int) -> PiecewiseSignal:
    c = np.polynomial.legendre.leg2poly([0] * n + [1]) * math.sqrt((2 * n + 1) / 2)
    return PiecewiseSignal((-1.0, 1.0), (Polynomial(tuple(c)),))


def annihilation_cases():
    """``(name, signal, per-piece operator)``; jumps are encoded by the caller."""
    return [
        ("constant", PiecewiseSignal((0.0, 1.0), (Polynomial((2.0,)),)), DiffOperator.d(1)),
        ("cubic", PiecewiseSignal((-1.0, 1.0), (Polynomial((0.3, -1.0, 0.5, 2.0)),)), DiffOperator.d(4)),
        ("exponential", PiecewiseSignal((0.0, 1.0), (Exponential(1.5, 0.7),)), exponential_operator(0.7)),
        ("sinusoid", PiecewiseSignal((0.2, 1.3), (Sinusoid(1.0, 3.0, 0.4),)), sinusoid_operator(3.0)),
        ("pw-constant-3", piecewise_constant([0.25, 0.5, 0.8], [1, -2, 3, 0.5]), DiffOperator.d(1)),
        ("pw-linear-2", piecewise_polynomial([0.3, 0.7], [[1, 2], [0, -1], [2, 0.5]]), DiffOperator.d(2)),
        ("pw-quadratic-3", piecewise_polynomial([0.2, 0.45, 0.75], [[1, 0, 1], [0, 2, -1], [1, 1, 1], [-1, 0, 3]]),
         DiffOperator.d(3)),
        ("pw-sinusoid-1", piecewise_sinusoid([0.6], [1.0, 0.7], 5.0, [0.0, 1.0]), sinusoid_operator(5.0)),
        ("pw-sinusoid-3", piecewise_sinusoid([0.2, 0.5, 0.8], [1.0, -0.5, 2.0, 0.3], 4.0, [0.0, 1.0, 2.0, 3.0]),
         sinusoid_operator(4.0)),
        ("pw-exponential-2", PiecewiseSignal((0.0, 0.4, 0.7, 1.0),
                                             (Exponential(1.0, -1.2), Exponential(2.0, -1.2), Exponential(-0.5, -1.2))),
         exponential_operator(-1.2)),
    ]


def encoded(sig: PiecewiseSignal, op: DiffOperator) -> DiffOperator:
    return jump_encoded(op, sig.jumps) if sig.jumps else op
