"""Built-in identity suite: known recurrences and closed-form recoveries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import shiftops
from .diffop import DiffOperator, multiply_by_poly
from .inversion import StripeSpec, build_H, solve_with_known
from .polynomial import Poly
from .shiftops import MomentSequence, ShiftOperator
from .signals import Exponential, PiecewiseSignal, Polynomial, moments_exact

BETA = 0.7
ALPHA = 1.5


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def bessel_operator() -> DiffOperator:
    """Annihilator of ``K_0(x)^2``: ``x^2 D^3 + 3x D^2 + (1 - 4x^2) D - 4x``."""
    return DiffOperator([Poly([0, -4]), Poly([1, 0, -4]), Poly([0, 3]), Poly([0, 0, 1])])


def bessel_expected() -> ShiftOperator:
    return ShiftOperator({1: Poly([4, 4]), -1: Poly([0, 0, 0, -1])})


def exponential_expected(beta: float) -> ShiftOperator:
    """``-beta E^2 + (beta - (k+2)) E + (k+1)``."""
    return ShiftOperator({2: -beta, 1: Poly([beta - 2, -1]), 0: Poly([1, 1])})


def legendre_lambda(n: int) -> float:
    """Recover ``lambda_n`` of the Legendre equation from the moments of ``L_n``."""
    c = np.polynomial.legendre.leg2poly([0] * n + [1])
    c = c * math.sqrt((2 * n + 1) / 2)  # orthonormal on [-1, 1]
    sig = PiecewiseSignal((-1.0, 1.0), (Polynomial(tuple(c)),))
    spec = StripeSpec(((0, 0), (1, 1), (2, 2)))
    rows = n + 5
    m = moments_exact(sig, rows - 1 + 4 + 1)
    H = build_H(m, spec, 2, rows)
    known = {spec.col(0, 1): 0.0, spec.col(1, 1): -2.0, spec.col(0, 2): 1.0,
             spec.col(1, 2): 0.0, spec.col(2, 2): -1.0}
    return float(solve_with_known(H, known)[spec.col(0, 0)])


def random_operator(rng: np.random.Generator, max_order: int = 3, max_degree: int = 3) -> DiffOperator:
    N = int(rng.integers(0, max_order + 1))
    coeffs = [Poly(rng.uniform(-1, 1, int(rng.integers(0, max_degree + 1)) + 1)) for _ in range(N + 1)]
    if coeffs[-1].is_zero():
        coeffs[-1] = Poly.const(1.0)
    return DiffOperator(coeffs)


def method_equivalence_gap(op: DiffOperator, q: Poly) -> float:
    """Largest coefficient difference between ``M_{q op}`` and ``q(E) M_op``."""
    lhs = shiftops.dmop(multiply_by_poly(op, q))
    rhs = shiftops.compose(ShiftOperator.from_poly_in_E(q), shiftops.dmop(op))
    return lhs.max_coeff_diff(rhs)


def run_checks(n_random: int = 100, seed: int = 0) -> list[Check]:
    checks = []

    gap = shiftops.dmop(bessel_operator()).max_coeff_diff(bessel_expected())
    checks.append(Check("bessel recurrence 4(k+1) m_{k+1} = k^3 m_{k-1}", gap <= 1e-12, f"max coeff diff {gap:.3g}"))

    ann, _ = shiftops.normalize_offsets(shiftops.annihilator(DiffOperator([-BETA, 1.0]), 0.0, 1.0))
    gap = ann.max_coeff_diff(exponential_expected(BETA))
    checks.append(Check("exponential annihilator on [0,1]", gap <= 1e-12,
                        f"beta={BETA}: {shiftops.format_recurrence(ann)}"))

    sig = PiecewiseSignal((0.0, 1.0), (Exponential(ALPHA, BETA),))
    m = moments_exact(sig, 2).values
    beta = (2 * m[1] - m[0]) / (m[1] - m[2])
    alpha = beta * m[0] / math.expm1(beta)
    ok = abs(beta - BETA) <= 1e-9 and abs(alpha - ALPHA) <= 1e-9
    checks.append(Check("exponential beta/alpha from m_0..m_2", ok, f"beta={beta:.15g} alpha={alpha:.15g}"))

    lam = legendre_lambda(5)
    checks.append(Check("legendre lambda_5 = 30", abs(lam - 30) <= 1e-8, f"lambda_5={lam:.15g}"))

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_random):
        op = random_operator(rng)
        q = Poly(rng.uniform(-1, 1, int(rng.integers(0, 5)) + 1))
        if q.is_zero():
            q = Poly.const(1.0)
        worst = max(worst, method_equivalence_gap(op, q))
    checks.append(Check(f"method I == method II ({n_random} random pairs)", worst <= 1e-12, f"max coeff diff {worst:.3g}"))
    return checks


def report(checks: list[Check]) -> str:
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}  [{c.detail}]" for c in checks]
    return "\n".join(lines)
