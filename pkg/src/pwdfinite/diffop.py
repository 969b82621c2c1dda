"""Linear differential operators with polynomial coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .polynomial import Poly


class DiffOperator:
    """``sum_j p_j(x) d^j/dx^j`` stored as a tuple of coefficient polynomials.

    ``coeffs[j]`` multiplies the ``j``-th derivative. Trailing zero
    coefficients are dropped so that ``coeffs[order]`` is never zero.
    """

    __slots__ = ("_p",)

    def __init__(self, coeffs: Sequence[Poly | Sequence[float] | float]):
        ps = []
        for c in coeffs:
            if isinstance(c, Poly):
                ps.append(c)
            elif np.ndim(c) == 0:
                ps.append(Poly.const(float(c)))
            else:
                ps.append(Poly(c))
        while ps and ps[-1].is_zero():
            ps.pop()
        if not ps:
            raise ValueError("the zero operator is not a valid DiffOperator")
        self._p = tuple(ps)

    @classmethod
    def d(cls, order: int = 1) -> DiffOperator:
        """Pure derivative ``d^order``."""
        return cls([Poly.zero()] * order + [Poly.const(1.0)])

    @classmethod
    def identity(cls) -> DiffOperator:
        return cls([Poly.const(1.0)])

    @property
    def coeffs(self) -> tuple[Poly, ...]:
        return self._p

    @property
    def order(self) -> int:
        return len(self._p) - 1

    def coeff(self, j: int) -> Poly:
        return self._p[j] if 0 <= j < len(self._p) else Poly.zero()

    def degrees(self) -> list[int]:
        return [p.degree() for p in self._p]

    def max_degree(self) -> int:
        return max(self.degrees())

    def __add__(self, other: DiffOperator) -> DiffOperator:
        n = max(len(self._p), len(other._p))
        return DiffOperator([self.coeff(j) + other.coeff(j) for j in range(n)])

    def scale(self, c: float) -> DiffOperator:
        return DiffOperator([p * c for p in self._p])

    def allclose(self, other: DiffOperator, atol: float = 1e-12) -> bool:
        n = max(len(self._p), len(other._p))
        return all(self.coeff(j).allclose(other.coeff(j), atol) for j in range(n))

    def __call__(self, f: Poly) -> Poly:
        return apply_to_poly(self, f)

    def __repr__(self) -> str:
        terms = ", ".join(repr(p.coeffs.tolist()) for p in self._p)
        return f"DiffOperator([{terms}])"

    def format(self) -> str:
        parts = []
        for j, p in enumerate(self._p):
            if p.is_zero():
                continue
            d = "id" if j == 0 else ("D" if j == 1 else f"D^{j}")
            parts.append(f"({p.format('x')})*{d}")
        return " + ".join(parts)


@dataclass(frozen=True)
class Jet:
    """Boundary data ``(u(x0), u'(x0), ..., u^(N-1)(x0))`` at ``point``."""

    point: float
    values: tuple[float, ...]

    def __init__(self, point: float, values: Sequence[float]):
        object.__setattr__(self, "point", float(point))
        object.__setattr__(self, "values", tuple(float(v) for v in values))

    @classmethod
    def of_poly(cls, f: Poly, point: float, n: int) -> Jet:
        return cls(point, [f.derivative(i)(point) for i in range(n)])

    def __len__(self) -> int:
        return len(self.values)


def apply_to_poly(op: DiffOperator, f: Poly) -> Poly:
    out = Poly.zero()
    for j, p in enumerate(op.coeffs):
        out = out + p * f.derivative(j)
    return out


def multiply_by_poly(op: DiffOperator, q: Poly) -> DiffOperator:
    """Left multiplication ``q(x) * op``; this is how jump points get encoded."""
    return DiffOperator([q * p for p in op.coeffs])


def jump_encoded(op: DiffOperator, jumps: Sequence[float]) -> DiffOperator:
    """``prod_i (x - xi_i)^N * op`` with ``N = op.order``."""
    q = Poly.from_roots(np.repeat(np.asarray(jumps, dtype=float), op.order))
    return multiply_by_poly(op, q)


def adjoint_on_monomial(op: DiffOperator, k: int) -> Poly:
    """``sum_j (-1)^j d^j/dx^j (p_j(x) x^k)``."""
    xk = Poly.monomial(k)
    out = Poly.zero()
    for j, p in enumerate(op.coeffs):
        out = out + (p * xk).derivative(j) * (-1) ** j
    return out


def concomitant(op: DiffOperator, u: Jet, k: int) -> float:
    """Bilinear concomitant ``P(u, x^k)`` evaluated at ``u.point``.

    The ``s``-th jet value is paired with
    ``sum_{j>s} (-1)^(j-1-s) d^(j-1-s)(p_j x^k)``; everything is done on exact
    polynomials and only evaluated at the end (so ``0**0 == 1``).
    """
    N = op.order
    if len(u) != N:
        raise ValueError(f"jet length {len(u)} does not match operator order {N}")
    xk = Poly.monomial(k)
    total = 0.0
    for s in range(N):
        if u.values[s] == 0.0:
            continue
        w = Poly.zero()
        for j in range(s + 1, N + 1):
            w = w + (op.coeff(j) * xk).derivative(j - 1 - s) * (-1) ** (j - 1 - s)
        total += u.values[s] * w(u.point)
    return total


def boundary_sequence(op: DiffOperator, jet_a: Jet, jet_b: Jet, k: int) -> float:
    """``eps_k = [P(f, x^k)]_a^b``."""
    return concomitant(op, jet_b, k) - concomitant(op, jet_a, k)
