"""Dense univariate real polynomials.

Coefficients are stored in ascending order, ``coeffs[i]`` multiplies ``x**i``.
The same class is used for polynomials in ``x`` (operator coefficients) and
in ``k`` (recurrence coefficients).
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

TRIM_RTOL = 1e-13


def _trim(c: np.ndarray) -> np.ndarray:
    if c.size == 0:
        return c
    scale = np.max(np.abs(c))
    if scale == 0.0 or not np.isfinite(scale):
        if scale == 0.0:
            return c[:0]
        return c
    keep = np.nonzero(np.abs(c) > TRIM_RTOL * scale)[0]
    return c[: keep[-1] + 1]


class Poly:
    """Immutable dense polynomial with real (or complex) coefficients.

    The zero polynomial has an empty coefficient array and degree -1.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float] | np.ndarray = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs)
        if c.dtype.kind not in "fc":
            c = c.astype(float)
        c = _trim(np.atleast_1d(c).copy()) if c.size else np.zeros(0)
        c.setflags(write=False)
        self._c = c

    # construction helpers
    @classmethod
    def zero(cls) -> Poly:
        return cls(())

    @classmethod
    def const(cls, value: float) -> Poly:
        return cls((value,))

    @classmethod
    def x(cls) -> Poly:
        return cls((0.0, 1.0))

    @classmethod
    def monomial(cls, n: int, coeff: float = 1.0) -> Poly:
        c = np.zeros(n + 1)
        c[n] = coeff
        return cls(c)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: float = 1.0) -> Poly:
        p = cls.const(lead)
        for r in roots:
            p = p * cls((-r, 1.0))
        return p

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def degree(self) -> int:
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 0

    @property
    def lead(self) -> float:
        return self._c[-1] if self._c.size else 0.0

    def coeff(self, i: int) -> float:
        return self._c[i] if 0 <= i < self._c.size else 0.0

    # arithmetic
    def __add__(self, other: Poly | float) -> Poly:
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        out = np.zeros(n, dtype=np.result_type(self._c, other._c, float))
        out[: self._c.size] += self._c
        out[: other._c.size] += other._c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-self._c)

    def __sub__(self, other: Poly | float) -> Poly:
        return self + (-_as_poly(other))

    def __rsub__(self, other: Poly | float) -> Poly:
        return _as_poly(other) - self

    def __mul__(self, other: Poly | float) -> Poly:
        if isinstance(other, Poly):
            if self.is_zero() or other.is_zero():
                return Poly.zero()
            return Poly(np.convolve(self._c, other._c))
        return Poly(self._c * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> Poly:
        return Poly(self._c / scalar)

    def __pow__(self, n: int) -> Poly:
        out = Poly.const(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (Poly, int, float)):
            return NotImplemented
        other = _as_poly(other)
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self) -> int:
        return hash(tuple(self._c.tolist()))

    def allclose(self, other: Poly, atol: float = 1e-12) -> bool:
        n = max(self._c.size, other._c.size)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: self._c.size] = self._c
        b[: other._c.size] = other._c
        return bool(np.all(np.abs(a - b) <= atol))

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Horner evaluation; works elementwise on arrays."""
        if self.is_zero():
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        acc = self._c[-1] * np.ones_like(np.asarray(x, dtype=np.result_type(x, self._c, float)))
        for c in self._c[-2::-1]:
            acc = acc * x + c
        return acc if np.ndim(acc) else acc.item()

    def derivative(self, order: int = 1) -> Poly:
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        c = self._c
        for _ in range(order):
            if c.size <= 1:
                return Poly.zero()
            c = c[1:] * np.arange(1, c.size)
        return Poly(c)

    def antiderivative(self) -> Poly:
        if self.is_zero():
            return Poly.zero()
        return Poly(np.concatenate([[0.0], self._c / np.arange(1, self._c.size + 1)]))

    def integrate(self, a: float, b: float) -> float:
        P = self.antiderivative()
        return P(b) - P(a)

    def shift(self, r: float) -> Poly:
        """The polynomial ``k -> self(k + r)``."""
        if self.is_zero() or r == 0:
            return self
        out = np.zeros(self._c.size, dtype=self._c.dtype)
        # Taylor expansion about r
        d = self
        fact = 1.0
        for i in range(self._c.size):
            out[i] = d(r) / fact
            d = d.derivative()
            fact *= i + 1
        return Poly(out)

    def compose_linear(self, scale: float, offset: float) -> Poly:
        """The polynomial ``x -> self(scale*x + offset)``."""
        out = Poly.zero()
        lin = Poly((offset, scale))
        power = Poly.const(1.0)
        for c in self._c:
            out = out + power * c
            power = power * lin
        return out

    def monic(self) -> Poly:
        if self.is_zero():
            raise ValueError("zero polynomial has no monic normalization")
        return Poly(self._c / self._c[-1])

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        """Synthetic (long) division ``self = q*other + r``."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        num = self._c.astype(np.result_type(self._c, other._c, float)).copy()
        den = other._c
        dn = den.size - 1
        if num.size - 1 < dn:
            return Poly.zero(), self
        q = np.zeros(num.size - dn, dtype=num.dtype)
        for i in range(num.size - 1, dn - 1, -1):
            coef = num[i] / den[-1]
            q[i - dn] = coef
            num[i - dn : i + 1] -= coef * den
        return Poly(q), Poly(num[:dn])

    def roots(self) -> np.ndarray:
        return roots(self)

    def real_if_close(self, tol: float = 1e-12) -> Poly:
        if self._c.dtype.kind == "c" and np.all(np.abs(self._c.imag) <= tol * max(1.0, np.max(np.abs(self._c)))):
            return Poly(self._c.real)
        return self

    def format(self, var: str = "x", precision: int = 12) -> str:
        """Human readable form with descending powers, e.g. ``2*k^2 - k + 1``."""
        if self.is_zero():
            return "0"
        parts: list[str] = []
        for i in range(self._c.size - 1, -1, -1):
            c = self._c[i]
            if c == 0:
                continue
            c = float(np.real(c)) if np.isreal(c) else c
            sign = "-" if (isinstance(c, float) and c < 0) else "+"
            mag = abs(c) if isinstance(c, float) else c
            num = f"{mag:.{precision}g}" if isinstance(mag, float) else f"({mag})"
            if i == 0:
                term = num
            else:
                pw = var if i == 1 else f"{var}^{i}"
                term = pw if (isinstance(mag, float) and math.isclose(mag, 1.0, rel_tol=0, abs_tol=1e-15)) else f"{num}*{pw}"
            parts.append((sign, term))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, term in parts[1:]:
            s += f" {sign} {term}"
        return s

    def __repr__(self) -> str:
        return f"Poly({self._c.tolist()})"

    def __str__(self) -> str:
        return self.format()


def _as_poly(p) -> Poly:
    return p if isinstance(p, Poly) else Poly.const(p)


def add(p: Poly, q: Poly) -> Poly:
    return p + q


def mul(p: Poly, q: Poly) -> Poly:
    return p * q


def derivative(p: Poly, order: int = 1) -> Poly:
    return p.derivative(order)


def evaluate(p: Poly, x):
    return p.eval(x)


def companion(p: Poly) -> np.ndarray:
    """Companion matrix of the monic normalization of ``p``."""
    c = p.monic().coeffs
    n = c.size - 1
    C = np.zeros((n, n), dtype=c.dtype)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -c[:-1]
    return C


def roots(p: Poly) -> np.ndarray:
    """All complex roots of ``p`` with multiplicity.

    Degree one is solved directly; everything else goes through the
    eigenvalues of the companion matrix.
    """
    if p.is_zero():
        raise ValueError("no roots of zero polynomial")
    n = p.degree()
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-p.coeffs[0] / p.coeffs[1]], dtype=complex)
    return np.linalg.eigvals(companion(p)).astype(complex)


def poly_from_sequence(values: Sequence[float]) -> Poly:
    return Poly(np.asarray(values, dtype=float))
