"""Recurrence operators: polynomials in the shift ``E`` with coefficients in ``k``.

A :class:`ShiftOperator` ``sum_r c_r(k) E^r`` acts on a sequence by
``(S m)(k) = sum_r c_r(k) m_{k+r}``. Composition respects the commutation
rule ``E^r c(k) = c(k+r) E^r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .diffop import DiffOperator
from .polynomial import Poly


class ShiftOperator:
    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Poly | float] | None = None):
        raw: dict[int, Poly] = {}
        for r, c in (terms or {}).items():
            c = c if isinstance(c, Poly) else Poly.const(float(c))
            raw[int(r)] = raw.get(int(r), Poly.zero()) + c
        self._terms = _collect(raw)

    @classmethod
    def identity(cls) -> ShiftOperator:
        return cls({0: 1.0})

    @classmethod
    def E(cls, r: int = 1) -> ShiftOperator:
        return cls({r: 1.0})

    @classmethod
    def from_poly_in_E(cls, q: Poly) -> ShiftOperator:
        """``q(E)`` with constant coefficients."""
        return cls({i: float(np.real(c)) for i, c in enumerate(q.coeffs) if c != 0})

    @property
    def terms(self) -> dict[int, Poly]:
        return dict(self._terms)

    def offsets(self) -> list[int]:
        return sorted(self._terms)

    def coeff(self, r: int) -> Poly:
        return self._terms.get(r, Poly.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def min_offset(self) -> int:
        return min(self._terms)

    def max_offset(self) -> int:
        return max(self._terms)

    def length(self) -> int:
        """Number of consecutive sequence entries the operator touches."""
        return self.max_offset() - self.min_offset() + 1

    def __add__(self, other: ShiftOperator) -> ShiftOperator:
        t = dict(self._terms)
        for r, c in other._terms.items():
            t[r] = t.get(r, Poly.zero()) + c
        return ShiftOperator(t)

    def __neg__(self) -> ShiftOperator:
        return ShiftOperator({r: -c for r, c in self._terms.items()})

    def __sub__(self, other: ShiftOperator) -> ShiftOperator:
        return self + (-other)

    def scale(self, s: float) -> ShiftOperator:
        return ShiftOperator({r: c * s for r, c in self._terms.items()})

    def __matmul__(self, other: ShiftOperator) -> ShiftOperator:
        return compose(self, other)

    def allclose(self, other: ShiftOperator, atol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(self.coeff(r).allclose(other.coeff(r), atol) for r in keys)

    def max_coeff_diff(self, other: ShiftOperator) -> float:
        keys = set(self._terms) | set(other._terms)
        worst = 0.0
        for r in keys:
            d = self.coeff(r) - other.coeff(r)
            if not d.is_zero():
                worst = max(worst, float(np.max(np.abs(d.coeffs))))
        return worst

    def __call__(self, m, k: int) -> float:
        return apply(self, m, k)

    def __repr__(self) -> str:
        inner = ", ".join(f"{r}: {self._terms[r]!r}" for r in self.offsets())
        return f"ShiftOperator({{{inner}}})"

    def format(self, precision: int = 12) -> str:
        return format_recurrence(self, precision=precision)


def _collect(raw: dict[int, Poly]) -> dict[int, Poly]:
    # drop coefficient polynomials that are negligible relative to the whole operator
    scale = max((float(np.max(np.abs(c.coeffs))) for c in raw.values() if not c.is_zero()), default=0.0)
    out = {}
    for r in sorted(raw):
        c = raw[r]
        if c.is_zero():
            continue
        if np.max(np.abs(c.coeffs)) < 1e-13 * scale:
            continue
        out[r] = c
    return out


@dataclass(frozen=True)
class MomentSequence:
    """Power moments ``m_0..m_K`` of a function on ``interval``."""

    values: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("moment sequence needs at least m_0")
        if not np.all(np.isfinite(v)):
            raise ValueError("moments must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "interval", (float(self.interval[0]), float(self.interval[1])))

    @property
    def K(self) -> int:
        return self.values.size - 1

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]

    def scaled(self, c: float) -> MomentSequence:
        return MomentSequence(self.values * c, self.interval)

    def truncated(self, K: int) -> MomentSequence:
        return MomentSequence(self.values[: K + 1], self.interval)


class WindowError(IndexError):
    """Raised when a recurrence needs moments outside ``0..K``."""


def falling_factorial(x: float, j: int) -> float:
    out = 1.0
    for t in range(j):
        out *= x - t
    return out


def ff_poly(j: int, shift: int = 0) -> Poly:
    """``(k + shift)_(j)`` expanded as a polynomial in ``k``."""
    out = Poly.const(1.0)
    for t in range(j):
        out = out * Poly((shift - t, 1.0))
    return out


def p_ij(i: int, j: int) -> ShiftOperator:
    """``(-1)^j (i+k)_(j) E^(i-j)``: contribution of ``x^i d^j``."""
    return ShiftOperator({i - j: ff_poly(j, i) * (-1.0) ** j})


def dmop(op: DiffOperator) -> ShiftOperator:
    """Recurrence operator ``M`` with ``<f, op^*(x^k)> = (M m)(k)``."""
    out = ShiftOperator()
    for j, p in enumerate(op.coeffs):
        for i, a in enumerate(p.coeffs):
            if a != 0:
                out = out + p_ij(i, j).scale(float(a))
    return out


def boundary_annihilator(order: int, a: float, b: float) -> ShiftOperator:
    """``(E - a)^order (E - b)^order``."""
    q = Poly.from_roots([a] * order + [b] * order)
    return ShiftOperator.from_poly_in_E(q)


def points_annihilator(order: int, points: Sequence[float]) -> ShiftOperator:
    """``prod_n (E - xi_n)^order`` over all given points."""
    q = Poly.from_roots(np.repeat(np.asarray(points, dtype=float), order))
    return ShiftOperator.from_poly_in_E(q)


def compose(s1: ShiftOperator, s2: ShiftOperator) -> ShiftOperator:
    """``s1 * s2`` using ``E^r c(k) = c(k+r) E^r``."""
    raw: dict[int, Poly] = {}
    for r, c1 in s1.terms.items():
        for s, c2 in s2.terms.items():
            raw[r + s] = raw.get(r + s, Poly.zero()) + c1 * c2.shift(r)
    return ShiftOperator(raw)


def annihilator(op: DiffOperator, a: float, b: float) -> ShiftOperator:
    """Recurrence satisfied by the moments on ``[a, b]`` of anything ``op`` kills."""
    return compose(boundary_annihilator(op.order, a, b), dmop(op))


def piecewise_annihilator(op: DiffOperator, breakpoints: Sequence[float]) -> ShiftOperator:
    """Recurrence for a piecewise function whose pieces ``op`` all kill.

    ``breakpoints`` includes both endpoints. Each boundary and jump
    contributes a factor ``(E - xi)^N``.
    """
    return compose(points_annihilator(op.order, breakpoints), dmop(op))


def normalize_offsets(s: ShiftOperator) -> tuple[ShiftOperator, int]:
    """Left-multiply by ``E^t`` so that the smallest offset becomes 0."""
    if s.is_zero():
        raise ValueError("cannot normalize the zero operator")
    t = -s.min_offset()
    if t == 0:
        return s, 0
    return compose(ShiftOperator.E(t), s), t


def _values(m) -> np.ndarray:
    return m.values if isinstance(m, MomentSequence) else np.asarray(m, dtype=float)


def _eval_scale(c: Poly, k: int) -> float:
    """``sum_i |c_i| |k|^i``: the size of ``c(k)`` before cancellation."""
    return float(np.sum(np.abs(c.coeffs) * float(abs(k)) ** np.arange(c.coeffs.size)))


def apply(s: ShiftOperator, m, k: int) -> float:
    """``sum_r c_r(k) m_{k+r}``.

    A term whose index falls outside ``0..K`` is skipped when its coefficient
    vanishes at ``k`` up to rounding (falling factorials do this at the lower edge);
    otherwise :class:`WindowError` is raised.
    """
    v = _values(m)
    total = 0.0
    for r, c in s.terms.items():
        ck = c(k)
        idx = k + r
        if idx < 0 or idx >= v.size:
            if abs(ck) <= 1e-12 * _eval_scale(c, k):
                continue
            raise WindowError(f"recurrence at k={k} needs m_{idx}, available m_0..m_{v.size - 1}")
        total += ck * v[idx]
    return float(np.real(total))


def apply_range(s: ShiftOperator, m, ks: Sequence[int]) -> np.ndarray:
    return np.array([apply(s, m, k) for k in ks])


def window_scale(s: ShiftOperator, m, k: int) -> float:
    """``sum_r |c_r(k) m_{k+r}|``; the natural yardstick for a residual."""
    v = _values(m)
    total = 0.0
    for r, c in s.terms.items():
        idx = k + r
        if 0 <= idx < v.size:
            total += abs(c(k) * v[idx])
    return total


def valid_range(s: ShiftOperator, K: int) -> range:
    """Indices ``k >= 0`` for which ``apply`` stays inside ``m_0..m_K``."""
    lo = max(0, -s.min_offset())
    return range(lo, K - s.max_offset() + 1)


def shifted_moment(i: int, j: int, k: int, m: MomentSequence, order: int) -> float:
    """``((E-a)^N (E-b)^N * P_ij) m`` at ``k``, the entries of the system matrix."""
    a, b = m.interval
    return apply(compose(boundary_annihilator(order, a, b), p_ij(i, j)), m, k)


def shifted_moment_operator(i: int, j: int, order: int, a: float, b: float) -> ShiftOperator:
    return compose(boundary_annihilator(order, a, b), p_ij(i, j))


def hermite_pade_coefficients(op: DiffOperator, m: MomentSequence, count: int) -> np.ndarray:
    """Series coefficients ``q_m`` of ``-sum_j h_j(z) p*_j(z)`` for ``m < count``.

    ``h_j`` has coefficients ``eps~_{0,j,k}`` and ``p*_j(z) = z^d* p_j(1/z)``.
    When ``op`` annihilates the moments, ``q_m`` vanishes for ``m >= d*``.
    """
    a, b = m.interval
    N = op.order
    dstar = op.max_degree()
    q = np.zeros(count)
    for mm in range(count):
        acc = 0.0
        for j, p in enumerate(op.coeffs):
            S = shifted_moment_operator(0, j, N, a, b)
            for i, aij in enumerate(p.coeffs):
                kk = mm - dstar + i
                if kk < 0 or aij == 0:
                    continue
                acc += aij * apply(S, m, kk)
        q[mm] = -acc
    return q


def format_recurrence(s: ShiftOperator, precision: int = 12, normalize: bool = True) -> str:
    """Render as ``c_0(k)*m_k + c_1(k)*m_{k+1} + ... = 0``."""
    if normalize and not s.is_zero():
        s, _ = normalize_offsets(s)
    parts = []
    for r in s.offsets():
        idx = "k" if r == 0 else (f"k+{r}" if r > 0 else f"k-{-r}")
        sub = "m_k" if r == 0 else f"m_{{{idx}}}"
        parts.append(f"({s.coeff(r).format('k', precision)})*{sub}")
    return " + ".join(parts) + " = 0"


def binomial_shift(order: int) -> ShiftOperator:
    """Forward difference ``(E - 1)^order``."""
    return ShiftOperator({r: comb(order, r) * (-1.0) ** (order - r) for r in range(order + 1)})
