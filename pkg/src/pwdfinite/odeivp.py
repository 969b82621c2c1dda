"""Initial value problems ``op u = 0`` by Dormand-Prince 5(4) with dense output.

The scalar equation of order ``N`` is rewritten as the first-order system for
``(u, u', ..., u^(N-1))``; the top derivative is
``u^(N) = -(sum_{j<N} p_j u^(j)) / p_N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffop import DiffOperator, Jet
from .polynomial import Poly

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension, y(t + s h) = y + h * K^T P [s, s^2, s^3, s^4]
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


class IvpError(RuntimeError):
    pass


@dataclass
class IvpSolution:
    """Solution of ``op u = 0`` with a dense interpolant on ``[t0, t1]``.

    ``values[i]`` is ``u(grid[i])`` and ``derivative_values[i, j]`` is
    ``u^(j)(grid[i])`` for ``j < N``.
    """

    grid: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray
    n_steps: int
    n_rejected: int
    _ts: np.ndarray = field(repr=False)
    _ys: np.ndarray = field(repr=False)
    _Q: np.ndarray = field(repr=False)

    def __call__(self, x, derivative: int = 0):
        """Dense-output evaluation of ``u^(derivative)`` at ``x``."""
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        ts = self._ts
        idx = np.clip(np.searchsorted(ts, flat, side="right") - 1, 0, ts.size - 2)
        h = ts[idx + 1] - ts[idx]
        s = (flat - ts[idx]) / h
        powers = np.stack([s, s**2, s**3, s**4], axis=-1)  # (M, 4)
        Q = self._Q[idx, derivative, :]  # (M, 4)
        out = self._ys[idx, derivative] + h * np.sum(Q * powers, axis=-1)
        return out.reshape(x.shape) if x.ndim else float(out[0])


def check_leading_coefficient(op: DiffOperator, a: float, b: float) -> None:
    """Reject ``op`` if its leading coefficient vanishes on ``[a, b]``."""
    pN = op.coeff(op.order)
    if pN.degree() >= 1:
        for r in pN.roots():
            if abs(r.imag) <= 1e-12 * max(1.0, abs(r)) and a <= r.real <= b:
                raise IvpError(f"leading coefficient vanishes at x={r.real:.6g} inside [{a}, {b}]")
    n = 256
    cheb = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * (np.arange(n) + 0.5) / n)
    vals = np.abs(pN(np.concatenate([cheb, [a, b]])))
    norm = float(np.max(np.abs(pN.coeffs)))
    if np.min(vals) < 1e-12 * norm:
        raise IvpError("leading coefficient is numerically zero inside the interval")


def _rhs(op: DiffOperator):
    N = op.order
    lower = [op.coeff(j) for j in range(N)]
    pN = op.coeff(N)

    def f(t: float, y: np.ndarray) -> np.ndarray:
        dy = np.empty_like(y)
        dy[:-1] = y[1:]
        dy[-1] = -sum(p(t) * y[j] for j, p in enumerate(lower) if not p.is_zero()) / pN(t)
        return dy

    return f


def integrate(f, t0: float, t1: float, y0, rtol: float = 1e-10, atol: float = 1e-12,
              first_step: float | None = None, max_steps: int = 1_000_000):
    """Adaptive Dormand-Prince integration of ``y' = f(t, y)`` from ``t0`` to ``t1``.

    Returns ``(ts, ys, Q, n_rejected)`` where ``Q[i]`` holds the dense-output
    coefficients of step ``i``.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    span = t1 - t0
    if span <= 0:
        raise ValueError("integrate requires t1 > t0")
    h = first_step if first_step is not None else span / 1000
    ts, ys, Qs = [t], [y.copy()], []
    K = np.empty((7, y.size))
    K[0] = f(t, y)
    rejected = 0
    min_h = 16 * np.finfo(float).eps * max(abs(t0), abs(t1), 1.0)
    for _ in range(max_steps):
        if t >= t1:
            break
        h = min(h, t1 - t)
        if h < min_h:
            raise IvpError(f"step size underflow at t={t:.6g}")
        for s in range(1, 7):
            K[s] = f(t + _C[s] * h, y + h * np.dot(_A[s], K[:s]))
        y_new = y + h * np.dot(_B, K)
        err = h * np.dot(_E, K)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        if err_norm <= 1.0:
            Qs.append(K.T @ _P)
            t = t + h
            y = y_new
            K[0] = K[6]  # FSAL
            ts.append(t)
            ys.append(y.copy())
            factor = 5.0 if err_norm == 0 else min(5.0, 0.9 * err_norm ** -0.2)
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err_norm ** -0.2)
        h = h * factor
    else:
        raise IvpError("maximum number of steps exceeded")
    return np.array(ts), np.array(ys), np.array(Qs), rejected


def solve_ivp(op: DiffOperator, interval: tuple[float, float], init: Jet | None = None,
              n_out: int = 101, rtol: float = 1e-10, atol: float = 1e-12) -> IvpSolution:
    """Solve ``op u = 0`` on ``interval`` from the jet ``init`` at its left end.

    Without ``init`` the jet ``u(a) = 1``, higher derivatives zero, is used.
    """
    a, b = map(float, interval)
    N = op.order
    if N < 1:
        raise ValueError("operator of order 0 has only the zero solution")
    if init is None:
        init = Jet(a, [1.0] + [0.0] * (N - 1))
    if len(init) != N:
        raise ValueError(f"initial jet must have {N} entries, got {len(init)}")
    if init.point != a:
        raise ValueError("initial jet must be given at the left end of the interval")
    check_leading_coefficient(op, a, b)
    ts, ys, Q, rejected = integrate(_rhs(op), a, b, init.values, rtol, atol, (b - a) / 1000)
    grid = np.linspace(a, b, n_out)
    sol = IvpSolution(grid=grid, values=np.empty(0), derivative_values=np.empty(0),
                      n_steps=len(ts) - 1, n_rejected=rejected, _ts=ts, _ys=ys, _Q=Q)
    dv = np.stack([sol(grid, j) for j in range(N)], axis=1)
    sol.values = dv[:, 0]
    sol.derivative_values = dv
    return sol


def rational_operator(p: Poly, q: Poly) -> DiffOperator:
    """First-order operator ``(-p q) d + (p' q - p q')`` killing ``p / q``."""
    return DiffOperator([p.derivative() * q - p * q.derivative(), -(p * q)])
