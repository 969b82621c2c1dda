"""Forward problem: ground-truth piecewise signals, sampling, noise and moments."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .diffop import DiffOperator, Jet
from .odeivp import rational_operator, solve_ivp
from .polynomial import Poly
from .shiftops import MomentSequence

# ---------------------------------------------------------------------------
# piece models


def _exp_moments(beta: complex, lo: float, hi: float, K: int, extra: int = 40) -> np.ndarray:
    """``int_lo^hi x^k e^(beta x) dx`` for ``k = 0..K``.

    Integration by parts, ``k I_{k-1} + beta I_k = [x^k e^(beta x)]_lo^hi``,
    run upward while ``k <= |beta|`` and downward above that (seeded
    ``extra`` indices past ``K`` with a Gauss-Legendre value). Each direction
    damps the propagated error.
    """
    if beta == 0:
        k = np.arange(K + 1)
        return ((hi ** (k + 1) - lo ** (k + 1)) / (k + 1)).astype(complex)
    top = K + extra
    eb_hi, eb_lo = np.exp(beta * hi), np.exp(beta * lo)
    I = np.zeros(top + 1, dtype=complex)
    k0 = min(int(abs(beta)), top)
    z = beta * (hi - lo)
    phi = 1 + z / 2 if abs(z) < 1e-8 else np.expm1(z) / z  # expm1(z)/z without cancellation
    I[0] = eb_lo * (hi - lo) * phi
    for k in range(1, k0 + 1):
        I[k] = (hi**k * eb_hi - lo**k * eb_lo - k * I[k - 1]) / beta
    if k0 < top:
        nodes, weights = np.polynomial.legendre.leggauss(max(64, top + 32))
        xm, xr = 0.5 * (hi + lo), 0.5 * (hi - lo)
        x = xm + xr * nodes
        I[top] = xr * np.sum(weights * x**top * np.exp(beta * x))
        for k in range(top, k0 + 1, -1):
            I[k - 1] = (hi**k * eb_hi - lo**k * eb_lo - beta * I[k]) / k
    return I[: K + 1]


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[float, ...]
    kind = "polynomial"

    @property
    def poly(self) -> Poly:
        return Poly(self.coeffs)

    def __call__(self, x):
        return self.poly(np.asarray(x, dtype=float))

    def operator(self) -> DiffOperator:
        return DiffOperator.d(max(self.poly.degree(), 0) + 1)

    def moments(self, lo: float, hi: float, K: int) -> np.ndarray:
        c = np.asarray(self.coeffs, dtype=float)
        out = np.zeros(K + 1)
        for k in range(K + 1):
            n = np.arange(c.size) + k + 1
            out[k] = np.sum(c * (hi**n - lo**n) / n)
        return out

    def params(self) -> dict:
        return {"coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Sinusoid:
    """``amplitude * sin(omega x + phase)``."""

    amplitude: float
    omega: float
    phase: float = 0.0
    kind = "sinusoid"

    def __call__(self, x):
        return self.amplitude * np.sin(self.omega * np.asarray(x, dtype=float) + self.phase)

    def operator(self) -> DiffOperator:
        return DiffOperator([self.omega**2, 0.0, 1.0])

    def moments(self, lo: float, hi: float, K: int) -> np.ndarray:
        if self.omega == 0:
            return Polynomial((self.amplitude * math.sin(self.phase),)).moments(lo, hi, K)
        I = _exp_moments(1j * self.omega, lo, hi, K)
        return self.amplitude * np.imag(np.exp(1j * self.phase) * I)

    def params(self) -> dict:
        return {"amplitude": self.amplitude, "omega": self.omega, "phase": self.phase}


@dataclass(frozen=True)
class Exponential:
    """``alpha * exp(beta x)``."""

    alpha: float
    beta: float
    kind = "exponential"

    def __call__(self, x):
        return self.alpha * np.exp(self.beta * np.asarray(x, dtype=float))

    def operator(self) -> DiffOperator:
        return DiffOperator([-self.beta, 1.0])

    def moments(self, lo: float, hi: float, K: int) -> np.ndarray:
        if self.beta == 0:
            return Polynomial((self.alpha,)).moments(lo, hi, K)
        return self.alpha * np.real(_exp_moments(self.beta, lo, hi, K))

    def params(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Rational:
    numerator: tuple[float, ...]
    denominator: tuple[float, ...]
    kind = "rational"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return Poly(self.numerator)(x) / Poly(self.denominator)(x)

    def operator(self) -> DiffOperator:
        return rational_operator(Poly(self.numerator), Poly(self.denominator))

    def moments(self, lo: float, hi: float, K: int) -> np.ndarray:
        raise NoClosedForm("rational pieces: no closed form; use quadrature")

    def check(self, lo: float, hi: float) -> None:
        q = Poly(self.denominator)
        if q.degree() >= 1:
            for r in q.roots():
                if abs(r.imag) < 1e-12 and lo <= r.real <= hi:
                    raise ValueError(f"denominator vanishes at {r.real:.6g} inside [{lo}, {hi}]")

    def params(self) -> dict:
        return {"numerator": list(self.numerator), "denominator": list(self.denominator)}


@dataclass(frozen=True, eq=False)
class OdeSolution:
    """Solution of ``op u = 0`` on its piece, fixed by the jet at the left end."""

    op: DiffOperator
    initial: tuple[float, ...]
    lo: float
    hi: float
    kind = "ode_solution"

    @cached_property
    def _sol(self):
        return solve_ivp(self.op, (self.lo, self.hi), Jet(self.lo, self.initial), n_out=2)

    def __call__(self, x):
        return self._sol(np.clip(np.asarray(x, dtype=float), self.lo, self.hi))

    def operator(self) -> DiffOperator:
        return self.op

    def moments(self, lo: float, hi: float, K: int) -> np.ndarray:
        raise NoClosedForm("ode_solution pieces have no closed-form moments; use quadrature")

    def params(self) -> dict:
        return {"operator": [p.coeffs.tolist() for p in self.op.coeffs], "initial": list(self.initial)}


PieceModel = Union[Polynomial, Sinusoid, Exponential, Rational, OdeSolution]


class NoClosedForm(ValueError):
    pass


# ---------------------------------------------------------------------------
# signals


@dataclass(frozen=True)
class PiecewiseSignal:
    """Pieces on ``[xi_n, xi_{n+1}]`` with ``breakpoints = (a, xi_1, ..., b)``."""

    breakpoints: tuple[float, ...]
    pieces: tuple[PieceModel, ...]

    def __post_init__(self):
        bp = tuple(float(v) for v in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if len(bp) < 2 or any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing with at least two entries")
        if len(self.pieces) != len(bp) - 1:
            raise ValueError(f"{len(bp) - 1} pieces expected, got {len(self.pieces)}")
        for piece, lo, hi in zip(self.pieces, bp, bp[1:]):
            if isinstance(piece, Rational):
                piece.check(lo, hi)

    @property
    def interval(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def jumps(self) -> tuple[float, ...]:
        return self.breakpoints[1:-1]

    @property
    def n_jumps(self) -> int:
        return len(self.breakpoints) - 2

    def piece_index(self, x) -> np.ndarray:
        # right-limit convention at a breakpoint
        return np.searchsorted(np.asarray(self.jumps), np.asarray(x, dtype=float), side="right")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = self.piece_index(x)
        out = np.zeros(x.shape)
        for n, piece in enumerate(self.pieces):
            sel = idx == n
            if np.any(sel):
                out[sel] = piece(x[sel])
        return out

    def common_operator(self) -> DiffOperator:
        """An operator annihilating every piece (pieces of one family only)."""
        ops = [p.operator() for p in self.pieces]
        kinds = {p.kind for p in self.pieces}
        if kinds == {"polynomial"}:
            return DiffOperator.d(max(op.order for op in ops))
        if all(op.allclose(ops[0], atol=1e-14) for op in ops):
            return ops[0]
        raise ValueError("pieces do not share an annihilating operator")

    def piece_moments(self, K: int) -> np.ndarray:
        """Array of shape ``(n_pieces, K+1)`` with ``m_{k,n}``."""
        bp = self.breakpoints
        return np.array([p.moments(lo, hi, K) for p, lo, hi in zip(self.pieces, bp, bp[1:])])

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "breakpoints": list(self.jumps),
            "pieces": [{"kind": p.kind, "params": p.params()} for p in self.pieces],
        }


def piece_from_dict(d: dict, lo: float, hi: float) -> PieceModel:
    kind, params = d["kind"], d.get("params", {})
    if kind == "polynomial":
        return Polynomial(tuple(float(c) for c in params["coeffs"]))
    if kind == "sinusoid":
        return Sinusoid(float(params["amplitude"]), float(params["omega"]), float(params.get("phase", 0.0)))
    if kind == "exponential":
        return Exponential(float(params["alpha"]), float(params["beta"]))
    if kind == "rational":
        return Rational(tuple(map(float, params["numerator"])), tuple(map(float, params["denominator"])))
    if kind == "ode_solution":
        op = DiffOperator([Poly(c) for c in params["operator"]])
        return OdeSolution(op, tuple(map(float, params["initial"])), lo, hi)
    raise ValueError(f"unknown piece kind {kind!r}")


def signal_from_dict(d: dict) -> PiecewiseSignal:
    a, b = map(float, d["interval"])
    inner = [float(v) for v in d.get("breakpoints", [])]
    if inner and inner[0] == a and inner[-1] == b:
        inner = inner[1:-1]
    bp = [a, *inner, b]
    pieces = [piece_from_dict(p, lo, hi) for p, lo, hi in zip(d["pieces"], bp, bp[1:])]
    return PiecewiseSignal(tuple(bp), tuple(pieces))


def load_signal(path: str | Path) -> tuple[PiecewiseSignal, dict]:
    """Read a signal JSON document; returns the signal and the raw document."""
    doc = json.loads(Path(path).read_text())
    return signal_from_dict(doc), doc


def piecewise_constant(jumps: Sequence[float], values: Sequence[float], interval=(0.0, 1.0)) -> PiecewiseSignal:
    bp = (interval[0], *jumps, interval[1])
    return PiecewiseSignal(bp, tuple(Polynomial((float(v),)) for v in values))


def piecewise_polynomial(jumps: Sequence[float], coeffs: Sequence[Sequence[float]], interval=(0.0, 1.0)) -> PiecewiseSignal:
    bp = (interval[0], *jumps, interval[1])
    return PiecewiseSignal(bp, tuple(Polynomial(tuple(map(float, c))) for c in coeffs))


def piecewise_sinusoid(jumps: Sequence[float], amplitudes: Sequence[float], omega: float,
                       phases: Sequence[float], interval=(0.0, 1.0)) -> PiecewiseSignal:
    bp = (interval[0], *jumps, interval[1])
    return PiecewiseSignal(bp, tuple(Sinusoid(float(A), float(omega), float(ph)) for A, ph in zip(amplitudes, phases)))


def rational_signal(numerator: Sequence[float], denominator: Sequence[float], interval=(0.0, 1.0)) -> PiecewiseSignal:
    return PiecewiseSignal(tuple(interval), (Rational(tuple(map(float, numerator)), tuple(map(float, denominator))),))


# ---------------------------------------------------------------------------
# sampling, noise, moments


@dataclass(frozen=True)
class SampledSignal:
    grid: np.ndarray
    values: np.ndarray
    snr_db: float | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if np.asarray(self.grid).size < 2:
            raise ValueError("grid needs at least two points")
        if np.asarray(self.grid).shape != np.asarray(self.values).shape:
            raise ValueError("grid and values differ in shape")

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])


def uniform_grid(a: float, b: float, n: int) -> np.ndarray:
    return np.linspace(a, b, n)


def sample(sig: PiecewiseSignal, n_grid: int) -> SampledSignal:
    if n_grid < 2:
        raise ValueError("n_grid must be at least 2")
    x = uniform_grid(*sig.interval, n_grid)
    return SampledSignal(x, sig(x))


def add_noise(s: SampledSignal, snr_db: float, seed: int) -> SampledSignal:
    """Add white Gaussian noise with ``10 log10(mean(f^2) / sigma^2) = snr_db``.

    The generator is numpy's PCG64 with its ziggurat normal sampler, seeded
    with ``seed``.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return SampledSignal(s.grid, s.values, snr_db, seed)
    power = float(np.mean(s.values**2))
    if power == 0.0:
        raise ValueError("SNR is undefined for an identically zero signal")
    sigma = math.sqrt(power / 10 ** (snr_db / 10))
    rng = np.random.default_rng(seed)
    noisy = s.values + sigma * rng.standard_normal(s.values.shape)
    return SampledSignal(s.grid, noisy, snr_db, seed)


def empirical_snr_db(clean: SampledSignal, noisy: SampledSignal) -> float:
    noise = noisy.values - clean.values
    return 10 * math.log10(np.mean(clean.values**2) / np.mean(noise**2))


def moments_quadrature(s: SampledSignal, K: int) -> MomentSequence:
    """Trapezoid-rule moments ``m_k`` for ``k = 0..K``."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    x, f = s.grid, s.values
    m = np.empty(K + 1)
    xk = np.ones_like(x)
    for k in range(K + 1):
        m[k] = np.trapezoid(xk * f, x)
        xk = xk * x
    return MomentSequence(m, s.interval)


def moments_exact(sig: PiecewiseSignal, K: int) -> MomentSequence:
    """Closed-form moments (polynomial, sinusoid and exponential pieces only)."""
    return MomentSequence(sig.piece_moments(K).sum(axis=0), sig.interval)


def moments_gauss(sig: PiecewiseSignal, K: int, nodes: int = 200) -> MomentSequence:
    """Per-piece Gauss-Legendre moments, for pieces without closed forms."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    m = np.zeros(K + 1)
    bp = sig.breakpoints
    for piece, lo, hi in zip(sig.pieces, bp, bp[1:]):
        x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xg
        w = 0.5 * (hi - lo) * wg * piece(x)
        xk = np.ones_like(x)
        for k in range(K + 1):
            m[k] += np.sum(w * xk)
            xk = xk * x
    return MomentSequence(m, sig.interval)


def mse(f: SampledSignal, g: SampledSignal) -> float:
    if f.grid.shape != g.grid.shape or not np.allclose(f.grid, g.grid, rtol=0, atol=1e-12):
        raise ValueError("signals are sampled on different grids")
    return float(np.mean((f.values - g.values) ** 2))


# ---------------------------------------------------------------------------
# CSV helpers


def _fmt(v: float) -> str:
    return repr(float(v))


def write_moments_csv(path: str | Path, m: MomentSequence) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "m_k"])
        for k, v in enumerate(m.values):
            w.writerow([k, _fmt(v)])


def read_moments_csv(path: str | Path, interval: tuple[float, float]) -> MomentSequence:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"k", "m_k"}:
        raise ValueError(f"{path}: expected header 'k,m_k'")
    rows.sort(key=lambda r: int(r["k"]))
    ks = [int(r["k"]) for r in rows]
    if ks != list(range(len(ks))):
        raise ValueError(f"{path}: moment indices must run 0..K without gaps")
    return MomentSequence(np.array([float(r["m_k"]) for r in rows]), interval)


def write_samples_csv(path: str | Path, s: SampledSignal) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "f"])
        for x, f in zip(s.grid, s.values):
            w.writerow([_fmt(x), _fmt(f)])


def read_samples_csv(path: str | Path) -> SampledSignal:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return SampledSignal(data[:, 0], data[:, 1])
