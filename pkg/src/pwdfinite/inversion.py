"""Reconstruction of a piecewise D-finite signal from its moments.

Pipeline: assemble the Hankel-striped matrix ``H`` from shifted moments,
solve ``H a = 0`` with the top unknown pinned to 1, decode the jump points as
common multiple roots of the operator coefficients, pick a basis of the
remaining operator's solutions and fit the per-piece coefficients ``C alpha = m``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .diffop import DiffOperator
from .odeivp import IvpError, solve_ivp
from .polynomial import Poly
from .rootfind import multiple_roots
from .shiftops import MomentSequence, apply, shifted_moment_operator

MODEL_KINDS = ("piecewise_polynomial", "sinusoid", "rational", "exponential")


class InsufficientMoments(ValueError):
    def __init__(self, needed: int, available: int, what: str = ""):
        self.needed = needed
        self.available = available
        msg = f"need moments m_0..m_{needed} (K >= {needed}), got K = {available}"
        super().__init__(f"{what}: {msg}" if what else msg)


class ReconstructionFailure(RuntimeError):
    """A stage of the pipeline could not produce a valid result."""

    def __init__(self, stage: str, reason: str):
        self.stage = stage
        self.reason = reason
        super().__init__(f"[{stage}] {reason}")


@dataclass(frozen=True)
class StripeSpec:
    """Unknown layout: for each derivative order ``j`` a coefficient of degree ``d_j``."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ent = tuple((int(j), int(d)) for j, d in self.entries)
        js = [j for j, _ in ent]
        if js != sorted(set(js)):
            raise ValueError("derivative orders must be distinct and ascending")
        if any(d < 0 for _, d in ent):
            raise ValueError("coefficient degrees must be nonnegative")
        object.__setattr__(self, "entries", ent)

    @property
    def n_unknowns(self) -> int:
        return sum(d + 1 for _, d in self.entries)

    def columns(self) -> list[tuple[int, int]]:
        """``(i, j)`` per column, stripe by stripe."""
        return [(i, j) for j, d in self.entries for i in range(d + 1)]

    def col(self, i: int, j: int) -> int:
        return self.columns().index((i, j))

    @property
    def order(self) -> int:
        return max(j for j, _ in self.entries)

    def to_operator(self, a: np.ndarray) -> DiffOperator:
        coeffs = [Poly.zero()] * (self.order + 1)
        start = 0
        for j, d in self.entries:
            coeffs[j] = Poly(np.asarray(a[start : start + d + 1], dtype=float))
            start += d + 1
        return DiffOperator(coeffs)

    def from_operator(self, op: DiffOperator) -> np.ndarray:
        return np.array([op.coeff(j).coeff(i) for i, j in self.columns()], dtype=float)


def required_K(spec: StripeSpec, order: int, rows: int) -> int:
    """Largest moment index touched by ``build_H``."""
    return max(0, max(rows - 1 + 2 * order + d - j for j, d in spec.entries))


def build_H(m: MomentSequence, spec: StripeSpec, order: int, rows: int) -> np.ndarray:
    """``H[k, col(i, j)] = eps~_{i,j,k}`` for ``k = 0..rows-1``."""
    need = required_K(spec, order, rows)
    if m.K < need:
        raise InsufficientMoments(need, m.K, "system matrix H")
    a, b = m.interval
    cols = spec.columns()
    H = np.zeros((rows, len(cols)))
    for c, (i, j) in enumerate(cols):
        S = shifted_moment_operator(i, j, order, a, b)
        for k in range(rows):
            H[k, c] = apply(S, m, k)
    return H


@dataclass
class NullspaceSolution:
    vector: np.ndarray
    condition: float


def solve_nullspace(H: np.ndarray) -> NullspaceSolution:
    """Pin the last unknown to 1 and solve the reduced system.

    A square reduced system goes through LU with partial pivoting; extra rows
    are handled by least squares.
    """
    rows, n = H.shape
    if rows < n - 1:
        raise ReconstructionFailure("operator", f"H has {rows} rows, at least {n - 1} needed")
    A, rhs = H[:, :-1], -H[:, -1]
    if n == 1:
        return NullspaceSolution(np.ones(1), 1.0)
    scale = float(np.max(np.abs(H))) if H.size else 0.0
    if scale == 0.0:
        raise ReconstructionFailure("operator", "singular reduced system (H is zero)")
    if rows == n - 1:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)  # singularity is checked below
            lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
        d = np.abs(np.diag(lu))
        if np.min(d) <= np.finfo(float).eps * max(n, 1) * np.max(d) or np.max(d) == 0:
            raise ReconstructionFailure("operator", "singular reduced system")
        x = scipy.linalg.lu_solve((lu, piv), rhs)
        cond = float(np.linalg.cond(A))
    else:
        x, _, rank, sv = scipy.linalg.lstsq(A, rhs)
        if rank < n - 1:
            raise ReconstructionFailure("operator", "singular reduced system")
        cond = float(sv[0] / sv[-1])
    return NullspaceSolution(np.append(x, 1.0), cond)


def solve_with_known(H: np.ndarray, known: dict[int, float]) -> np.ndarray:
    """Least-squares solve of ``H a = 0`` with some entries of ``a`` fixed."""
    n = H.shape[1]
    free = [c for c in range(n) if c not in known]
    rhs = -sum(H[:, c] * v for c, v in known.items())
    x = np.linalg.lstsq(H[:, free], rhs, rcond=None)[0]
    a = np.zeros(n)
    for c, v in known.items():
        a[c] = v
    a[free] = x
    return a


def nullspace_residual(H: np.ndarray, a: np.ndarray) -> float:
    """``|H a| / (|H| |a|)``."""
    return float(np.linalg.norm(H @ a) / (np.linalg.norm(H, 2) * np.linalg.norm(a)))


@dataclass
class DecodedJumps:
    jumps: list[float]
    inner: DiffOperator
    root_residual: float


def _match_means(reference: list[float], others: list[list[float]]) -> list[float]:
    """Greedy nearest pairing of each estimate list against ``reference``; mean per jump."""
    sums = [[r] for r in reference]
    for est in others:
        pairs = sorted((abs(r - e), i, l) for i, r in enumerate(reference) for l, e in enumerate(est))
        used_i, used_l = set(), set()
        for _, i, l in pairs:
            if i in used_i or l in used_l:
                continue
            used_i.add(i)
            used_l.add(l)
            sums[i].append(est[l])
    return [float(np.mean(s)) for s in sums]


def decode_jumps(op_hat: DiffOperator, n_jumps: int, inner_order: int,
                 interval: tuple[float, float], imag_tol: float | None = None) -> DecodedJumps:
    """Split ``op_hat = prod (x - xi)^N * op_inner`` and return the ``xi``.

    Each coefficient of high enough degree yields ``n_jumps`` estimates of
    multiplicity ``inner_order``; the estimates are paired up across
    coefficients and averaged.
    """
    if n_jumps == 0:
        return DecodedJumps([], op_hat, 0.0)
    a, b = interval
    if imag_tol is None:
        imag_tol = 1e-2 * (b - a)
    need = n_jumps * inner_order
    estimates: list[list[float]] = []
    for j in range(op_hat.order, -1, -1):
        p = op_hat.coeff(j)
        if p.is_zero() or p.degree() < need:
            continue
        clusters, _ = multiple_roots(p, inner_order, n_jumps)
        for c in clusters:
            if abs(c.center.imag) > imag_tol:
                raise ReconstructionFailure("jumps", "complex jump estimate")
        estimates.append(sorted(c.center.real for c in clusters))
    if not estimates:
        raise ReconstructionFailure("jumps", "no coefficient has enough roots for the jumps")
    jumps = sorted(_match_means(estimates[0], estimates[1:]))
    if any(not (a < x < b) for x in jumps):
        raise ReconstructionFailure("jumps", "jump outside interval")
    q = Poly.from_roots(np.repeat(jumps, inner_order))
    inner = []
    worst = 0.0
    for p in op_hat.coeffs:
        if p.is_zero():
            inner.append(p)
            continue
        quo, rem = p.divmod(q)
        worst = max(worst, float(np.linalg.norm(rem.coeffs) / np.linalg.norm(p.coeffs)))
        inner.append(quo)
    try:
        op_inner = DiffOperator(inner)
    except ValueError:
        raise ReconstructionFailure("jumps", "deflated operator vanishes") from None
    return DecodedJumps(jumps, op_inner, worst)


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class Model:
    """Known structure of the unknown signal.

    ``degree`` is the polynomial degree of each piece for
    ``piecewise_polynomial``; ``num_degree``/``den_degree`` are ``deg p`` and
    ``deg q`` for ``rational``.
    """

    kind: str
    n_jumps: int = 0
    degree: int = 0
    num_degree: int = 0
    den_degree: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.n_jumps < 0 or self.degree < 0:
            raise ValueError("n_jumps and degree must be nonnegative")
        if self.kind == "rational":
            if self.n_jumps:
                raise ValueError("rational model has a single piece")
            if self.num_degree + self.den_degree < 1:
                raise ValueError("rational model needs deg p + deg q >= 1")

    @property
    def order(self) -> int:
        return {"piecewise_polynomial": self.degree + 1, "sinusoid": 2, "rational": 1, "exponential": 1}[self.kind]

    @property
    def n_pieces(self) -> int:
        return self.n_jumps + 1

    def stripes(self) -> StripeSpec:
        p, N = self.n_jumps, self.order
        if self.kind == "piecewise_polynomial":
            return StripeSpec(((N, N * p),))
        if self.kind == "sinusoid":
            return StripeSpec(((0, 2 * p), (2, 2 * p)))
        if self.kind == "rational":
            d1 = self.num_degree + self.den_degree
            return StripeSpec(((0, d1 - 1), (1, d1)))
        return StripeSpec(((0, p), (1, p)))

    def default_rows(self) -> int:
        """Row count of ``H`` (the square convention per model)."""
        n = self.stripes().n_unknowns
        if self.kind in ("sinusoid", "rational"):
            return n
        return n - 1

    def default_c_rows(self) -> int:
        return self.n_pieces * self.order

    def required_K(self, rows: int | None = None, c_rows: int | None = None) -> int:
        rows = self.default_rows() if rows is None else rows
        c_rows = self.default_c_rows() if c_rows is None else c_rows
        return max(required_K(self.stripes(), self.order, rows), c_rows - 1)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n_jumps": self.n_jumps}
        if self.kind == "piecewise_polynomial":
            d["degree"] = self.degree
        if self.kind == "rational":
            d["num_degree"] = self.num_degree
            d["den_degree"] = self.den_degree
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Model:
        return cls(**{k: d[k] for k in ("kind", "n_jumps", "degree", "num_degree", "den_degree") if k in d})


Basis = list[Callable[[np.ndarray], np.ndarray]]


def basis_for_nullspace(op_inner: DiffOperator, kind: str, interval: tuple[float, float],
                        omega: float | None = None, rtol: float = 1e-10, atol: float = 1e-12) -> Basis:
    """Solution basis of the per-piece operator, chosen per model."""
    a, b = interval
    if kind == "piecewise_polynomial":
        return [(lambda x, i=i: np.asarray(x, dtype=float) ** i) for i in range(op_inner.order)]
    if kind == "sinusoid":
        if omega is None:
            raise ValueError("sinusoid basis needs omega")
        return [lambda x: np.sin(omega * np.asarray(x, dtype=float)),
                lambda x: np.cos(omega * np.asarray(x, dtype=float))]
    if kind == "exponential":
        beta = -op_inner.coeff(0).lead / op_inner.coeff(1).lead
        return [lambda x: np.exp(beta * np.asarray(x, dtype=float))]
    if kind == "rational":
        try:
            return [solve_ivp(op_inner, (a, b), None, n_out=2, rtol=rtol, atol=atol)]
        except IvpError as e:
            raise ReconstructionFailure("basis", str(e)) from None
    raise ValueError(f"unknown model kind {kind!r}")


@dataclass
class ParticularSolution:
    alphas: np.ndarray  # (n_pieces, n_basis)
    condition: float
    residual: float
    C: np.ndarray


def moment_matrix(basis: Basis, breakpoints: Sequence[float], rows: int, nodes: int | None = None) -> np.ndarray:
    """``C[k, n*N + i] = int_{xi_n}^{xi_{n+1}} x^k u_i(x) dx`` by Gauss-Legendre."""
    nodes = nodes or max(64, rows + 32)
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    N = len(basis)
    C = np.zeros((rows, N * (len(breakpoints) - 1)))
    for n, (lo, hi) in enumerate(zip(breakpoints, breakpoints[1:])):
        x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xg
        w = 0.5 * (hi - lo) * wg
        powers = x[None, :] ** np.arange(rows)[:, None]
        for i, u in enumerate(basis):
            C[:, n * N + i] = powers @ (w * np.asarray(u(x)))
    return C


def build_C_and_solve(basis: Basis, breakpoints: Sequence[float], m: MomentSequence, rows: int) -> ParticularSolution:
    """Least squares ``C alpha = m`` via QR with column pivoting."""
    if m.K < rows - 1:
        raise InsufficientMoments(rows - 1, m.K, "particular solution")
    C = moment_matrix(basis, breakpoints, rows)
    n = C.shape[1]
    if rows < n:
        raise ReconstructionFailure("coefficients", f"C has {rows} rows for {n} unknowns")
    rhs = m.values[:rows]
    Q, R, perm = scipy.linalg.qr(C, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    if d[0] == 0 or d[-1] <= np.finfo(float).eps * max(C.shape) * d[0]:
        raise ReconstructionFailure("coefficients", "rank-deficient moment matrix C")
    y = scipy.linalg.solve_triangular(R, Q.T @ rhs)
    alpha = np.empty(n)
    alpha[perm] = y
    res = float(np.linalg.norm(C @ alpha - rhs))
    return ParticularSolution(alpha.reshape(len(breakpoints) - 1, len(basis)), float(d[0] / d[-1]), res, C)


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class ReconstructionResult:
    model: Model
    interval: tuple[float, float]
    operator: DiffOperator | None = None
    inner_operator: DiffOperator | None = None
    jumps: list[float] = field(default_factory=list)
    omega: float | None = None
    alphas: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)
    basis: Basis | None = field(default=None, repr=False)

    @property
    def success(self) -> bool:
        return bool(self.diagnostics.get("success", False))

    @property
    def breakpoints(self) -> list[float]:
        return [self.interval[0], *self.jumps, self.interval[1]]

    def __call__(self, x):
        """Evaluate the reconstructed signal (right-limit at jumps)."""
        if not self.success:
            raise RuntimeError("reconstruction was not successful")
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(np.asarray(self.jumps), x, side="right")
        out = np.zeros(x.shape)
        for n in range(len(self.jumps) + 1):
            sel = idx == n
            if np.any(sel):
                out[sel] = sum(self.alphas[n, i] * np.asarray(u(x[sel])) for i, u in enumerate(self.basis))
        return out

    def to_dict(self) -> dict:
        def op_dict(op):
            return None if op is None else [p.coeffs.tolist() for p in op.coeffs]

        diag = {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in self.diagnostics.items()}
        return {
            "model": self.model.to_dict(),
            "interval": list(self.interval),
            "success": self.success,
            "failure_reason": self.diagnostics.get("failure_reason"),
            "operator": op_dict(self.operator),
            "inner_operator": op_dict(self.inner_operator),
            "jumps": list(self.jumps),
            "omega": self.omega,
            "alphas": None if self.alphas is None else self.alphas.tolist(),
            "diagnostics": diag,
        }


def reconstruct(model: Model, m: MomentSequence, rows: int | None = None, c_rows: int | None = None,
                imag_tol: float | None = None, rtol: float = 1e-10, atol: float = 1e-12) -> ReconstructionResult:
    """Run the whole pipeline; stage failures come back flagged, not raised.

    Too few moments is an input error and raises :class:`InsufficientMoments`.
    """
    rows = model.default_rows() if rows is None else rows
    c_rows = model.default_c_rows() if c_rows is None else c_rows
    need = model.required_K(rows, c_rows)
    if m.K < need:
        raise InsufficientMoments(need, m.K, f"{model.kind} model")
    result = ReconstructionResult(model, m.interval)
    diag = result.diagnostics
    diag.update(H_condition=math.nan, root_residual=math.nan, C_condition=math.nan,
                fit_residual=math.nan, success=False, failure_reason=None, failure_stage=None)
    spec = model.stripes()
    try:
        H = build_H(m, spec, model.order, rows)
        sol = solve_nullspace(H)
        diag["H_condition"] = sol.condition
        diag["H_residual"] = nullspace_residual(H, sol.vector)
        op_hat = spec.to_operator(sol.vector)
        result.operator = op_hat
        if model.kind == "sinusoid":
            c0, c2 = op_hat.coeff(0), op_hat.coeff(2)
            w2 = c0.lead / c2.lead if not c0.is_zero() else 0.0
            if not w2 > 0:
                raise ReconstructionFailure("operator", "nonpositive squared frequency")
            result.omega = math.sqrt(w2)
        dec = decode_jumps(op_hat, model.n_jumps, model.order, m.interval, imag_tol)
        result.jumps = dec.jumps
        result.inner_operator = dec.inner
        diag["root_residual"] = dec.root_residual
        basis = basis_for_nullspace(dec.inner, model.kind, m.interval, result.omega, rtol, atol)
        part = build_C_and_solve(basis, result.breakpoints, m, c_rows)
        result.basis = basis
        result.alphas = part.alphas
        diag["C_condition"] = part.condition
        diag["fit_residual"] = part.residual
        diag["success"] = True
    except ReconstructionFailure as e:
        diag["failure_reason"] = e.reason
        diag["failure_stage"] = e.stage
    return result
