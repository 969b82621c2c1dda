"""Multiplicity-aware root recovery.

Jump points show up as roots of multiplicity ``N`` in every coefficient of the
jump-encoded operator. Companion-matrix roots of a multiple root scatter like
``eps**(1/m)``; fitting the factored form with the multiplicities held fixed
brings the accuracy back to ``O(eps)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .polynomial import Poly, roots


@dataclass
class RootCluster:
    center: complex
    multiplicity: int
    members: list[complex] = field(default_factory=list)

    @property
    def is_real(self) -> bool:
        return self.center.imag == 0

    def radius(self) -> float:
        if not self.members:
            return 0.0
        return float(max(abs(z - self.center) for z in self.members))


def default_tolerance(p: Poly, m_max: int) -> float:
    """``10 * eps**(1/m_max)`` scaled by the coefficient norm of the monic ``p``."""
    eps = np.finfo(float).eps
    norm = float(np.linalg.norm(p.monic().coeffs))
    return 10.0 * eps ** (1.0 / max(m_max, 1)) * max(norm, 1.0)


def cluster_roots(roots_: Sequence[complex], tol: float) -> list[RootCluster]:
    """Single-linkage clustering; a cluster's center is the mean of its members."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = np.asarray(roots_, dtype=complex)
    n = z.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(complex(z[i]))
    out = [RootCluster(complex(np.mean(g)), len(g), g) for g in groups.values()]
    out.sort(key=lambda c: (c.center.real, c.center.imag))
    return out


def project_real(clusters: Sequence[RootCluster], tol: float) -> list[RootCluster]:
    """Snap nearly-real centers onto the real axis."""
    out = []
    for c in clusters:
        center = complex(c.center.real, 0.0) if abs(c.center.imag) < tol else c.center
        out.append(RootCluster(center, c.multiplicity, list(c.members)))
    return out


def group_multiple_roots(roots_: Sequence[complex], multiplicity: int, count: int) -> tuple[list[RootCluster], list[complex]]:
    """Pick ``count`` groups of ``multiplicity`` roots with the smallest spread.

    Greedy: every root together with its ``multiplicity - 1`` nearest
    neighbours is a candidate group; the tightest candidate is taken and its
    members removed, ``count`` times. Returns the groups and the leftover
    roots (treated as simple).
    """
    rest = [complex(r) for r in roots_]
    if count * multiplicity > len(rest):
        raise ValueError(f"need {count}x{multiplicity} roots, polynomial has {len(rest)}")
    groups = []
    for _ in range(count):
        z = np.asarray(rest)
        best = None
        for i in range(z.size):
            d = np.abs(z - z[i])
            nb = np.argsort(d, kind="stable")[:multiplicity]
            members = z[nb]
            center = members.mean()
            spread = float(np.max(np.abs(members - center)))
            if best is None or spread < best[0]:
                best = (spread, nb, center)
        _, nb, center = best
        groups.append(RootCluster(complex(center), multiplicity, [complex(v) for v in z[nb]]))
        rest = [complex(v) for k, v in enumerate(z) if k not in set(nb.tolist())]
    groups.sort(key=lambda c: (c.center.real, c.center.imag))
    return groups, rest


@dataclass
class Refinement:
    clusters: list[RootCluster]
    residual: float
    converged: bool
    iterations: int
    history: list[float]


def _factored(centers: np.ndarray, mults: Sequence[int]) -> np.ndarray:
    """Coefficients (ascending) of ``prod (x - z_i)^m_i`` without the leading 1."""
    c = np.array([1.0 + 0j])
    for z, m in zip(centers, mults):
        for _ in range(m):
            c = np.convolve(c, [-z, 1.0])
    return c[:-1]


def _jacobian(centers: np.ndarray, mults: Sequence[int]) -> np.ndarray:
    n = sum(mults)
    J = np.zeros((n, len(centers)), dtype=complex)
    for i, (z, m) in enumerate(zip(centers, mults)):
        # d/dz (x - z)^m = -m (x - z)^(m-1)
        c = np.array([-float(m) + 0j])
        for l, (w, ml) in enumerate(zip(centers, mults)):
            for _ in range(ml - (1 if l == i else 0)):
                c = np.convolve(c, [-w, 1.0])
        J[:, i] = c[:n] if c.size >= n else np.pad(c, (0, n - c.size))
    return J


def refine_structured(p: Poly, clusters: Sequence[RootCluster], max_iter: int = 50,
                      step_tol: float = 1e-12) -> Refinement:
    """Gauss-Newton fit of ``prod (x - z_i)^m_i`` to the monic ``p``.

    Multiplicities stay fixed; only the centers move. A step is halved until
    the coefficient residual does not increase.
    """
    mults = [c.multiplicity for c in clusters]
    if sum(mults) != p.degree():
        raise ValueError(f"multiplicities sum to {sum(mults)}, degree is {p.degree()}")
    target = p.monic().coeffs[:-1].astype(complex)
    z = np.array([c.center for c in clusters], dtype=complex)

    def resid(zz):
        return _factored(zz, mults) - target

    r = resid(z)
    f = float(np.linalg.norm(r))
    history = [f]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        J = _jacobian(z, mults)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        t = 1.0
        accepted = False
        for _ in range(40):
            z_try = z + t * step
            r_try = resid(z_try)
            f_try = float(np.linalg.norm(r_try))
            if f_try <= f:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True  # no descent left at this precision
            break
        rel = float(np.linalg.norm(t * step) / max(np.linalg.norm(z), 1.0))
        z, r, f = z_try, r_try, f_try
        history.append(f)
        if rel < step_tol or f == 0.0:
            converged = True
            break
    out = [RootCluster(complex(zi), m, list(c.members)) for zi, m, c in zip(z, mults, clusters)]
    return Refinement(out, f, converged, it, history)


def multiple_roots(p: Poly, multiplicity: int, count: int, refine: bool = True) -> tuple[list[RootCluster], Refinement | None]:
    """Locate ``count`` roots of ``p`` of the given multiplicity.

    Remaining roots are carried along as simple roots during refinement.
    """
    if count == 0:
        return [], None
    groups, rest = group_multiple_roots(roots(p), multiplicity, count)
    if not refine:
        return groups, None
    simple = [RootCluster(z, 1, [z]) for z in rest]
    ref = refine_structured(p, groups + simple)
    return ref.clusters[: len(groups)], ref
