import numpy as np
import pytest
from hypothesis import given, strategies as st

from pwdfinite.polynomial import Poly, roots
from pwdfinite.rootfind import (
    RootCluster,
    cluster_roots,
    default_tolerance,
    group_multiple_roots,
    multiple_roots,
    project_real,
    refine_structured,
)


def test_cluster_roots_examples():
    (c,) = cluster_roots([0.5001, 0.4999], 0.01)
    assert c.multiplicity == 2 and c.center == pytest.approx(0.5)
    assert len(cluster_roots([0.1, 0.9], 0.01)) == 2
    p = Poly.from_roots([0.3, 0.3, 0.3])
    noisy = Poly(p.coeffs + 1e-6 * np.array([1.0, -1.0, 1.0, 0.0]))
    cl = cluster_roots(roots(noisy), 0.05)
    assert len(cl) == 1 and cl[0].multiplicity == 3 and abs(cl[0].center - 0.3) < 1e-2
    with pytest.raises(ValueError):
        cluster_roots([0.1], 0.0)


def test_cluster_members_within_radius():
    cl = cluster_roots([0.0, 0.004, 0.008, 0.5], 0.005)
    big = max(cl, key=lambda c: c.multiplicity)
    assert big.multiplicity == 3 == len(big.members)
    assert all(abs(z - big.center) <= big.radius() for z in big.members)


def test_default_tolerance_tracks_multiplicity():
    p = Poly.from_roots([0.5, 0.5])
    assert default_tolerance(p, 3) > default_tolerance(p, 2) > default_tolerance(p, 1)


def test_project_real():
    (c,) = project_real([RootCluster(0.4 + 1e-9j, 2)], 1e-6)
    assert c.center == 0.4 and c.is_real


def test_refine_examples():
    p = Poly.from_roots([0.5, 0.5, 0.9])
    ref = refine_structured(p, [RootCluster(0.48, 2), RootCluster(0.92, 1)])
    assert ref.converged
    assert abs(ref.clusters[0].center - 0.5) < 1e-10
    assert abs(ref.clusters[1].center - 0.9) < 1e-10
    q = Poly.from_roots([0.7] * 4)
    ref = refine_structured(q, [RootCluster(0.65, 4)])
    assert abs(ref.clusters[0].center - 0.7) < 1e-10


def test_refine_rejects_wrong_structure():
    with pytest.raises(ValueError, match="multiplicities"):
        refine_structured(Poly.from_roots([0.1, 0.2]), [RootCluster(0.1, 1)])


@given(st.lists(st.floats(-1e-6, 1e-6), min_size=4, max_size=4), st.floats(0.3, 0.6))
def test_refine_history_is_monotone(noise, start):
    p = Poly(Poly.from_roots([0.2, 0.2, 0.8]).coeffs + np.array(noise))
    ref = refine_structured(p, [RootCluster(start, 2), RootCluster(0.9, 1)])
    h = np.array(ref.history)
    assert np.all(np.diff(h) <= 0)


@given(st.lists(st.floats(-0.9, 0.9), min_size=1, max_size=3), st.lists(st.integers(1, 3), min_size=3, max_size=3))
def test_pipeline_recovers_separated_multiple_roots(raw, mults):
    z = np.sort(np.asarray(raw))
    if z.size > 1 and np.min(np.diff(z)) < 0.05:
        z = np.linspace(-0.9, 0.9, z.size)
    mults = mults[: z.size]
    p = Poly.from_roots(np.repeat(z, mults))
    tol = max(default_tolerance(p, max(mults)), 1e-3)
    cl = cluster_roots(roots(p), tol)
    assert sorted(c.multiplicity for c in cl) == sorted(mults)
    ref = refine_structured(p, cl)
    got = np.sort([c.center.real for c in ref.clusters])
    assert np.max(np.abs(got - z)) <= 1e-8


def test_group_multiple_roots():
    groups, rest = group_multiple_roots([0.5 + 1e-5, 0.5 - 1e-5, 0.9, 0.2 + 1e-4j, 0.2 - 1e-4j], 2, 2)
    assert [round(g.center.real, 3) for g in groups] == [0.2, 0.5]
    assert rest == [0.9]
    with pytest.raises(ValueError):
        group_multiple_roots([0.1, 0.2], 2, 2)


def test_multiple_roots_structured_beats_companion():
    rng = np.random.default_rng(0)
    p = Poly.from_roots([0.5, 0.5, 0.9])
    raw, structured = [], []
    for _ in range(20):
        noisy = Poly(p.coeffs + 1e-8 * rng.standard_normal(p.coeffs.size) * np.abs(p.coeffs))
        raw.append(max(abs(r - 0.5) for r in roots(noisy) if abs(r - 0.5) < 0.2))
        (c,), _ = multiple_roots(noisy, 2, 1)
        structured.append(abs(c.center - 0.5))
    assert max(structured) <= 1e-6
    assert np.median(raw) >= 1e-5
