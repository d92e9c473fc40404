from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heintze.oracles import dense_scan_t0
from heintze.sampling import Sampler, random_spec
from heintze.space import (SpacePoint, d_L, dl_triangle_audit, first_contact_height,
                           first_crossing, height, level_metric, vertical_geodesic)
from heintze.spectral import build_basis

T0_E2 = 3.146193220620583
DL_AUDIT_SNAPSHOT = 1.0150165044813613  # root of t e^{-t} = e^{-2}


def test_level_metric_examples():
    b1 = build_basis([(1, [1])])
    assert level_metric(b1, 0.0, [3.0], [0.0]) == 3.0
    assert level_metric(b1, 4.0, [2.0], [2.0]) == 0.0
    b2 = build_basis([(1, [2])])
    assert level_metric(b2, 1.0, [0.0, 1.0], [0.0, 0.0]) == pytest.approx(math.exp(-1), rel=1e-15)


def test_first_contact_examples():
    b1 = build_basis([(2, [1])])
    assert first_contact_height(b1, [9.0], [0.0]) == pytest.approx(math.log(9) / 2, rel=1e-15)
    assert first_contact_height(b1, [1.0], [1.0]) == -math.inf
    b2 = build_basis([(1, [2])])
    assert first_contact_height(b2, [0.0, 1.0], [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


def test_first_contact_fixed_point_oracle():
    t = 3.0
    for _ in range(200):
        t = 2.0 + math.log(t)
    assert t == pytest.approx(T0_E2, abs=1e-14)
    b = build_basis([(1, [2])])
    assert first_contact_height(b, [0.0, math.e**2], [0.0, 0.0]) == pytest.approx(T0_E2, abs=1e-12)


def test_first_contact_against_dense_scan(rng):
    for _ in range(200):
        b = build_basis(random_spec(rng))
        d = rng.uniform(-10, 10, b.n)
        assert first_contact_height(b, d, 0 * d) == pytest.approx(dense_scan_t0(b, d), abs=1e-9)


def test_first_contact_non_monotone_case():
    # |(-t)e^{-t} * 0 + ...| has two crossings; the first one must be found
    b = build_basis([(1, [3])])
    d = np.array([0.0, 0.0, 1e-3])
    t0 = first_contact_height(b, d, 0 * d)
    assert t0 == pytest.approx(dense_scan_t0(b, d), abs=1e-10)
    assert level_metric(b, t0, d, 0 * d) == pytest.approx(1.0, rel=1e-10)
    for t in np.linspace(t0 - 20, t0 - 1e-6, 500):
        assert level_metric(b, t, d, 0 * d) > 1.0


def test_first_crossing_scan():
    f = lambda t: np.where(t < 1.25, 2.0, 0.5) + 0 * t  # noqa: E731
    assert first_crossing(f, 0.0, 4.0) == pytest.approx(1.25, abs=1e-12)


@given(st.floats(-100, 100), st.floats(-100, 100))
def test_vertical_geodesic(t, x):
    b = build_basis([(1, [1])])
    g = vertical_geodesic(b, [x], t)
    assert height(g) == t and g.p[0] == x


def test_d_L_examples():
    b = build_basis([(1, [1])])
    p = np.array([0.0])
    assert d_L(b, SpacePoint(0.0, p), SpacePoint(5.0, p)) == 5.0
    q = np.array([math.exp(10)])
    assert d_L(b, SpacePoint(0.0, p), SpacePoint(0.0, q)) == pytest.approx(21.0, rel=1e-12)
    r = d_L(b, SpacePoint(2.0, p), SpacePoint(0.0, np.array([1.0])))
    assert r == pytest.approx(2.0 + math.exp(-2), rel=1e-15)
    assert d_L(b, SpacePoint(1.0, p), SpacePoint(1.0, p)) == 0.0


def test_d_L_symmetry_and_branches(basis, rng):
    for _ in range(100):
        p, q = rng.uniform(-10, 10, (2, basis.n))
        t, s = rng.uniform(-5, 5, 2)
        x, y = SpacePoint(t, p), SpacePoint(s, q)
        assert d_L(basis, x, y) == d_L(basis, y, x)
        t0 = first_contact_height(basis, p, q)
        if t0 >= max(t, s):
            assert d_L(basis, x, y) == abs(t - t0) + abs(t0 - s) + 1.0
        at = d_L(basis, SpacePoint(t0, p), SpacePoint(t0, q))
        assert at == pytest.approx(1.0, abs=1e-12)


def test_level_metric_limits(basis, rng):
    for _ in range(20):
        p, q = rng.uniform(-10, 10, (2, basis.n))
        assert level_metric(basis, 100.0, p, q) < 1e-10
        assert level_metric(basis, -100.0, p, q) > 1e10


def test_dl_audit_snapshot():
    b = build_basis([(1, [2]), (2, [1])])
    a = dl_triangle_audit(b, Sampler(seed=3), trials=300)
    again = dl_triangle_audit(b, Sampler(seed=3), trials=300)
    assert a["maxC"] == again["maxC"] and a["trial"] == again["trial"]
    # d_L is only bilipschitz to a metric; the value is pinned, not bounded by 1
    assert a["maxC"] == pytest.approx(DL_AUDIT_SNAPSHOT, rel=1e-12)
