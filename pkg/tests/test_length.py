from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heintze.errors import DomainError
from heintze.length import (ChainBound, chain_lower_bound, chain_upper_bound,
                            classify_triangle, eta)
from heintze.spectral import build_basis, standard_dilation
from heintze.suite import expected_kind, trichotomy_cases


def test_eta_examples():
    assert eta(1, 0, 0.25) == 0.25
    assert eta(2, 1, math.exp(-1)) == pytest.approx(math.exp(-2), rel=1e-15)
    assert eta(1, 2, math.exp(-2)) == pytest.approx(math.exp(-2) / 2, rel=1e-15)
    for w in (0.0, 1.0, 1.5, -0.1):
        with pytest.raises(DomainError):
            eta(1, 1, w)


@pytest.mark.parametrize("alpha,j", [(0.5, 0), (1.0, 1), (2.0, 2), (1.5, 3)])
def test_eta_monotone(alpha, j):
    top = math.exp(-j / alpha) if j else 1.0
    w = np.linspace(1e-6, top, 2000, endpoint=False)[1:]
    vals = [eta(alpha, j, x) for x in w]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def _single(b, lev, amount=3.0):
    p = np.zeros(b.n)
    q = p.copy()
    q[b.level_slice(lev).start] = amount
    return p, q


def test_upper_bound_examples():
    b = build_basis([(1, [3]), (2, [1])])
    p, q = _single(b, (1, 2))
    assert chain_upper_bound(b, p, p, (1, 2), 1000) == 0.0
    # the rounding up of the step count fades as k grows
    far = chain_upper_bound(b, p, q, (1, 2), log_k=1e9)
    assert far == pytest.approx(3.0, rel=1e-6)
    vals = [chain_upper_bound(b, p, q, (2, 1), log_k=L) for L in (10, 100, 1000)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-30
    with pytest.raises(DomainError):
        chain_upper_bound(b, p, q, (1, 1), 2)


def test_lower_bound_examples():
    b = build_basis([(1, [3]), (2, [1])])
    p, q = _single(b, (1, 2))
    assert chain_lower_bound(b, p, q, (1, 2), log_k=1e9) == pytest.approx(3.0, rel=1e-6)
    p, q = _single(b, (1, 3))
    lows = [chain_lower_bound(b, p, q, (1, 2), log_k=L) for L in (1e2, 1e4, 1e6)]
    assert lows[0] < lows[1] < lows[2] and lows[2] > 1e5
    p, q = _single(b, (2, 1))
    assert chain_lower_bound(b, p, q, (1, 3), log_k=50) > 1e15


@given(st.sampled_from([[(1.0, [3]), (2.0, [1])], [(0.5, [2]), (0.9, [1, 2])]]),
       st.data(), st.floats(1e-3, 10), st.floats(1.2, 40))
def test_bracketing_single_coordinate(blocks, data, amount, log_k):
    b = build_basis(blocks)
    D = data.draw(st.sampled_from(b.ascending))
    Q = data.draw(st.sampled_from(b.ascending))
    p, q = _single(b, D, amount)
    lo = chain_lower_bound(b, p, q, Q, log_k=log_k)
    up = chain_upper_bound(b, p, q, Q, log_k=log_k)
    assert lo <= up * (1 + 1e-12) + 1e-9


def test_classify_examples():
    b = build_basis([(1, [2]), (2, [1])])
    p, q = _single(b, (1, 2))
    c = classify_triangle(b, p, q, (1, 2))
    assert c.kind == "finite" and c.value == pytest.approx(3.0, rel=0.05)
    assert classify_triangle(b, p, q, (1, 1)).kind == "infinite"
    assert classify_triangle(b, p, q, (2, 1)).kind == "zero"
    z = classify_triangle(b, p, p, (1, 1))
    assert z.kind == "zero" and all(isinstance(e, ChainBound) for e in z.evidence)


def test_classify_with_k_schedule():
    b = build_basis([(1, [1]), (2, [1])])
    p, q = _single(b, (2, 1))
    c = classify_triangle(b, p, q, (1, 1), schedule=[2**10, 2**14, 2**18, 2**22])
    assert c.kind == "infinite"
    assert c.evidence[0].k == pytest.approx(2**10)
    with pytest.raises(DomainError):
        classify_triangle(b, p, q, (1, 1), schedule=[10, 5, 100])


def test_short_schedule_is_inconclusive_not_wrong():
    # logarithmic rates need large ln k; at k ~ 2^22 the bounds cannot settle
    b = build_basis([(1, [2])])
    p, q = _single(b, (1, 2), 1.0)
    c = classify_triangle(b, p, q, (1, 1), schedule=[2**10, 2**14, 2**18, 2**22])
    assert c.kind == "inconclusive"


@pytest.mark.parametrize("blocks", [
    [(1.0, [2]), (2.0, [1])],
    [(0.5, [3]), (1.5, [1, 1])],
    [(1.0, [2, 1]), (1.2, [1]), (3.0, [1])],
])
def test_trichotomy_exhaustive(blocks):
    b = build_basis(blocks)
    rng = np.random.default_rng(4)
    for p, q, D in trichotomy_cases(b, rng, 3):
        amount = np.max(np.abs((p - q)[b.level_slice(D)]))
        for Q in b.ascending:
            c = classify_triangle(b, p, q, Q)
            assert c.kind == expected_kind(b, D, Q), (D, Q)
            if c.kind == "finite":
                assert c.value == pytest.approx(amount, rel=0.05)


@given(st.floats(0.1, 10), st.integers(0, 3))
def test_similarity_distortion(s, which):
    b = build_basis([(1.0, [2]), (2.0, [1])])
    lev = b.ascending[which % 3]
    p = np.array([0.3, -1.0, 2.0])
    q = p.copy()
    q[b.level_slice(lev)] += 1.7
    c = classify_triangle(b, p, q, lev)
    d = classify_triangle(b, standard_dilation(b, s, p), standard_dilation(b, s, q), lev)
    assert c.kind == d.kind == "finite"
    assert d.value == pytest.approx(s ** lev[0] * c.value, rel=0.05)
