from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heintze.errors import DomainError, SpecError
from heintze.spectral import (JordanSpec, build_basis, compare_levels, exp_tA,
                              leaf_level_of_difference, standard_dilation)

blocks_strategy = st.lists(
    st.tuples(st.floats(0.5, 3.0), st.lists(st.integers(1, 4), min_size=1, max_size=2)),
    min_size=1, max_size=3,
).filter(lambda bs: sum(sum(s) for _, s in bs) <= 8)


def test_single_scalar_block():
    b = build_basis([(1, [1])])
    assert b.n == 1 and b.levels == ((1.0, 1),)


def test_jordan_block_levels_in_precedence_order():
    b = build_basis([(1, [2])])
    assert b.n == 2 and b.levels == ((1.0, 2), (1.0, 1))


def test_mixed_precedence():
    b = build_basis([(1, [2]), (2, [1])])
    assert b.n == 3
    assert b.levels == ((2.0, 1), (1.0, 2), (1.0, 1))
    assert b.ascending == ((1.0, 1), (1.0, 2), (2.0, 1))


def test_spec_canonicalizes():
    s = JordanSpec(((2.0, [1]), (1.0, [2]), (2.0, (3,))))
    assert s.blocks == ((1.0, (2,)), (2.0, (1, 3)))
    assert s.n == 6
    assert JordanSpec.from_json(s.to_json()) == s


@pytest.mark.parametrize("blocks", [
    [(0.0, [1])], [(-1.0, [1])], [(1.0, [0])], [(1.0, [])], [(1.0, [1.5])],
    [(complex(1, 1), [1])], [(float("nan"), [1])], [],
])
def test_invalid_specs(blocks):
    with pytest.raises(SpecError):
        JordanSpec(tuple(blocks))


def test_compare_levels_examples():
    b = build_basis([(1, [3]), (2, [1])])
    assert compare_levels(b, (2, 1), (1, 3)) == -1
    assert compare_levels(b, (1, 3), (1, 1)) == -1
    assert compare_levels(b, (1, 2), (1, 2)) == 0
    assert compare_levels(b, (1, 1), (2, 1)) == 1
    with pytest.raises(IndexError):
        compare_levels(b, (3, 1), (1, 1))


@given(blocks_strategy)
def test_compare_levels_total_order(blocks):
    b = build_basis(blocks)
    L = b.ascending
    for x, y in itertools.product(L, L):
        assert compare_levels(b, x, y) == -compare_levels(b, y, x)
        assert (compare_levels(b, x, y) == 0) == (x == y)
    for x, y, z in itertools.product(L, L, L):
        if compare_levels(b, x, y) == -1 and compare_levels(b, y, z) == -1:
            assert compare_levels(b, x, z) == -1


def test_exp_tA_examples():
    assert exp_tA(build_basis([(1, [1])]), 0.0) == pytest.approx(np.eye(1))
    E = exp_tA(build_basis([(1, [2])]), -1.0)
    np.testing.assert_allclose(E, math.exp(-1) * np.array([[1.0, -1.0], [0.0, 1.0]]), rtol=1e-15)


def test_exp_tA_matches_scipy(basis):
    from scipy.linalg import expm
    for t in (-2.5, -0.3, 0.7, 3.0):
        np.testing.assert_allclose(exp_tA(basis, t), expm(t * basis.A), rtol=1e-12, atol=1e-14)


@given(blocks_strategy, st.floats(-50, 50))
def test_exp_inverse(blocks, t):
    b = build_basis(blocks)
    P = exp_tA(b, t) @ exp_tA(b, -t)
    np.testing.assert_allclose(P, np.eye(b.n), atol=1e-12 * max(1.0, abs(t)) ** b.max_size)


@given(blocks_strategy, st.floats(-5, 5), st.floats(-5, 5))
def test_group_law(blocks, s, t):
    b = build_basis(blocks)
    lhs = exp_tA(b, s) @ exp_tA(b, t)
    rhs = exp_tA(b, s + t)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


@given(blocks_strategy, st.floats(-5, 5))
def test_flag_invariance(blocks, t):
    b = build_basis(blocks)
    E = exp_tA(b, t)
    for lev in b.ascending:
        below = b.below_mask(lev)
        assert np.all(E[np.ix_(~below, below)] == 0.0)


def test_nilpotent_links_levels():
    b = build_basis([(1, [3, 1])])
    for ch in b.chains:
        for lo, hi in zip(ch.positions, ch.positions[1:]):
            assert b.nilpotent[lo, hi] == 1.0
            assert b.level_of(hi)[1] == b.level_of(lo)[1] + 1
    assert b.nilpotent.sum() == 2


def test_standard_dilation():
    b = build_basis([(2, [1])])
    assert standard_dilation(b, 3.0, [5.0]) == pytest.approx([45.0], rel=1e-14)
    b = build_basis([(1, [2]), (2, [1])])
    p = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(standard_dilation(b, 1.0, p), p, rtol=0, atol=0)
    np.testing.assert_allclose(standard_dilation(b, 2, standard_dilation(b, 3, p)),
                               standard_dilation(b, 6, p), rtol=1e-12)
    with pytest.raises(DomainError):
        standard_dilation(b, 0.0, p)


def test_leaf_level_of_difference():
    b = build_basis([(1, [2])])
    assert leaf_level_of_difference(b, [1, 2], [1, 2]) is None
    assert leaf_level_of_difference(b, [0, 1], [0, 0]) == (1.0, 2)
    assert leaf_level_of_difference(b, [1, 0], [0, 0]) == (1.0, 1)
    b = build_basis([(1, [1]), (2, [1])])
    assert leaf_level_of_difference(b, [1, 1], [0, 0]) == (2.0, 1)


def test_from_matrix_certificate():
    spec = JordanSpec(((1.0, (2,)), (2.0, (1,))))
    b = build_basis(spec)
    P = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]])
    M = P @ exp_tA(b, 1.0) @ np.linalg.inv(P)
    assert JordanSpec.from_matrix(M, P, spec.blocks) == spec
    with pytest.raises(SpecError):
        JordanSpec.from_matrix(M + 1e-3, P, spec.blocks)
