from __future__ import annotations

import dataclasses
import itertools

import pytest
from hypothesis import given, strategies as st

from recurbench.errors import BudgetError, ResourceError
from recurbench.groups import (battery_sequence, cone_approx, cyclic_group, direct_product, finite_group,
                               free_abelian, free_group, group_from_descriptor, in_k_set, integers,
                               is_syndetic_window, is_thick_window, k_set, lemma1d_witness)

Z, Z2, F2 = integers(), free_abelian(2), free_group(2)
S3_TABLE = [[0, 1, 2, 3, 4, 5], [1, 0, 3, 2, 5, 4], [2, 4, 0, 5, 1, 3],
            [3, 5, 1, 4, 0, 2], [4, 2, 5, 0, 3, 1], [5, 3, 4, 1, 2, 0]]

free_words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(F2.element)
z2_elems = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


# ------------------------------------------------------------- frozen values
def test_ball_counts_frozen():
    assert len(Z2.ball(2)) == 12
    assert len(F2.ball(2)) == 16
    assert len(Z.ball(3)) == 6
    assert len(F2.closed_ball(3)) == 53


def test_kset_frozen():
    assert set(k_set(Z, 5)) == set(range(1, 10)) - {5}
    assert {F2.format(w) for w in k_set(F2, F2.parse("ab"))} == {"aab", "bab", "b", "Bab"}
    assert set(k_set(Z, 5, punctured=False)) == set(range(1, 10))


def test_cone_examples_frozen():
    alt = [(-1) ** n * n for n in range(11, 15)]
    c = cone_approx(Z, alt, 5)
    assert c.lower == frozenset() and c.upper == frozenset(range(-5, 6)) - {0}
    assert not c.stabilized
    c2 = cone_approx(Z2, [(n, 0) for n in range(5, 9)], 2)
    assert c2.lower == {(1, 0), (2, 0)}


def test_thick_and_syndetic_frozen():
    v = is_thick_window(Z, lambda t: t >= 1, 3, 10)
    assert v.is_true and v.witness["t"] == 4
    squares = {k * k for k in range(1, 20)} | {-k * k for k in range(1, 20)}
    assert not is_syndetic_window(Z, squares, 3, 100).certified


def test_common_translate_single_generator_frozen():
    rep = lemma1d_witness(Z, [0], (1, 6), range(2, 30), punctured=True)
    assert rep.n == 1
    assert lemma1d_witness(Z, [0], (2, 2), range(3, 30), punctured=True).found
    assert lemma1d_witness(Z, [0], (2, 2), [2], punctured=True).failures == {2: 2}


# ---------------------------------------------------------------- invariants
@given(free_words, free_words, free_words)
def test_free_group_axioms(a, b, c):
    assert F2.mul(F2.mul(a, b), c) == F2.mul(a, F2.mul(b, c))
    assert F2.mul(a, F2.inv(a)) == F2.identity
    assert F2.mul(a, F2.identity) == a


@given(free_words, free_words)
def test_word_length_subadditive_and_symmetric(a, b):
    assert F2.word_length(F2.mul(a, b)) <= F2.word_length(a) + F2.word_length(b)
    assert F2.word_length(F2.inv(a)) == F2.word_length(a)


@given(z2_elems, z2_elems)
def test_zd_length_subadditive(a, b):
    assert Z2.word_length(Z2.mul(a, b)) <= Z2.word_length(a) + Z2.word_length(b)


@given(st.integers(0, 4))
def test_ball_is_union_of_spheres(r):
    for G in (Z, Z2, F2):
        assert len(G.closed_ball(r)) == sum(len(G.sphere(j)) for j in range(r + 1))
        assert all(G.word_length(g) <= r for g in G.closed_ball(r))


@given(st.integers(1, 4))
def test_free_sphere_growth(r):
    assert len(F2.sphere(r)) == 4 * 3 ** (r - 1)


@given(free_words.filter(lambda w: len(w) > 0))
def test_kset_excludes_identity_and_membership_agrees(g):
    K = k_set(F2, g)
    assert F2.identity not in K or F2.word_length(g) > 1 and F2.identity in K
    assert g not in K
    for m in F2.closed_ball(F2.word_length(g) + 1):
        assert (m in K) == in_k_set(F2, m, g)


@given(st.integers(1, 12).flatmap(lambda n: st.sampled_from([n, -n])))
def test_kset_never_contains_identity_in_z(g):
    assert 0 not in k_set(Z, g)


def test_finite_group_bfs_matches_product_enumeration():
    G = finite_group(S3_TABLE, [1, 2])
    # exhaustive oracle: lengths by dynamic programming over all products
    dist = {G.identity: 0}
    frontier = {G.identity}
    while frontier:
        nxt = set()
        for a, s in itertools.product(frontier, G.gamma):
            b = S3_TABLE[a][s]
            if b not in dist:
                dist[b] = dist[a] + 1
                nxt.add(b)
        frontier = nxt
    assert {g: G.word_length(g) for g in range(6)} == dist


def test_products_and_descriptors():
    G = direct_product(integers(), cyclic_group(3))
    assert G.word_length((2, 1)) == 3
    H = group_from_descriptor({"kind": "product", "factors": [{"kind": "Z"}, {"kind": "cyclic", "order": 3}]})
    assert H.word_length((2, 1)) == 3
    assert battery_sequence(H, "forward", 1, 3)[2] == (3, 0)


def test_errors():
    with pytest.raises(ValueError):
        k_set(Z, 0)
    with pytest.raises(BudgetError):
        cone_approx(Z, [1, 2, 3], 5)
    F5 = dataclasses.replace(free_group(5), ball_cap=1000)
    with pytest.raises(ResourceError):
        F5.ball(6)
    with pytest.raises(ValueError):
        battery_sequence(cyclic_group(4), "forward", 1, 3)


def test_battery_sequences_are_length_divergent():
    for G in (Z, Z2, F2):
        for name in ("forward", "backward", "alternating", "random"):
            seq = battery_sequence(G, name, 3, 6, seed=1)
            lengths = [G.word_length(g) for g in seq]
            assert lengths == sorted(lengths) and lengths[0] >= 3 and lengths[-1] >= 8
