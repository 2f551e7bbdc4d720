import itertools
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modphecke import glnq
from modphecke.errors import OutOfRange
from modphecke.gf import field_of_order


def brute_group(n, q):
    F = field_of_order(q)
    out = []
    for entries in itertools.product(range(q), repeat=n * n):
        g = np.array(entries, dtype=np.int64).reshape(n, n)
        if glnq.det(F, g) != 0:
            out.append(g)
    return F, out


@pytest.mark.parametrize("n,q,order", [(2, 2, 6), (2, 3, 48), (3, 2, 168)])
def test_group_order_by_enumeration(n, q, order):
    _, G = brute_group(n, q)
    assert len(G) == order == glnq.group_order(n, q)


def test_group_order_formula():
    assert glnq.group_order(1, 7) == 6
    assert glnq.group_order(3, 3) == 11232


@pytest.mark.parametrize("n,q,size", [(2, 3, 16), (3, 2, 21), (3, 3, 416), (2, 4, 45)])
def test_coset_space_size(n, q, size):
    cs = glnq.coset_space(n, q)
    assert len(cs) == size == glnq.group_order(n, q) // q ** (n * (n - 1) // 2)


def test_coset_space_limits():
    with pytest.raises(OutOfRange):
        glnq.coset_space(4, 2)


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_canonical_form_separates_u_orbits(n, q):
    F, G = brute_group(n, q)
    U = glnq.enumerate_subgroup(F, glnq.unipotent_generators(F, n), n)
    assert len(U) == q ** (n * (n - 1) // 2)
    cs = glnq.coset_space(n, q)
    # oracle: orbits of left multiplication by U, computed from the whole group
    seen, orbits = set(), []
    for g in G:
        key = g.tobytes()
        if key in seen:
            continue
        orb = glnq.bmatmul(F, U, g[None])
        seen.update(x.tobytes() for x in orb)
        orbits.append(orb)
    assert len(orbits) == len(cs)
    labels = set()
    for orb in orbits:
        idx = set(cs.index_of(orb).tolist())
        assert len(idx) == 1
        labels |= idx
    assert len(labels) == len(cs)


def test_canonicalize_idempotent():
    F = field_of_order(3)
    cs = glnq.coset_space(2, 3)
    again = glnq.canonicalize_batch(F, cs.reps)
    assert np.array_equal(again, cs.reps)


def test_bruhat_examples():
    F = field_of_order(5)
    w, _, _ = glnq.bruhat_decompose(F, glnq.identity(2))
    assert w == glnq.identity_weyl(2)
    w, _, _ = glnq.bruhat_decompose(F, glnq.diag([2, 3]))
    assert w == glnq.torus_elem((2, 3))
    w, _, _ = glnq.bruhat_decompose(F, glnq.perm_matrix((1, 0)))
    assert w == glnq.simple_reflection(2, 0)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(2, 3), (2, 4), (3, 2), (3, 3), (3, 4)]), st.integers(0, 2 ** 31))
def test_bruhat_recomposes(nq, seed):
    n, q = nq
    F = field_of_order(q)
    rng = np.random.default_rng(seed)
    while True:
        g = rng.integers(0, q, (n, n))
        if glnq.det(F, g):
            break
    w, u1, u2 = glnq.bruhat_decompose(F, g)
    assert np.array_equal(glnq.bmatmul(F, glnq.bmatmul(F, u1, w.mat()), u2), g)
    # invariant under two-sided U multiplication
    U = glnq.enumerate_subgroup(F, glnq.unipotent_generators(F, n), n)
    a, b = U[rng.integers(len(U))], U[rng.integers(len(U))]
    w2, _, _ = glnq.bruhat_decompose(F, glnq.bmatmul(F, glnq.bmatmul(F, a, g), b))
    assert w2 == w


@pytest.mark.parametrize("n,q", [(2, 3), (3, 2), (2, 4), (3, 3)])
def test_weyl_enumerate(n, q):
    F = field_of_order(q)
    W = glnq.weyl_enumerate(F, n)
    assert len(W) == factorial(n) * (q - 1) ** n
    assert all(w.length == 0 for w in W if w.is_torus())
    w0 = glnq.longest_perm(n)
    assert glnq.perm_length(w0) == n * (n - 1) // 2
    if (n, q) == (2, 3):
        assert sum(w.length == 0 for w in W) == 4 and sum(w.length == 1 for w in W) == 4


@settings(max_examples=100, deadline=None)
@given(st.permutations(range(4)))
def test_reduced_word(perm):
    perm = tuple(perm)
    word = glnq.reduced_word(perm)
    assert len(word) == glnq.perm_length(perm)
    x = tuple(range(4))
    for i in word:
        x = glnq.perm_compose(x, glnq.simple_reflection(4, i).perm)
    assert x == perm


def test_weyl_elem_is_monomial_matrix():
    F = field_of_order(5)
    W = glnq.weyl_enumerate(F, 2)
    for a in W:
        for b in W:
            assert np.array_equal(a.mul(F, b).mat(), glnq.bmatmul(F, a.mat(), b.mat()))
        assert np.array_equal(glnq.bmatmul(F, a.mat(), a.inverse(F).mat()), glnq.identity(2))


def test_characters_and_orbits():
    chars, orbs = glnq.characters_and_orbits(2, 2)
    assert len(chars) == 1 and len(orbs) == 1
    chars, orbs = glnq.characters_and_orbits(2, 4)
    assert len(chars) == 9
    assert sorted(len(o) for o in orbs) == [1, 1, 1, 2, 2, 2]
    assert sum(o.regular for o in orbs) == 3
    chars, orbs = glnq.characters_and_orbits(3, 3)
    assert len(chars) == 8
    assert sorted(len(o) for o in orbs) == [1, 1, 3, 3]
    assert not any(o.regular for o in orbs)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 4, 5, 7]), st.integers(0, 2 ** 31))
def test_character_properties(q, seed):
    F = field_of_order(q)
    rng = np.random.default_rng(seed)
    chars, _ = glnq.characters_and_orbits(3, q)
    chi = chars[rng.integers(len(chars))]
    us = F.units()
    t = tuple(us[i] for i in rng.integers(0, q - 1, 3))
    u = tuple(us[i] for i in rng.integers(0, q - 1, 3))
    tu = tuple(F.mul(a, b) for a, b in zip(t, u))
    assert chi.value(F, tu) == F.mul(chi.value(F, t), chi.value(F, u))
    w, v = glnq.finite_weyl(3)[rng.integers(6)], glnq.finite_weyl(3)[rng.integers(6)]
    assert chi.act(w, q).act(v, q) == chi.act(glnq.perm_compose(w, v), q)
    # chi^w(t) = chi(w t w^-1)
    assert chi.act(w, q).value(F, t) == chi.value(F, glnq.conj_torus(t, w))
