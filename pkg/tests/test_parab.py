import itertools
from math import factorial, prod

import numpy as np
import pytest

from modphecke import glnq, parab, umod
from modphecke import linalg as la
from modphecke.gf import field_of_order

SPECS = [(2, "T"), (3, "2,1"), (3, "1,2"), (3, "T")]


def all_matrices(n, q):
    F = field_of_order(q)
    for entries in itertools.product(range(q), repeat=n * n):
        g = np.array(entries, dtype=np.int64).reshape(n, n)
        if glnq.det(F, g):
            yield g


@pytest.mark.parametrize("n,name", SPECS + [(3, "G")])
def test_dm_reps_count(n, name):
    spec = parab.levi_from_name(n, name)
    D = parab.dm_reps(spec)
    assert len(D.reps) == factorial(n) // prod(factorial(c) for c in spec.composition)
    assert D.by_scan == D.by_roots
    assert tuple(range(n)) in D.reps


def test_levi_names():
    assert parab.levi_from_name(3, "T").composition == (1, 1, 1)
    assert parab.levi_from_name(3, "G").composition == (3,)
    with pytest.raises(ValueError):
        parab.levi(3, (2, 2))


@pytest.mark.parametrize("n,q,name", [(2, 3, "T"), (3, 2, "2,1"), (3, 2, "T"), (3, 2, "1,2")])
def test_parabolic_coset_count(n, q, name):
    spec = parab.levi_from_name(n, name)
    G = list(all_matrices(n, q))
    P = sum(1 for g in G if spec.in_P(g))
    assert len(parab.parabolic_cosets(n, q, spec.composition)) == len(G) // P


@pytest.mark.parametrize("n,q,name", [(2, 3, "T"), (3, 2, "2,1"), (3, 2, "T"), (3, 3, "2,1")])
def test_freeness_and_double_cosets(n, q, name):
    spec = parab.levi_from_name(n, name)
    assert parab.freeness_check(spec, q).free
    assert parab.lemma38_check(spec, q).ok


@pytest.mark.parametrize("n,q,name", [(2, 3, "T"), (2, 4, "T"), (3, 2, "2,1"), (3, 2, "T")])
def test_xi_bijective(n, q, name):
    rep = parab.xi_P_check(parab.levi_from_name(n, name), q)
    assert rep.bijective and rep.inverse_formula_ok and rep.h_linear and rep.m_equivariant


@pytest.mark.parametrize("n,q,name", [(2, 3, "T"), (3, 2, "2,1"), (3, 3, "2,1"), (3, 3, "T")])
def test_psi_basis(n, q, name):
    spec = parab.levi_from_name(n, name)
    F = field_of_order(q)
    for V in (parab.trivial_rep(F), parab.det_rep(F, spec, 0)):
        rep = parab.psi_basis_check(V, spec, q)
        assert rep.bijective and rep.shift_rule and rep.levi_rule


def test_induced_rep_is_a_representation():
    spec = parab.levi_from_name(3, "2,1")
    F = field_of_order(3)
    I = parab.induce(parab.det_rep(F, spec, 0), spec, 3)
    assert I.dim == 13
    rng = np.random.default_rng(3)
    G = glnq.group_generators(F, 3)
    for _ in range(5):
        a, b = G[rng.integers(len(G))], G[rng.integers(len(G))]
        ab = glnq.bmatmul(F, a, b)
        lhs = I.mat(ab)
        assert np.array_equal(lhs, la.matmul(F, I.mat(a), I.mat(b))) or \
            np.array_equal(lhs, la.matmul(F, I.mat(b), I.mat(a)))


def test_induction_exact():
    spec = parab.levi_from_name(2, "T")
    F = field_of_order(3)
    L = parab.levi_hecke(2, 3, spec.composition)
    V = parab.cm_rep(L)
    S = la.column_basis(F, np.ones((V.dim, 1), dtype=np.int64))
    rep = parab.induction_exactness(V, S, spec, 3)
    assert rep.exact and rep.dim == rep.expected


@pytest.mark.parametrize("n,q,name", [(2, 3, "T"), (3, 2, "2,1")])
def test_adjunction_dims(n, q, name):
    spec = parab.levi_from_name(n, name)
    F = field_of_order(q)
    Vs = [parab.trivial_rep(F), parab.det_rep(F, spec, 0)]
    Ws = [parab.trivial_rep(F), parab.c_rep(umod.build_C(n, q))]
    assert parab.adjunction_dim_checks(spec, q, Vs, Ws).ok


@pytest.mark.parametrize("n,q,name", [(2, 3, "T"), (3, 2, "2,1")])
def test_tensor_and_invariant_dims_agree(n, q, name):
    spec = parab.levi_from_name(n, name)
    L = parab.levi_hecke(n, q, spec.composition)
    A = L.algebra
    # right H_M-module: the trivial character of H_M
    m = umod.right_ideal_module(A, A.unit)[0]
    a, b = parab.prop314_dims(spec, q, m)
    assert a == b
    H = umod.build_H(n, q)
    mH = umod.right_ideal_module(H.algebra, H.eps(H.trivial_char()))[0]
    a, b = parab.prop317_dims(spec, q, mH)
    assert a == b


@pytest.mark.parametrize("n,q,name,verdict", [(2, 3, "T", "Projective"), (3, 2, "2,1", "Projective")])
def test_projectivity_through_levi(n, q, name, verdict):
    spec = parab.levi_from_name(n, name)
    r = parab.prop320_check(spec, q)
    assert r.consistent and r.levi_verdict == verdict
    r = parab.prop325_check(spec, q)
    assert r.levi_verdict == r.invariants_verdict == verdict
    assert r.summand is True
