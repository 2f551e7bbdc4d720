import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import sparse

from modphecke import linalg as la
from modphecke.errors import Singular
from modphecke.gf import field_of_order


def span_size_rank(F, A):
    """Rank from the number of distinct vectors A x, by brute force over all x."""
    m, n = A.shape
    seen = set()
    for x in itertools.product(range(F.q), repeat=n):
        v = [0] * m
        for j, c in enumerate(x):
            if c:
                for i in range(m):
                    v[i] = F.add(v[i], F.mul(c, int(A[i, j])))
        seen.add(tuple(v))
    return round(math.log(len(seen), F.q))


matrices = st.tuples(st.sampled_from([2, 3, 4, 5, 8, 9]), st.integers(1, 4), st.integers(1, 4),
                     st.integers(0, 2 ** 31))


def _random(q, m, n, seed, sparse_=0.3):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, q, (m, n))
    A[rng.random((m, n)) < sparse_] = 0
    return A


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_rank_matches_span_count(data):
    q, m, n = data[:3]
    if q ** n > 5000:
        n = 3 if q <= 9 else 2
    F = field_of_order(q)
    A = _random(q, m, n, data[3])
    assert la.rank(F, A) == span_size_rank(F, A)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_nullspace_and_solve(data):
    q, m, n, seed = data
    F = field_of_order(q)
    A = _random(q, m + 2, n + 3, seed)
    N = la.nullspace(F, A)
    assert N.shape[1] == A.shape[1] - la.rank(F, A)
    assert not np.any(la.matmul(F, A, N))
    rng = np.random.default_rng(seed + 1)
    x = rng.integers(0, q, A.shape[1])
    b = la.matvec(F, A, x)
    y = la.solve(F, A, b)
    assert y is not None and np.array_equal(la.matvec(F, A, y), b)


def test_solve_inconsistent_and_inverse():
    F = field_of_order(5)
    A = np.array([[1, 2], [2, 4]])
    assert la.solve(F, A, np.array([1, 0])) is None
    with pytest.raises(Singular):
        la.inverse(F, A)
    B = np.array([[1, 2], [3, 4]])
    assert np.array_equal(la.matmul(F, la.inverse(F, B), B), np.eye(2, dtype=np.int64))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 9]), st.integers(0, 2 ** 31))
def test_matmul_against_loops(q, seed):
    F = field_of_order(q)
    rng = np.random.default_rng(seed)
    A, B = rng.integers(0, q, (4, 5)), rng.integers(0, q, (5, 3))
    C = la.matmul(F, A, B)
    for i in range(4):
        for j in range(3):
            acc = 0
            for k in range(5):
                acc = F.add(acc, F.mul(int(A[i, k]), int(B[k, j])))
            assert C[i, j] == acc


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(5, 40), st.integers(5, 40), st.integers(0, 2 ** 31))
def test_sparse_rank_matches_dense(p, m, n, seed):
    F = field_of_order(p)
    A = _random(p, m, n, seed, sparse_=0.8)
    assert la.sparse_rank_prime(sparse.csr_matrix(A), p) == la.rank(F, A)


def test_subspace_and_coords():
    F = field_of_order(4)
    rng = np.random.default_rng(1)
    B = la.column_basis(F, rng.integers(0, 4, (6, 4)))
    S = la.Subspace(F, 6, B.T)
    assert S.dim == B.shape[1]
    x = rng.integers(0, 4, (B.shape[1], 2))
    V = la.matmul(F, B, x)
    assert all(S.contains(v) for v in V.T)
    assert np.array_equal(la.coords(F, B, V), x)
    assert S.add(V.T) == 0
