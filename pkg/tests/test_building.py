import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modphecke import affweyl as aw
from modphecke import building as bd
from modphecke.errors import NotClassifiable, TooLarge


def vp(x, p):
    if x == 0:
        return 10 ** 6
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def smith_by_elimination(B, p, K=20):
    """Exponents of the elementary divisors, eliminating over Z/p^K with a pivot of least valuation."""
    P = p ** K
    M = [[x % P for x in r] for r in B]
    n = len(M)
    out = []
    for k in range(n):
        v, i, j = min((vp(M[a][b], p), a, b) for a in range(k, n) for b in range(k, n))
        M[k], M[i] = M[i], M[k]
        for r in M:
            r[k], r[j] = r[j], r[k]
        out.append(v)
        uinv = pow(M[k][k] // p ** v, -1, P)
        for r in range(k + 1, n):
            f = (M[r][k] // p ** v) * uinv % P
            M[r] = [(a - f * b) % P for a, b in zip(M[r], M[k])]
        for c in range(k + 1, n):
            f = (M[k][c] // p ** v) * uinv % P
            for r in range(n):
                M[r][c] = (M[r][c] - f * M[r][k]) % P
    return sorted(out)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(2, 3), st.integers(0, 2 ** 31))
def test_smith_exponents_against_elimination(p, n, seed):
    rng = np.random.default_rng(seed)
    while True:
        B = [[int(x) for x in rng.integers(-30, 30, n)] for _ in range(n)]
        if bd._det(B) != 0 and vp(bd._det(B), p) < 8:
            break
    assert sorted(bd.smith_exponents(B, p)) == smith_by_elimination(B, p)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(2, 3), st.integers(0, 2 ** 31))
def test_canonical_form_ignores_row_operations(p, n, seed):
    m = 4
    rng = np.random.default_rng(seed)
    B = [[int(x) for x in rng.integers(0, p ** m, n)] for _ in range(n)]
    # keep the class inside the ball of radius m - 1, where the form is defined
    B += [[p ** (m - 1) if i == j else 0 for j in range(n)] for i in range(n)]
    base = bd.canonical(B, p, m)
    assert bd.distance(base, p) <= m - 1
    # random unimodular mixing of the generators, plus a scalar
    n = len(B)
    U = np.eye(n, dtype=np.int64)
    for _ in range(5):
        i, j = rng.choice(n, 2, replace=False)
        U[i] += int(rng.integers(0, p ** m)) * U[j]
    mixed = (U @ np.array(B)).tolist()
    assert bd.canonical(mixed, p, m) == base
    scaled = [[p * x for x in r] for r in B]
    assert bd.canonical(scaled, p, m) == base


@pytest.mark.parametrize("p,R", [(2, 6), (3, 5), (5, 3)])
def test_tree(p, R):
    ball = bd.enumerate_ball(2, p, R)
    assert ball.method_agreement
    rep = bd.tree_checks(ball)
    assert rep.ok
    assert len(ball.vertices) == 1 + sum((p + 1) * p ** (k - 1) for k in range(1, R + 1))
    assert bd.boundary_squared_zero(ball)
    assert bd.homology_ranks(ball).acyclic
    assert all(len(ball.adj[v]) == p + 1 for v in ball.vertices if ball.dist[v] < R)


@pytest.mark.parametrize("p,R,first", [(2, 2, 14), (3, 1, 26)])
def test_gl3_ball(p, R, first):
    ball = bd.enumerate_ball(3, p, R)
    assert ball.method_agreement
    # the neighbours of the origin are the proper nonzero subspaces of F_p^3
    assert sum(1 for v in ball.vertices if ball.dist[v] == 1) == first
    assert bd.boundary_squared_zero(ball)
    assert bd.homology_ranks(ball).acyclic
    assert bd.thick(ball)
    assert set(bd.top_vertex_counts(ball)) <= {1, 2}
    rep = bd.check_lemma71(ball)
    assert rep.ok and rep.unclassifiable == 0
    assert bd.support_radius_property(ball, 200, 7).violations == 0


def test_literal_incidence_fails_in_odd_characteristic():
    ball = bd.enumerate_ball(3, 3, 1)
    assert bd.boundary_squared_zero(ball, "position")
    assert not bd.boundary_squared_zero(ball, "literal")


def test_weyl_vertices_lie_in_the_ball():
    ball = bd.enumerate_ball(2, 3, 4)
    for lam in [(0, 0), (1, 0), (3, 0), (0, 2)]:
        v = bd.weyl_vertex(aw.translation(lam), 3, ball.m)
        assert ball.dist[v] == abs(lam[0] - lam[1])
    assert bd.weyl_vertex(aw.identity(2), 3, ball.m) == bd.standard_vertex(2, 3, ball.m)


def test_limits_and_types():
    with pytest.raises(TooLarge):
        bd.enumerate_ball(3, 5, 1)
    tree = bd.enumerate_ball(2, 2, 2)
    with pytest.raises(NotClassifiable):
        bd.check_lemma71(tree)
    with pytest.raises(NotClassifiable):
        bd.tree_edge_e(tree, tree.vertices[0])


def test_interval_oracle_matches_formula():
    for m in range(1, 6):
        for a1 in range(-5, 6):
            for a2 in range(a1 - 10, a1 + 11):
                assert bd.interval_oracle(a1, a2, m) == [bd.iwahori_interval(a1, a2, m)]


def test_ball_json(tmp_path):
    ball = bd.enumerate_ball(2, 2, 2)
    ball.dump(tmp_path / "b.json")
    data = json.loads((tmp_path / "b.json").read_text())
    assert len(data["vertices"]) == len(ball.vertices) == 10
    assert len(data["edges"]) == 9
