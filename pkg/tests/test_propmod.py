import numpy as np
import pytest

from modphecke import linalg as la
from modphecke import parab, propmod
from modphecke.errors import TruncationOverflow

MODELS = [(2, 2, 5), (2, 3, 6), (2, 5, 4), (3, 2, 4), (3, 3, 3)]


@pytest.fixture(scope="module", params=MODELS, ids=lambda p: "n%d-q%d-L%d" % p)
def model(request):
    return propmod.build_model(*request.param)


def test_model_shape(model):
    assert model.dim == len(model.D) * model.H.C.dim
    assert model.one in model.index
    counts = model.case_counts()
    assert counts.get("t", 0) > 0 or model.q == 2
    assert counts.get("up", 0) > 0 and counts.get("down", 0) > 0


def test_complement_stable(model):
    rep = propmod.complement_stability(model)
    assert rep.inputs > 0 and rep.stable


def test_projection_commutes(model):
    rep = propmod.summand_projection_check(model)
    assert rep.checked == len(model.generators) and rep.ok


def test_anchor(model):
    assert propmod.anchor_check(model)


def test_relations(model):
    rep = propmod.relation_check(model)
    assert rep.checked > 0 and rep.failures == []


def test_eps_commutation(model):
    rep = propmod.eps_commutation_check(model)
    assert rep.failures == 0
    assert rep.checked > 0


def test_fold_case_appears_for_gl3():
    m = propmod.build_model(3, 2, 4)
    assert m.case_counts().get("fold", 0) > 0


def test_truncation_guard():
    m = propmod.build_model(2, 3, 4)
    top = max(m.D, key=lambda d: m.lengths[d])
    x = m.embed(top, np.ones(m.vdim, dtype=np.int64))
    with pytest.raises(TruncationOverflow):
        m.act_left(m.generators[0], x)


@pytest.mark.parametrize("n,q,name,L", [(2, 3, "T", 5), (3, 2, "2,1", 4)])
def test_invariant_models(n, q, name, L):
    spec = parab.levi_from_name(n, name)
    big = propmod.n_invariant_model(n, q, spec, L)
    small = propmod.build_model(n, q, L, "C^U")
    assert small.vdim <= big.vdim < big.H.C.dim
    assert propmod.complement_stability(big).stable
    assert propmod.complement_stability(small).stable
    assert propmod.embedding_check(small, big)


def test_unknown_kind():
    with pytest.raises(ValueError):
        propmod.build_model(2, 3, 3, "C^X")


def test_relation_check_detects_a_wrong_rule():
    m = propmod.build_model(2, 3, 6)
    m._square = [{t: 0 for t in sq} for sq in m._square]
    assert propmod.relation_check(m).failures


def test_block_forms_match_dense_matrices():
    m = propmod.build_model(2, 3, 6)
    F, vd, one = m.F, m.vdim, m.index[m.one]
    P = np.zeros((m.dim, m.dim), dtype=np.int64)
    P[one * vd:(one + 1) * vd, one * vd:(one + 1) * vd] = np.eye(vd, dtype=np.int64)
    window = np.zeros(m.dim, dtype=bool)
    for d in m.D:
        if m.lengths[d] <= m.L - 1:
            window[m.index[d] * vd:(m.index[d] + 1) * vd] = True
    rng = np.random.default_rng(0)
    Y = rng.integers(0, 3, (m.dim, 4))
    for g in m.generators:
        M = m.matrix(g)
        D = M.dense()
        assert np.array_equal(M.apply(Y), la.matmul(F, D, Y))
        assert np.array_equal(la.matmul(F, P, D)[:, window], la.matmul(F, D, P)[:, window])
