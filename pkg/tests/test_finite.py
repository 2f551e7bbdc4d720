import pytest

from modphecke import finite as fin


@pytest.mark.parametrize("q,projective", [(2, True), (3, True), (4, False), (5, True)])
def test_gl2_c_projectivity(q, projective):
    r = fin.c_projectivity(2, q)
    assert r.projective is projective
    # only the regular blocks can fail, and only over a non-prime field
    for b in r.blocks:
        assert b.projective or (b.regular and q == 4)
    if not projective:
        assert r.certificate is not None and r.certificate.regular


def test_stop_early_keeps_the_verdict():
    full = fin.c_projectivity(2, 4)
    short = fin.c_projectivity(2, 4, stop_early=True)
    assert short.projective is full.projective is False
    assert len(short.blocks) <= len(full.blocks)
    assert short.certificate.members == full.certificate.members


@pytest.mark.parametrize("n,q", [(2, 3), (2, 4), (3, 2)])
def test_cprime_projective(n, q):
    assert fin.cprime_projectivity(n, q).projective


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_gl2_decomposition(q):
    r = fin.gl2_decomposition(q)
    assert r.ok
    assert len(r.summands) == q - 1


@pytest.mark.parametrize("q", [3, 4, 5])
def test_gl2_sequences(q):
    rows = fin.gl2_sequences(q)
    assert rows
    for r in rows:
        assert r.ideal_exact
        assert r.kernel == r.kernel_oracle
        assert r.exact == (q != 4)
        assert r.kernel == (1 if q == 4 else 0)


def test_gl2_kernel_at_four():
    r = fin.gl2_kernel(4)
    assert r.dim_KU == 1 and r.closure_is_image and r.image_in_K and r.proper
    assert (r.dim_K, r.dim_closure) == (3, 2)


@pytest.mark.parametrize("q,ranks,balance", [(2, (1, 3, 3, 8), 21), (3, (1, 6, 6, 27), 52)])
def test_gl3_rank_table(q, ranks, balance):
    r = fin.gl3_rank_table(q)
    assert (r.omega, r.s2y, r.ys2, r.x) == ranks == r.expected()
    assert r.balance == r.dim_cprime == balance
    assert r.dim_yc == r.dim_zc == q + q * q


@pytest.mark.parametrize("q", [2, 3])
def test_gl3_complexes_exact_over_prime_fields(q):
    rows = fin.gl3_complexes(q)
    assert len(rows) == 4
    for c in rows:
        assert c.exact and c.sub_equal
