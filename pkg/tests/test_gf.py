import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modphecke.errors import DivisionByZero, NotPrime, TooLarge
from modphecke.gf import arith, build_field, field_of_order, is_irreducible, units_enumerate

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


def poly_oracle(F):
    """Multiplication by schoolbook polynomial arithmetic, independent of the field tables."""
    p, r, f = F.p, F.r, list(F.modulus)

    def digits(a):
        return [(a // p ** i) % p for i in range(r)]

    def mul(a, b):
        x, y = digits(a), digits(b)
        prod = [0] * (2 * r - 1)
        for i, u in enumerate(x):
            for j, v in enumerate(y):
                prod[i + j] = (prod[i + j] + u * v) % p
        for k in range(len(prod) - 1, r - 1, -1):
            c = prod[k]
            if c:
                for i in range(r + 1):
                    prod[k - r + i] = (prod[k - r + i] - c * f[i]) % p
        return sum(c * p ** i for i, c in enumerate(prod[:r]))

    def add(a, b):
        return sum(((u + v) % p) * p ** i for i, (u, v) in enumerate(zip(digits(a), digits(b))))

    return add, mul


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25])
def test_tables_match_schoolbook_arithmetic(q):
    F = field_of_order(q)
    add, mul = poly_oracle(F)
    for a, b in itertools.product(range(q), repeat=2):
        assert F.mul(a, b) == mul(a, b)
        assert F.add(a, b) == add(a, b)


def test_small_fields():
    assert build_field(2, 1).q == 2
    F3 = build_field(3, 1)
    assert F3.gen == 2
    F4 = build_field(2, 2)
    assert F4.modulus == (1, 1, 1)          # x^2 + x + 1
    x = 2                                   # code of the class of x
    assert F4.mul(x, x) == 3                # x + 1


def test_modulus_is_least_irreducible():
    for q in (4, 8, 9, 16, 27):
        F = field_of_order(q)
        assert is_irreducible(list(F.modulus), F.p)
        for code in range(F.p ** F.r):
            low = [(code // F.p ** i) % F.p for i in range(F.r)]
            if tuple(low + [1]) == F.modulus:
                break
            assert not is_irreducible(low + [1], F.p)


@pytest.mark.parametrize("q", ORDERS)
def test_frobenius_and_units(q):
    F = field_of_order(q)
    for a in range(q):
        assert F.pow(a, q) == a
    us = F.units()
    assert len(us) == len(set(us)) == q - 1
    assert us[0] == 1
    assert F.pow(F.gen, q - 1) == 1
    assert all(F.pow(F.gen, k) != 1 for k in range(1, q - 1))
    assert {F.mul(a, b) for a in us for b in us} == set(us)
    assert [int(s) for s in units_enumerate(F)] == us


def test_errors():
    with pytest.raises(NotPrime):
        build_field(6, 1)
    with pytest.raises(NotPrime):
        field_of_order(12)
    with pytest.raises(TooLarge):
        build_field(2, 17)
    with pytest.raises(DivisionByZero):
        build_field(5).inv(0)
    with pytest.raises(DivisionByZero):
        build_field(2, 3).vinv(np.array([1, 0]))


def test_scalar_arith():
    F = build_field(2, 2)
    assert int(arith(F, "inv", 1)) == 1
    assert int(arith(F, "mul", 2, 2)) == 3
    assert int(arith(F, "pow", F.gen, 3)) == 1
    assert int(arith(F, "add", 3, 3)) == 0
    assert int(arith(F, "neg", 2)) == 2


elements = st.sampled_from(ORDERS).flatmap(
    lambda q: st.tuples(st.just(q), *[st.integers(0, q - 1)] * 3))


@settings(max_examples=300, deadline=None)
@given(elements)
def test_field_axioms(data):
    q, a, b, c = data
    F = field_of_order(q)
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.gen_pow(F.dlog(a)) == a


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(ORDERS), st.integers(0, 2 ** 31))
def test_vector_ops_agree_with_scalar_ops(q, seed):
    F = field_of_order(q)
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, q, 20), rng.integers(0, q, 20)
    assert list(F.vadd(a, b)) == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.vmul(a, b)) == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.vsub(a, b)) == [F.sub(int(x), int(y)) for x, y in zip(a, b)]
    total = 0
    for x in a:
        total = F.add(total, int(x))
    assert int(F.vsum(a)) == total
