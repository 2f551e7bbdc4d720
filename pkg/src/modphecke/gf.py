"""Exact arithmetic in F_q, q = p^r.

Elements are encoded as integers 0..q-1: the code of c_0 + c_1 x + ... is
sum c_i p^i, where x is the class of the indeterminate modulo the defining
polynomial. Scalar-level helpers work on these codes; the ``v*`` methods are
vectorised over numpy int64 arrays of codes.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import DivisionByZero, NotPrime, TooLarge

MAX_ORDER = 2 ** 16
TABLE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# dense polynomials over F_p as lists of coefficients, lowest degree first

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    a = _trim(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        a = _trim(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _xpow_mod(e, f, p):
    """x^e mod f by square and multiply."""
    result, base = [1], _pmod([0, 1], f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial f over F_p."""
    r = len(f) - 1
    if r <= 0:
        return False
    if r == 1:
        return True
    if _psub(_xpow_mod(p ** r, f, p), [0, 1], p):
        return False
    for ell in prime_factors(r):
        h = _psub(_xpow_mod(p ** (r // ell), f, p), [0, 1], p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


def least_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Monic irreducible of degree r, least in lex order of (c_{r-1}, ..., c_0)."""
    if r == 1:
        return (0, 1)
    for code in range(p ** r):
        low = [(code // p ** i) % p for i in range(r)]
        f = low + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")


class GF:
    """The field F_{p^r} with deterministic modulus and generator."""

    def __init__(self, p: int, r: int = 1):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if r < 1:
            raise ValueError("degree must be positive")
        if p ** r > MAX_ORDER:
            raise TooLarge(f"{p}^{r} exceeds {MAX_ORDER}")
        self.p, self.r, self.q = p, r, p ** r
        self.modulus = least_irreducible(p, r)
        self.prime = r == 1
        q = self.q
        self._pw = np.array([p ** i for i in range(r)], dtype=np.int64)
        codes = np.arange(q, dtype=np.int64)
        self.digits = (codes[:, None] // self._pw[None, :]) % p
        self.gen = self._find_generator()
        exp = np.zeros(2 * (q - 1) + 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            exp[k] = x
            log[x] = k
            x = self._slow_mul(x, self.gen)
        exp[q - 1:2 * (q - 1)] = exp[:q - 1]
        self.exp, self.log = exp, log
        inv = np.zeros(q, dtype=np.int64)
        nz = codes[1:]
        inv[1:] = exp[(q - 1 - log[nz]) % (q - 1)]
        self.inv_t = inv
        self.neg_t = self._digits_to_code((-self.digits) % p)
        self.tables = q <= TABLE_LIMIT
        if self.tables:
            a, b = np.meshgrid(codes, codes, indexing="ij")
            self.add_t = self._vadd_slow(a, b)
            self.mul_t = self._vmul_slow(a, b)
            self.sub_t = self.add_t[:, self.neg_t]

    # -- construction helpers

    def _digits_to_code(self, d):
        return (d * self._pw).sum(axis=-1)

    def _poly(self, a: int) -> list[int]:
        return _trim([(a // self.p ** i) % self.p for i in range(self.r)])

    def _code(self, poly) -> int:
        return sum(c * self.p ** i for i, c in enumerate(poly))

    def _slow_mul(self, a: int, b: int) -> int:
        if self.prime:
            return a * b % self.p
        return self._code(_pmod(_pmul(self._poly(a), self._poly(b), self.p),
                                list(self.modulus), self.p))

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return result

    def _find_generator(self) -> int:
        n = self.q - 1
        if n == 1:
            return 1
        fs = prime_factors(n)
        for g in range(2, self.q):
            if all(self._slow_pow(g, n // ell) != 1 for ell in fs):
                return g
        raise AssertionError("no generator")

    def _vadd_slow(self, a, b):
        return self._digits_to_code((self.digits[a] + self.digits[b]) % self.p)

    def _vmul_slow(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        z = (a == 0) | (b == 0)
        la = np.where(z, 0, self.log[a])
        lb = np.where(z, 0, self.log[b])
        return np.where(z, 0, self.exp[la + lb])

    # -- scalar arithmetic on codes

    def add(self, a: int, b: int) -> int:
        if self.prime:
            return (a + b) % self.p
        if self.tables:
            return int(self.add_t[a, b])
        return int(self._vadd_slow(np.int64(a), np.int64(b)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        return int(self.neg_t[a])

    def mul(self, a: int, b: int) -> int:
        if self.prime:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise DivisionByZero("inverse of zero")
        return int(self.inv_t[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("negative power of zero")
            return 1 if e == 0 else 0
        return int(self.exp[(self.log[a] * e) % (self.q - 1)])

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q."""
        return n % self.p

    def gen_pow(self, k: int) -> int:
        return int(self.exp[k % (self.q - 1)])

    def dlog(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("log of zero")
        return int(self.log[a])

    def units(self) -> list[int]:
        return [int(x) for x in self.exp[:self.q - 1]]

    def elements(self) -> list[int]:
        return list(range(self.q))

    def additive_basis(self) -> list[int]:
        """Codes of 1, x, ..., x^{r-1}, an F_p-basis of F_q."""
        return [self.p ** i for i in range(self.r)]

    # -- vectorised arithmetic on arrays of codes

    def vadd(self, a, b):
        if self.prime:
            return (np.asarray(a) + np.asarray(b)) % self.p
        if self.tables:
            return self.add_t[a, b]
        return self._vadd_slow(a, b)

    def vsub(self, a, b):
        if self.prime:
            return (np.asarray(a) - np.asarray(b)) % self.p
        if self.tables:
            return self.sub_t[a, b]
        return self._vadd_slow(a, self.neg_t[b])

    def vneg(self, a):
        return self.neg_t[a]

    def vmul(self, a, b):
        if self.prime:
            return (np.asarray(a) * np.asarray(b)) % self.p
        if self.tables:
            return self.mul_t[a, b]
        return self._vmul_slow(a, b)

    def vinv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        return self.inv_t[a]

    def vsum(self, a, axis=None):
        """Sum of codes along an axis."""
        a = np.asarray(a, dtype=np.int64)
        if self.prime:
            return a.sum(axis=axis) % self.p
        d = self.digits[a]
        if axis is None:
            d = d.reshape(-1, self.r).sum(axis=0)
        else:
            d = d.sum(axis=axis % a.ndim)
        return self._digits_to_code(d % self.p)

    def scal(self, c: int, a):
        return self.vmul(np.int64(c), np.asarray(a, dtype=np.int64))

    # -- Scalar objects

    def __call__(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return Scalar(self, int(value) % self.q if self.prime else int(value))

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.r) == (other.p, other.r)

    def __hash__(self):
        return hash((self.p, self.r))

    def __repr__(self):
        return f"GF({self.p}^{self.r})"

    def format(self, a: int) -> str:
        if self.prime:
            return str(a)
        terms = []
        for i, c in enumerate(self._poly(a)):
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                coeff = "" if (c == 1 and i) else str(c)
                terms.append(coeff + mono)
        return "+".join(reversed(terms)) or "0"


class Scalar:
    """An element of a GF with operator overloading."""

    __slots__ = ("field", "code")

    def __init__(self, field: GF, code: int):
        if not 0 <= code < field.q:
            raise ValueError(f"code {code} outside field of order {field.q}")
        self.field, self.code = field, code

    def _lift(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise ValueError("scalars from different fields")
            return other.code
        return self.field.from_int(int(other))

    def __add__(self, o):
        return Scalar(self.field, self.field.add(self.code, self._lift(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return Scalar(self.field, self.field.sub(self.code, self._lift(o)))

    def __rsub__(self, o):
        return Scalar(self.field, self.field.sub(self._lift(o), self.code))

    def __mul__(self, o):
        return Scalar(self.field, self.field.mul(self.code, self._lift(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return Scalar(self.field, self.field.div(self.code, self._lift(o)))

    def __rtruediv__(self, o):
        return Scalar(self.field, self.field.div(self._lift(o), self.code))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.code))

    def __pow__(self, e: int):
        return Scalar(self.field, self.field.pow(self.code, e))

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.code))

    def __eq__(self, o):
        if isinstance(o, Scalar):
            return self.field == o.field and self.code == o.code
        if isinstance(o, int):
            return self.code == self.field.from_int(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.r, self.code))

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"{self.field.format(self.code)}"


@lru_cache(maxsize=None)
def build_field(p: int, r: int = 1) -> GF:
    return GF(p, r)


def field_of_order(q: int) -> GF:
    for p in prime_factors(q)[:1]:
        r, m = 0, q
        while m % p == 0:
            m //= p
            r += 1
        if m == 1:
            return build_field(p, r)
    raise NotPrime(f"{q} is not a prime power")


def arith(field: GF, op: str, *operands) -> Scalar:
    """Apply one of add, mul, neg, inv, pow to Scalars (pow takes an int exponent)."""
    xs = [field(x) if not isinstance(x, Scalar) else x for x in operands[:2]] if op != "pow" else [field(operands[0])]
    if op == "add":
        return xs[0] + xs[1]
    if op == "mul":
        return xs[0] * xs[1]
    if op == "neg":
        return -xs[0]
    if op == "inv":
        return xs[0].inverse()
    if op == "pow":
        return xs[0] ** int(operands[1])
    raise ValueError(f"unknown op {op!r}")


def units_enumerate(field: GF) -> list[Scalar]:
    return [field(c) for c in field.units()]


def iter_elements(field: GF) -> Iterable[Scalar]:
    return (field(c) for c in range(field.q))
