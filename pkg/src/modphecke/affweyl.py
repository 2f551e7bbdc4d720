"""The extended affine Weyl group of GL_n: affine roots, root-flip length,
a word-length oracle and the distinguished coset representatives D."""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from . import glnq
from .gf import GF

MAX_L = 12


@dataclass(frozen=True)
class ExtAffElem:
    """w0 * lam * t, with lam the exponents of a diagonal matrix of powers of the uniformiser."""

    w0: tuple
    lam: tuple
    t: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.w0)

    def mul(self, other: "ExtAffElem", F: GF | None = None) -> "ExtAffElem":
        # w0 lam w0' lam' = w0 w0' (w0'^-1 lam w0') lam'
        lam = tuple(self.lam[other.w0[j]] + other.lam[j] for j in range(self.n))
        t = None
        if self.t is not None or other.t is not None:
            if F is None:
                raise ValueError("torus parts need the field")
            a = self.t if self.t is not None else (1,) * self.n
            b = other.t if other.t is not None else (1,) * self.n
            a = tuple(a[other.w0[j]] for j in range(self.n))
            t = tuple(F.mul(x, y) for x, y in zip(a, b))
        return ExtAffElem(glnq.perm_compose(self.w0, other.w0), lam, t)

    def __mul__(self, other: "ExtAffElem") -> "ExtAffElem":
        return self.mul(other)

    def inverse(self, F: GF | None = None) -> "ExtAffElem":
        inv = glnq.perm_inverse(self.w0)
        # (w0 lam)^-1 = lam^-1 w0^-1 = w0^-1 (w0 lam^-1 w0^-1)
        lam = tuple(-self.lam[inv[j]] for j in range(self.n))
        t = None
        if self.t is not None:
            if F is None:
                raise ValueError("torus parts need the field")
            t = tuple(F.inv(self.t[inv[j]]) for j in range(self.n))
        return ExtAffElem(inv, lam, t)

    def normalized(self) -> "ExtAffElem":
        """Representative modulo the centre (translations by constant vectors)."""
        c = self.lam[-1]
        return ExtAffElem(self.w0, tuple(x - c for x in self.lam), self.t)

    def drop_torus(self) -> "ExtAffElem":
        return ExtAffElem(self.w0, self.lam)

    def __str__(self) -> str:
        s = "w" + "".join(map(str, self.w0)) + "|" + ",".join(map(str, self.lam))
        return s if self.t is None else s + "|t" + ",".join(map(str, self.t))


def identity(n: int) -> ExtAffElem:
    return ExtAffElem(tuple(range(n)), (0,) * n)


def finite(perm) -> ExtAffElem:
    return ExtAffElem(tuple(perm), (0,) * len(perm))


def translation(lam) -> ExtAffElem:
    return ExtAffElem(tuple(range(len(lam))), tuple(lam))


def torus_elem(t) -> ExtAffElem:
    return ExtAffElem(tuple(range(len(t))), (0,) * len(t), tuple(t))


# ------------------------------------------------------------------ roots

@dataclass(frozen=True)
class AffineRoot:
    """The affine root (alpha, k), alpha = (i, j) evaluating diag(x) to x_j - x_i."""

    i: int
    j: int
    k: int = 0

    def value(self, lam) -> int:
        return lam[self.j] - lam[self.i]

    @property
    def finite_positive(self) -> bool:
        return self.i < self.j

    @property
    def positive(self) -> bool:
        return self.k > 0 or (self.k == 0 and self.finite_positive)


def finite_roots(n: int) -> list[AffineRoot]:
    return [AffineRoot(i, j) for i in range(n) for j in range(n) if i != j]


def positive_finite_roots(n: int) -> list[AffineRoot]:
    return [AffineRoot(i, j) for i in range(n) for j in range(i + 1, n)]


def act_root(w: ExtAffElem, r: AffineRoot) -> AffineRoot:
    """w0 lam : (alpha, k) -> (w0 alpha, k - alpha(lam)); the torus part acts trivially."""
    return AffineRoot(w.w0[r.i], w.w0[r.j], r.k - r.value(w.lam))


def _window(w: ExtAffElem) -> int:
    return max(w.lam) - min(w.lam) + 1


def flipped_roots(w: ExtAffElem) -> list[AffineRoot]:
    W = _window(w)
    out = []
    for r in finite_roots(w.n):
        for k in range(-W - 1, W + 2):
            a = AffineRoot(r.i, r.j, k)
            if a.positive and not act_root(w, a).positive:
                if abs(k) > W:
                    raise AssertionError("flipped root outside the search window")
                out.append(a)
    return out


def length(w: ExtAffElem) -> int:
    """Number of positive affine roots made negative by w."""
    return len(flipped_roots(w))


def is_distinguished(d: ExtAffElem) -> bool:
    """d sends every finite positive root to a positive affine root."""
    return all(act_root(d, r).positive for r in positive_finite_roots(d.n))


# ------------------------------------------------------------------ generators and oracle

def simple_reflection(n: int, i: int) -> ExtAffElem:
    perm = list(range(n))
    perm[i], perm[i + 1] = perm[i + 1], perm[i]
    return finite(perm)


def affine_reflection(n: int) -> ExtAffElem:
    """Reflection in the affine simple root (-theta, 1), theta the highest root."""
    perm = list(range(n))
    perm[0], perm[-1] = perm[-1], perm[0]
    lam = [0] * n
    lam[0], lam[-1] = 1, -1
    return ExtAffElem(tuple(perm), tuple(lam))


def affine_generators(n: int) -> list[ExtAffElem]:
    return [simple_reflection(n, i) for i in range(n - 1)] + [affine_reflection(n)]


def _conj(x: ExtAffElem, y: ExtAffElem) -> ExtAffElem:
    return x.mul(y).mul(x.inverse())


@lru_cache(maxsize=None)
def omega(n: int) -> ExtAffElem:
    """The element with translation part a unit vector that permutes the affine simple reflections."""
    S = set(affine_generators(n))
    for perm in glnq.finite_weyl(n):
        for i in range(n):
            lam = [0] * n
            lam[i] = 1
            x = ExtAffElem(perm, tuple(lam))
            if {_conj(x, s) for s in S} == S:
                return x
    raise AssertionError("no length-zero generator found")


def _power(x: ExtAffElem, k: int) -> ExtAffElem:
    out = identity(x.n)
    step = x if k >= 0 else x.inverse()
    for _ in range(abs(k)):
        out = out.mul(step)
    return out


@dataclass
class WordOracle:
    """Breadth-first word lengths in the affine Weyl group, extended by the length-zero subgroup."""

    n: int
    L: int
    dist: dict = field(default_factory=dict)

    def __post_init__(self):
        e = identity(self.n)
        self.dist = {e: 0}
        queue = deque([e])
        gens = affine_generators(self.n)
        while queue:
            x = queue.popleft()
            if self.dist[x] == self.L:
                continue
            for s in gens:
                y = x.mul(s)
                if y not in self.dist:
                    self.dist[y] = self.dist[x] + 1
                    queue.append(y)

    def length(self, w: ExtAffElem) -> int | None:
        """Word length of w, or None when it exceeds L."""
        w = w.drop_torus()
        k = sum(w.lam)
        a = w.mul(_power(omega(self.n), -k))
        c = sum(a.lam) // self.n
        a = a.mul(translation((-c,) * self.n)) if c else a
        return self.dist.get(a)

    def elements(self) -> list[ExtAffElem]:
        """All elements of length <= L modulo the centre, normalised."""
        out = set()
        for k in range(self.n):
            om = _power(omega(self.n), k)
            for x in self.dist:
                out.add(x.mul(om).normalized())
        return sorted(out, key=lambda e: (self.length(e), e.w0, e.lam))


@lru_cache(maxsize=None)
def word_oracle(n: int, L: int) -> WordOracle:
    return WordOracle(n, L)


# ------------------------------------------------------------------ D

@dataclass
class DReport:
    n: int
    L: int
    elements: list
    lengths: dict
    by_roots: list
    by_min_length: list
    compared_cosets: int
    agree: bool
    injective: bool
    oracle_mismatches: int


def coset_key(d: ExtAffElem) -> frozenset:
    return frozenset(d.mul(finite(w)).normalized() for w in glnq.finite_weyl(d.n))


def enumerate_D(n: int, L: int) -> DReport:
    """Elements of W~' (modulo the centre) of length <= L satisfying the root criterion,
    compared with the minimal-length characterisation on cosets inside the window."""
    if L > MAX_L or n not in (2, 3):
        raise ValueError("enumerate_D needs n in {2, 3} and L <= 12")
    orc = word_oracle(n, L)
    elems = orc.elements()
    lengths = {}
    mismatches = 0
    for e in elems:
        lengths[e] = length(e)
        mismatches += lengths[e] != orc.length(e)
    by_roots = [e for e in elems if is_distinguished(e)]
    window = set(elems)
    by_min, compared, seen = [], 0, set()
    for e in elems:
        key = coset_key(e)
        if key in seen:
            continue
        seen.add(key)
        if not key <= window:
            continue
        compared += 1
        lmin = min(lengths[x] for x in key)
        mins = [x for x in key if lengths[x] == lmin]
        if len(mins) == 1:
            by_min.append(mins[0])
        else:
            by_min.extend(mins)
    inside = {e for e in by_roots if coset_key(e) <= window}
    agree = inside == set(by_min)
    keys = [coset_key(d) for d in by_roots]
    injective = len(set(keys)) == len(keys)
    return DReport(n, L, elems, lengths, by_roots, sorted(by_min, key=lambda e: (lengths[e], e.w0, e.lam)),
                   compared, agree, injective, mismatches)


@dataclass
class Prop51Report:
    checked: int
    violations: int
    general_checked: int
    general_counterexamples: list


def check_prop51(n: int, L: int, search: int = 3) -> Prop51Report:
    """l(dw) = l(d) + l(w) for d in D, w in W_0; plus a counterexample search over w in W~'
    of length <= search."""
    rep = enumerate_D(n, L)
    W0 = [finite(w) for w in glnq.finite_weyl(n)]
    checked = viol = 0
    for d in rep.by_roots:
        for w in W0:
            checked += 1
            viol += length(d.mul(w)) != rep.lengths[d] + length(w)
    small = [e for e in rep.elements if rep.lengths[e] <= search]
    gen_checked, counter = 0, []
    for d in rep.by_roots:
        if rep.lengths[d] + search > L:
            continue
        for w in small:
            gen_checked += 1
            if length(d.mul(w)) != rep.lengths[d] + rep.lengths[w]:
                counter.append((d, w))
    return Prop51Report(checked, viol, gen_checked, counter)


@dataclass
class Lemma53Report:
    checked: int
    violations: list


def check_lemma53(n: int, L: int) -> Lemma53Report:
    rep = enumerate_D(n, L)
    D = set(rep.by_roots)
    checked, viol = 0, []
    for d in rep.by_roots:
        ld = rep.lengths[d]
        if ld > L - 1:
            continue
        for i in range(n - 1):
            s = simple_reflection(n, i)
            sd = s.mul(d).normalized()
            checked += 1
            lsd = length(sd)
            if lsd == ld - 1:
                if sd not in D:
                    viol.append((i, d))
            elif lsd == ld + 1:
                if sd not in D and coset_key(sd) != coset_key(d):
                    viol.append((i, d))
            else:
                viol.append((i, d))
    return Lemma53Report(checked, viol)


def d_decompose(v: ExtAffElem, D: list) -> tuple[ExtAffElem, tuple]:
    """(d, w) with v = d w, d in D and w in W_0 (modulo the centre)."""
    key = coset_key(v)
    for d in D:
        if coset_key(d) == key:
            w = d.inverse().mul(v.drop_torus())
            return d, w.w0
    raise KeyError("coset not represented in D")


def dump_csv(n: int, L: int, path) -> int:
    rep = enumerate_D(n, L)
    D = set(rep.by_roots)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["element", "length", "in_D"])
        for e in rep.elements:
            wr.writerow([str(e), rep.lengths[e], int(e in D)])
    return len(rep.elements)
