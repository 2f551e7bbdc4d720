"""The universal module C = functions on U\\G and the Hecke algebra H = End_G(C).

H acts on the left of C; tau_w sends 1_{Ug} to 1_{UwUg}. A product
tau_v tau_w means "apply tau_w, then tau_v".
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy import sparse

from . import glnq
from . import linalg as la
from .errors import IdempotentCheckFailed, IdentityFailure, RelationFailure, StructureMismatch
from .gf import GF, field_of_order
from .glnq import CharOrbit, Character, WeylElem
from .modalg import Algebra, Module, hom_space, subalgebra


# ------------------------------------------------------------------ C

class PermModule:
    """C with basis 1_{Uy}, y running over canonical coset representatives."""

    def __init__(self, n: int, q: int):
        self.n, self.q = n, q
        self.cs = glnq.coset_space(n, q)
        self.F: GF = self.cs.F
        self.dim = len(self.cs)
        self._rows: dict[int, np.ndarray] = {}
        self._sparse: dict = {}
        self._torus: dict = {}

    @property
    def labels(self) -> list:
        return self.cs.labels

    # right G-action: g . 1_{Uh} = 1_{U h g^{-1}}
    def g_perm(self, g) -> np.ndarray:
        """Index array P with g e_h = e_{P[h]}."""
        return self.cs.right_perm(glnq.mat_inverse(self.F, g))

    def g_matrix(self, g) -> np.ndarray:
        P = self.g_perm(g)
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        M[P, np.arange(self.dim)] = 1
        return M

    def group_perms(self, gens=None) -> list[np.ndarray]:
        if gens is None:
            gens = glnq.group_generators(self.F, self.n)
        return [self.g_perm(g) for g in gens]

    # products of coset representatives, cached by left factor
    def rows(self, ys) -> np.ndarray:
        ys = [int(y) for y in ys]
        missing = [y for y in ys if y not in self._rows]
        for start in range(0, len(missing), 64):
            chunk = missing[start:start + 64]
            tab = self.cs.products(chunk, np.arange(self.dim))
            for y, row in zip(chunk, tab):
                self._rows[y] = row
        if not ys:
            return np.zeros((0, self.dim), dtype=np.int64)
        return np.stack([self._rows[y] for y in ys])

    def support(self, w: WeylElem) -> list[int]:
        """Cosets U y inside U w U."""
        return self.cs.double_coset(w)

    def index(self, w: WeylElem) -> int:
        return self.cs.index_of_weyl(w)

    def tau_apply(self, w: WeylElem, f) -> np.ndarray:
        """tau_w applied to vector(s) f (columns)."""
        return self.apply_combination({w: 1}, f)

    def tau_matrix(self, w: WeylElem):
        """0/1 matrix of tau_w on the coset basis."""
        if w not in self._sparse:
            ys = self.support(w)
            R = self.rows(ys)
            cols = np.tile(np.arange(self.dim), len(ys))
            data = np.ones(R.size, dtype=np.int64)
            self._sparse[w] = sparse.csr_matrix((data, (R.ravel(), cols)), shape=(self.dim, self.dim))
        return self._sparse[w]

    def apply_combination(self, coeffs: dict, f) -> np.ndarray:
        """sum_w c_w tau_w applied to the columns of f."""
        F = self.F
        f = np.asarray(f, dtype=np.int64)
        vec = f.ndim == 1
        if vec:
            f = f.reshape(-1, 1)
        k = f.shape[1]
        D = f if F.prime else F.digits[f].reshape(self.dim, k * F.r)
        out = np.zeros_like(f)
        for w, c in coeffs.items():
            if c == 0:
                continue
            Y = np.asarray(self.tau_matrix(w) @ D) % F.p
            if not F.prime:
                Y = F._digits_to_code(Y.reshape(self.dim, k, F.r))
            out = F.vadd(out, Y if c == 1 else F.scal(c, Y))
        return out[:, 0] if vec else out

    def indicator(self, idx) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[np.asarray(idx, dtype=np.int64)] = 1
        return v

    def torus_perm(self, t) -> np.ndarray:
        """tau_t e_y = e_{t y}."""
        key = tuple(int(a) for a in t)
        if key not in self._torus:
            self._torus[key] = self.cs.left_perm(glnq.diag(t))
        return self._torus[key]


@lru_cache(maxsize=None)
def build_C(n: int, q: int) -> PermModule:
    return PermModule(n, q)


def tau_action(C: PermModule, w: WeylElem, f) -> np.ndarray:
    return C.tau_apply(w, f)


# ------------------------------------------------------------------ H

class HeckeAlgebra:
    """H with basis tau_w, w in W, ordered by (length, perm, diag)."""

    def __init__(self, n: int, q: int, C: PermModule, basis: list[WeylElem], mult: np.ndarray,
                 path_b: np.ndarray | None = None):
        self.n, self.q, self.C, self.F = n, q, C, C.F
        self.basis = basis
        self.index = {w: i for i, w in enumerate(basis)}
        self.dim = len(basis)
        e = identity = glnq.identity_weyl(n)
        self.one = self.index[e]
        self.simple = [glnq.sl2_reflection(self.F, n, i) for i in range(n - 1)]
        self.torus_gens = []
        for i in range(n):
            d = [1] * n
            d[i] = self.F.gen
            self.torus_gens.append(glnq.torus_elem(d))
        gens = [self.tau(s) for s in self.simple] + [self.tau(t) for t in self.torus_gens if q > 2]
        labels = [f"tau[{w.perm};{w.diag}]" for w in basis]
        unit = self.tau(identity)
        self.algebra = Algebra(self.F, mult, unit, gens=gens, labels=labels, name=f"H({n},{q})")
        self.path_b = path_b
        self.chars, self.orbits = glnq.characters_and_orbits(n, q)
        self._eps: dict = {}

    # elements
    def tau(self, w: WeylElem) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.index[w]] = 1
        return v

    def mul(self, *xs) -> np.ndarray:
        return self.algebra.mul(*xs)

    def add(self, *xs) -> np.ndarray:
        return self.algebra.add(*xs)

    def as_dict(self, x) -> dict:
        return {self.basis[i]: int(c) for i, c in enumerate(x) if c}

    @property
    def unit(self) -> np.ndarray:
        return self.algebra.unit

    def torus(self) -> list[tuple]:
        return glnq.torus(self.F, self.n)

    def eps(self, chi: Character) -> np.ndarray:
        """epsilon_chi = (-1)^n sum_t chi(t) tau_t."""
        if chi not in self._eps:
            F = self.F
            sign = 1 if self.n % 2 == 0 else F.neg(1)
            v = np.zeros(self.dim, dtype=np.int64)
            for t in self.torus():
                v[self.index[glnq.torus_elem(t)]] = F.mul(sign, chi.value(F, t))
            self._eps[chi] = v
        return self._eps[chi]

    def eps_orbit(self, gamma: CharOrbit) -> np.ndarray:
        return self.add(*[self.eps(c) for c in gamma.members])

    def fixed_sum(self, s: WeylElem) -> np.ndarray:
        """sum of epsilon_chi over chi with chi^s = chi."""
        return self.add(*[self.eps(c) for c in self.chars if c.act(s.perm, self.q) == c])

    def tau_star(self, s: WeylElem) -> np.ndarray:
        return self.add(self.tau(s), self.fixed_sum(s))

    def trivial_char(self) -> Character:
        return Character((0,) * self.n)

    # action on C
    def coefficients(self, x) -> dict:
        return {self.basis[i]: int(c) for i, c in enumerate(np.asarray(x)) if c}

    def apply(self, x, f) -> np.ndarray:
        return self.C.apply_combination(self.coefficients(x), f)

    def operator(self, x, B=None) -> np.ndarray:
        """Matrix of x on C, or on the stable subspace with basis columns B."""
        if B is None:
            return self.apply(x, np.eye(self.C.dim, dtype=np.int64))
        return la.coords(self.F, B, self.apply(x, B))

    def to_json(self) -> dict:
        d = self.algebra.to_json()
        d["basis"] = [{"perm": list(w.perm), "diag": list(w.diag), "length": w.length} for w in self.basis]
        d["n"], d["q"] = self.n, self.q
        return d


def path_a(C: PermModule, basis: list[WeylElem]) -> np.ndarray:
    """Structure constants by composing actions on C and reading values on Weyl cosets."""
    F = C.F
    d = len(basis)
    index = {w: i for i, w in enumerate(basis)}
    widx = np.array([C.index(w) for w in basis])
    label_idx = np.array([index[w] for w in C.labels])
    full = C.rows(range(C.dim))  # full[y, g] = index of U rep_y rep_g
    mult = np.zeros((d, d, d), dtype=np.int64)
    for j, w in enumerate(basis):
        Sw = np.array(C.support(w))
        for i, v in enumerate(basis):
            Sv = np.array(C.support(v))
            counts = np.bincount(full[np.ix_(Sv, Sw)].ravel(), minlength=C.dim) % F.p
            # the function is bi-U-invariant: constant on each double coset
            if not np.array_equal(counts, counts[widx[label_idx]]):
                raise StructureMismatch("convolution is not constant on double cosets")
            mult[i, j] = counts[widx]
    return mult


def path_b(F: GF, n: int, q: int, basis: list[WeylElem]) -> np.ndarray:
    """Structure constants by rewriting along reduced words with the length and quadratic relations."""
    index = {w: i for i, w in enumerate(basis)}
    d = len(basis)
    chars, _ = glnq.characters_and_orbits(n, q)
    T = glnq.torus(F, n)
    sign = 1 if n % 2 == 0 else F.neg(1)
    simple = [glnq.sl2_reflection(F, n, i) for i in range(n - 1)]
    inverse = [s.inverse(F) for s in simple]
    # tau_s^2 = -tau_s E_s, E_s = sum_{chi^s = chi} eps_chi = (-1)^n sum_t c_t tau_t
    square = []
    for s in simple:
        fixed = [c for c in chars if c.act(s.perm, q) == c]
        terms = {}
        for t in T:
            ct = 0
            for c in fixed:
                ct = F.add(ct, c.value(F, t))
            coeff = F.neg(F.mul(sign, ct))
            if coeff:
                terms[s.mul(F, glnq.torus_elem(t))] = coeff
        square.append(terms)

    def times_s(k: int, x: dict) -> dict:
        s = simple[k]
        out: dict = {}
        for y, c in x.items():
            sy = s.mul(F, y)
            if sy.length > y.length:
                out[sy] = F.add(out.get(sy, 0), c)
            else:
                # tau_s tau_y = tau_s^2 tau_{s^-1 y}
                rest = inverse[k].mul(F, y)
                for st, a in square[k].items():
                    z = st.mul(F, rest)
                    out[z] = F.add(out.get(z, 0), F.mul(a, c))
        return {k_: v for k_, v in out.items() if v}

    mult = np.zeros((d, d, d), dtype=np.int64)
    for i, v in enumerate(basis):
        word = glnq.reduced_word(v.perm)
        head = glnq.identity_weyl(n)
        for k in word:
            head = head.mul(F, simple[k])
        t_left = v.mul(F, head.inverse(F))
        if not t_left.is_torus():
            raise StructureMismatch("reduced word does not reach the finite part")
        for j, w in enumerate(basis):
            x = {w: 1}
            for k in reversed(word):
                x = times_s(k, x)
            for y, c in x.items():
                mult[i, j, index[t_left.mul(F, y)]] = c
    return mult


@lru_cache(maxsize=None)
def build_H(n: int, q: int) -> HeckeAlgebra:
    C = build_C(n, q)
    F = C.F
    basis = glnq.weyl_enumerate(F, n)
    A = path_a(C, basis)
    B = path_b(F, n, q, basis)
    if not np.array_equal(A, B):
        bad = int(np.sum(np.any(A != B, axis=2)))
        raise StructureMismatch(f"paths disagree on {bad} basis pairs")
    return HeckeAlgebra(n, q, C, basis, A, B)


def path_mismatches(n: int, q: int) -> int:
    C = build_C(n, q)
    basis = glnq.weyl_enumerate(C.F, n)
    A = path_a(C, basis)
    B = path_b(C.F, n, q, basis)
    return int(np.sum(np.any(A != B, axis=2)))


# ------------------------------------------------------------------ idempotents

@dataclass
class IdempotentSet:
    eps: dict          # Character -> element
    blocks: dict       # CharOrbit -> element


def idempotents(H: HeckeAlgebra) -> IdempotentSet:
    F, A = H.F, H.algebra
    eps = {c: H.eps(c) for c in H.chars}
    total = H.add(*eps.values())
    if not np.array_equal(total, H.unit):
        raise IdempotentCheckFailed("epsilons do not sum to the unit")
    keys = list(eps)
    E = np.stack([eps[c] for c in keys], axis=1)
    tori = list(H.torus())
    T = np.stack([H.tau(glnq.torus_elem(t)) for t in tori], axis=1)
    for a, c in enumerate(keys):
        e = eps[c]
        # right multiplication by each column at once: (e x) = L_e x
        L = A.left_matrix(e)
        prods = la.matmul(F, L, E)
        for b in range(len(keys)):
            want = e if b == a else np.zeros_like(e)
            if not np.array_equal(prods[:, b], want):
                raise IdempotentCheckFailed(
                    f"eps{c.exponents} is not idempotent" if b == a else "epsilons are not orthogonal")
        lhs = la.matmul(F, L, T)
        for j, t in enumerate(tori):
            if not np.array_equal(lhs[:, j], F.scal(F.inv(c.value(F, t)), e)):
                raise IdempotentCheckFailed("eps_chi tau_t != chi(t)^{-1} eps_chi")
    blocks = {g: H.eps_orbit(g) for g in H.orbits}
    G = np.stack(A.gens, axis=1)
    for g, e in blocks.items():
        if not np.array_equal(la.matmul(F, A.left_matrix(e), G), la.matmul(F, A.right_matrix(e), G)):
            raise IdempotentCheckFailed("block idempotent is not central")
    return IdempotentSet(eps, blocks)


# ------------------------------------------------------------------ C_chi and blocks

def torus_orbit_reps(C: PermModule) -> list[int]:
    """One coset per T-orbit (the smallest index), i.e. a basis of B\\G."""
    F = C.F
    perms = [C.torus_perm(t) for t in glnq.torus(F, C.n)]
    from .modalg import perm_orbits
    lab = perm_orbits(C.dim, perms)
    return [int(np.flatnonzero(lab == c)[0]) for c in range(lab.max() + 1)]


@lru_cache(maxsize=None)
def _orbit_reps(n: int, q: int) -> tuple:
    return tuple(torus_orbit_reps(build_C(n, q)))


def chi_basis(C: PermModule, chi: Character) -> np.ndarray:
    """Columns eps_chi 1_{Uy} for y over T-orbit representatives: a basis of C_chi."""
    F = C.F
    n = C.n
    reps = np.array(_orbit_reps(C.n, C.q))
    sign = 1 if n % 2 == 0 else F.neg(1)
    B = np.zeros((C.dim, len(reps)), dtype=np.int64)
    for t in glnq.torus(F, n):
        P = C.torus_perm(t)
        B[P[reps], np.arange(len(reps))] = F.mul(sign, chi.value(F, t))
    return B


def block_basis(C: PermModule, gamma: CharOrbit) -> np.ndarray:
    return np.concatenate([chi_basis(C, c) for c in gamma.members], axis=1)


def block_algebra(H: HeckeAlgebra, gamma: CharOrbit) -> tuple[Algebra, np.ndarray]:
    """H_gamma = H eps_gamma with basis tau_sigma eps_chi (sigma in W_0, chi in gamma)."""
    F = H.F
    vecs, labels = [], []
    for sigma in glnq.finite_weyl(H.n):
        ts = H.tau(WeylElem(sigma, (1,) * H.n))
        for c in gamma.members:
            vecs.append(H.mul(ts, H.eps(c)))
            labels.append((sigma, c.exponents))
    eg = H.eps_orbit(gamma)
    gens = [H.mul(H.tau(s), eg) for s in H.simple] + [H.eps(c) for c in gamma.members]
    alg, inc = subalgebra(H.algebra, vecs, eg, gens=gens, labels=labels,
                          name=f"H_gamma{gamma.members[0].exponents}")
    return alg, inc


def block_module(H: HeckeAlgebra, gamma: CharOrbit, block=None) -> tuple[Algebra, Module, np.ndarray]:
    """(H_gamma, C_gamma as left H_gamma-module, basis of C_gamma inside C).

    `block` may pass a precomputed block_algebra(H, gamma).
    """
    alg, inc = block if block is not None else block_algebra(H, gamma)
    B = block_basis(H.C, gamma)
    # generator matrices only; the rest follows from the basis words of H_gamma
    gens = [H.operator(la.matvec(H.F, inc, g), B) for g in alg.gens]
    mod = Module.from_generators(alg, gens, "left", name=f"C_gamma{gamma.members[0].exponents}")
    return alg, mod, B


def full_module(H: HeckeAlgebra) -> Module:
    """C as a left H-module."""
    I = np.eye(H.C.dim, dtype=np.int64)
    mats = np.stack([H.C.tau_apply(w, I) for w in H.basis])
    return Module(H.algebra, mats, "left", name="C")


# ------------------------------------------------------------------ H' and C'

@dataclass
class HPrime:
    n: int
    q: int
    algebra: Algebra       # basis S_sigma = tau_sigma eps_1, sigma in W_0
    C1: Module             # C' as a left module
    B: np.ndarray          # basis of C' inside C
    perms: list            # sigma for each basis element
    simple_idx: list       # basis index of S_i

    def S(self, i: int) -> np.ndarray:
        return self.algebra.e(self.simple_idx[i])

    @property
    def F(self) -> GF:
        return self.algebra.F


@lru_cache(maxsize=None)
def build_hprime(n: int, q: int) -> HPrime:
    """H' = H eps_1 realised by its faithful action on C' = eps_1 C."""
    C = build_C(n, q)
    F = C.F
    B = chi_basis(C, Character((0,) * n))
    ops = []
    for i in range(n - 1):
        s = glnq.simple_reflection(n, i)
        ops.append(la.coords(F, B, C.tau_apply(s, B)))
    perms = glnq.finite_weyl(n)
    k = B.shape[1]
    mats = []
    for sigma in perms:
        M = np.eye(k, dtype=np.int64)
        for j in glnq.reduced_word(sigma):
            M = la.matmul(F, M, ops[j])
        mats.append(M)
    flat = np.stack([M.reshape(-1) for M in mats], axis=1)
    rows, L = la.left_inverse(F, flat)
    d = len(perms)
    mult = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            P = la.matmul(F, mats[i], mats[j]).reshape(-1)
            x = la.matvec(F, L, P[rows])
            if not np.array_equal(la.matvec(F, flat, x), P):
                raise RelationFailure("H' operators not closed under products")
            mult[i, j] = x
    simple_idx = [perms.index(glnq.simple_reflection(n, i).perm) for i in range(n - 1)]
    unit = np.zeros(d, dtype=np.int64)
    unit[0] = 1
    m1 = F.neg(1)
    rels = [(f"S{i + 1}^2+S{i + 1}", [(1, (i, i)), (1, (i,))]) for i in range(n - 1)]
    if n == 3:
        rels.append(("braid", [(1, (0, 1, 0)), (m1, (1, 0, 1))]))
    gens = [np.eye(d, dtype=np.int64)[j] for j in simple_idx]
    alg = Algebra(F, mult, unit, gens=gens, labels=[str(s) for s in perms], relations=rels,
                  name=f"H'({n},{q})")
    alg.check()
    module = Module(alg, np.stack(mats), "left", name="C'")
    module.check()
    return HPrime(n, q, alg, module, B, perms, simple_idx)


def right_ideal(A: Algebra, x) -> np.ndarray:
    """Basis (columns) of x A."""
    L = A.left_matrix(x)
    return la.column_basis(A.F, L)


def right_ideal_module(A: Algebra, x) -> tuple[Module, np.ndarray]:
    """x A as a right A-module and its inclusion into A."""
    B = right_ideal(A, x)
    reg = A.regular_module("right")
    return reg.restrict(B, name="xA"), B


def character_module(A: Algebra, values: dict, side: str = "right") -> Module:
    """1-dim module in which generator i acts by values[i] (basis via words)."""
    gen_mats = [np.array([[values[i] % A.F.p if A.F.prime else values[i]]], dtype=np.int64)
                for i in range(len(A.gens))]
    return Module.from_generators(A, gen_mats, side=side, name=f"chi{tuple(values.values())}")


# ------------------------------------------------------------------ GL_3 quadruple

@dataclass
class GL3Quadruple:
    S1: np.ndarray
    S2: np.ndarray
    S1s: np.ndarray
    S2s: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    Om: np.ndarray
    socles: dict
    ideal_dims: dict


def gl3_quadruple(Hp: HPrime) -> GL3Quadruple:
    A, F = Hp.algebra, Hp.F
    if Hp.n != 3:
        raise RelationFailure("the quadruple is defined for GL_3")
    m1 = F.neg(1)
    S1, S2 = Hp.S(0), Hp.S(1)
    e1 = A.unit
    S1s, S2s = A.add(S1, e1), A.add(S2, e1)
    X = F.scal(m1, A.mul(S1, S2, S1))
    # with the opposite sign Y^2 = -Y, so only this one is idempotent when p is odd
    Y = A.mul(S1, S2s, S1)
    Z = F.scal(m1, A.mul(S1s, S2, S1s))
    Om = A.mul(S1s, S2s, S1s)

    def eq(a, b, what):
        if not np.array_equal(a, b):
            raise RelationFailure(what)

    eq(A.mul(S1, S2, S1), A.mul(S2, S1, S2), "braid relation")
    eq(A.add(A.mul(S1, S1), S1), np.zeros(A.dim, dtype=np.int64), "S1^2 + S1 = 0")
    eq(A.add(A.mul(S2, S2), S2), np.zeros(A.dim, dtype=np.int64), "S2^2 + S2 = 0")
    quad = {"X": X, "Y": Y, "Z": Z, "Omega": Om}
    for a, x in quad.items():
        eq(A.mul(x, x), x, f"{a} idempotent")
        for b, y in quad.items():
            if a != b and np.any(A.mul(x, y)):
                raise RelationFailure(f"{a}{b} != 0")
    eq(A.add(X, Y, Z, Om), e1, "X + Y + Z + Omega = eps_1")
    for a in ("X", "Omega"):
        for g in (S1, S2):
            eq(A.mul(quad[a], g), A.mul(g, quad[a]), f"{a} central")
    eq(A.mul(Y, S2), A.mul(S2s, Z), "Y S2 = S2* Z")
    eq(A.mul(S2, Y), A.mul(Z, S2s), "S2 Y = Z S2*")
    socles, dims = {}, {}
    chars = {(a1, a2): character_module(A, {0: a1, 1: a2}, "right")
             for a1 in (0, m1) for a2 in (0, m1)}
    for name, x in quad.items():
        ideal, _ = right_ideal_module(A, x)
        dims[name] = ideal.dim
        found = []
        for (a1, a2), chi in chars.items():
            if hom_space(chi, ideal):
                found.append((0 if a1 == 0 else -1, 0 if a2 == 0 else -1))
        socles[name] = found
    return GL3Quadruple(S1, S2, S1s, S2s, X, Y, Z, Om, socles, dims)


def rank_of(Hp_or_H, x, target="C'") -> int:
    """Rank of the action of x on C' (for an HPrime) or on C / a subspace basis (for H)."""
    if isinstance(Hp_or_H, HPrime):
        return la.rank(Hp_or_H.F, Hp_or_H.C1.act(x))
    H = Hp_or_H
    if isinstance(target, str) and target == "C":
        return la.rank(H.F, H.operator(x))
    if isinstance(target, Character):
        return la.rank(H.F, H.operator(x, chi_basis(H.C, target)))
    return la.rank(H.F, H.operator(x, target))


# ------------------------------------------------------------------ special elements

@dataclass
class SpecialElements:
    one_G: np.ndarray
    product: np.ndarray  # (-1)^m tau*_{s_{i_1}} ... tau*_{s_{i_m}} eps_1
    product_is_one_G: bool
    st: np.ndarray
    tau_star: dict
    word: list           # i_1, ..., i_m with w_0 = s_{i_m} ... s_{i_1}
    lemma_chain: list    # per j: True when eps_1 lies in the stated sum


def special_elements(H: HeckeAlgebra, strict: bool = True) -> SpecialElements:
    """1_G, st, tau*_s and the membership chain for eps_1.

    The signed product of the tau* along a reduced word of w_0 equals
    (-1)^(m+n) 1_G, so it is 1_G exactly when m + n is even or p = 2.
    With strict=False a mismatch by that sign is reported, not raised.
    """
    F, A = H.F, H.algebra
    n = H.n
    m = n * (n - 1) // 2
    e1 = H.eps(H.trivial_char())
    stars = {i: H.tau_star(s) for i, s in enumerate(H.simple)}
    for i, s in enumerate(H.simple):
        ts = H.tau(s)
        if np.any(H.mul(ts, stars[i])) or np.any(H.mul(stars[i], ts)):
            raise IdentityFailure("tau_s tau_s* != 0")
    word = glnq.reduced_word(glnq.longest_perm(n))  # read as i_1, ..., i_m
    prod = A.unit
    for i in word:
        prod = H.mul(prod, stars[i])
    prod = H.mul(prod, e1)
    sign = 1 if m % 2 == 0 else F.neg(1)
    product = F.scal(sign, prod)
    one_G = np.ones(H.dim, dtype=np.int64)
    matches = bool(np.array_equal(product, one_G))
    if not matches and (strict or not np.array_equal(product, F.vneg(one_G))):
        raise IdentityFailure("product formula is not the characteristic function of G")
    w0 = WeylElem(glnq.longest_perm(n), (1,) * n)
    st = H.mul(H.tau(w0), e1)
    for s in H.simple:
        if not np.array_equal(H.mul(st, H.tau(s)), F.vneg(st)):
            raise IdentityFailure("tau_{w0} tau_s eps_1 != -tau_{w0} eps_1")
    chain = []
    for j in range(1, m + 1):
        # w = s_{i_j} ... s_{i_1}
        perm = tuple(range(n))
        for i in word[:j]:
            perm = glnq.perm_compose(glnq.simple_reflection(n, i).perm, perm)
        lead = F.scal(1 if j % 2 == 0 else F.neg(1), H.mul(H.tau(WeylElem(perm, (1,) * n)), e1))
        target = A.sub(e1, lead)
        span = np.concatenate([right_ideal(A, H.mul(stars[i], e1)) for i in word[:j]], axis=1)
        ok = la.Subspace(F, H.dim, span.T).contains(target)
        chain.append(ok)
    if not all(chain):
        raise IdentityFailure("membership chain fails")
    return SpecialElements(one_G, product, matches, st, stars, word, chain)


@dataclass
class SteinbergDims:
    st_group: int        # dim of C' modulo the G-spans of the 1_P, P minimal parabolic
    st_tensor: int       # dim st (x)_{H'} C'
    map_rank: int        # rank of st (x)_{H'} C' -> C'
    expected: int        # q^{n(n-1)/2}

    @property
    def injective(self) -> bool:
        return self.st_group == self.st_tensor == self.expected


def steinberg_dims(n: int, q: int) -> SteinbergDims:
    """Compare St (built from parabolic inductions in C) with st (x)_{H'} C'."""
    from .modalg import group_closure, tensor_over_algebra
    C = build_C(n, q)
    F = C.F
    Hp = build_hprime(n, q)
    # group side: 1_{B u BsB} as a function on U\G, then its G-span
    vecs = []
    for i in range(n - 1):
        s = glnq.simple_reflection(n, i).perm
        mask = np.array([w.perm in (s, tuple(range(n))) for w in C.cs.labels])
        vecs.append(mask.astype(np.int64))
    span = group_closure(F, C.dim, C.group_perms(), np.stack(vecs, axis=1))
    st_group = Hp.B.shape[1] - span.shape[1]
    # algebra side: the sign character of H' as the right ideal tau_{w0} H'
    A = Hp.algebra
    w0 = Hp.perms.index(glnq.longest_perm(n))
    st, inc = right_ideal_module(A, A.e(w0))
    res = tensor_over_algebra(st, Hp.C1, inclusion=inc)
    return SteinbergDims(st_group, res.dim, res.map_rank, q ** (n * (n - 1) // 2))
