"""Standard Levi subgroups, parabolic induction and restriction, and the
comparison maps between C, C_M, H and H_M."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import permutations

import numpy as np

from . import glnq
from . import linalg as la
from . import umod
from .errors import (AdjunctionFailure, CriterionMismatch, FreenessFailure, NotIso,
                     RelationFailure, TooLarge)
from .gf import GF
from .glnq import WeylElem
from .modalg import (Algebra, Module, check_exact, coinvariants_quotient, group_closure,
                     hom_group, invariants_subspace, is_projective, quotient_maps,
                     tensor_over_algebra, tensor_relations)

MAX_INDUCED_DIM = 10 ** 5
MAX_TENSOR = 5000


# ------------------------------------------------------------------ Levi data

@dataclass(frozen=True)
class LeviSpec:
    n: int
    composition: tuple

    def __post_init__(self):
        if sum(self.composition) != self.n or any(c <= 0 for c in self.composition):
            raise ValueError(f"{self.composition} is not a composition of {self.n}")

    @cached_property
    def block_of(self) -> tuple:
        out = []
        for b, size in enumerate(self.composition):
            out += [b] * size
        return tuple(out)

    @cached_property
    def starts(self) -> tuple:
        return tuple(int(x) for x in np.cumsum((0,) + self.composition[:-1]))

    def same_block(self, i: int, j: int) -> bool:
        return self.block_of[i] == self.block_of[j]

    @property
    def positive_roots(self) -> list:
        """Positive roots of M as pairs (i, j), i < j, standing for e_i - e_j."""
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.same_block(i, j)]

    @property
    def n_positions(self) -> list:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if not self.same_block(i, j)]

    @property
    def simple(self) -> list:
        return [i for i in range(self.n - 1) if self.same_block(i, i + 1)]

    def in_W0M(self, perm) -> bool:
        return all(self.same_block(i, perm[i]) for i in range(self.n))

    @property
    def W0M(self) -> list:
        return [s for s in glnq.finite_weyl(self.n) if self.in_W0M(s)]

    # membership of matrices
    def in_P(self, g) -> bool:
        g = np.asarray(g)
        return all(g[i, j] == 0 for i in range(self.n) for j in range(self.n)
                   if self.block_of[i] > self.block_of[j])

    def in_M(self, g) -> bool:
        g = np.asarray(g)
        return all(g[i, j] == 0 for i in range(self.n) for j in range(self.n) if not self.same_block(i, j))

    def in_N(self, g) -> bool:
        g = np.asarray(g)
        if not self.in_P(g):
            return False
        return all(g[i, j] == (1 if i == j else 0)
                   for i in range(self.n) for j in range(self.n) if self.same_block(i, j))

    def in_U_M(self, g) -> bool:
        return self.in_M(g) and glnq.is_unipotent_upper(g)

    def levi_part(self, g) -> np.ndarray:
        g = np.asarray(g)
        out = np.zeros_like(g)
        for i in range(self.n):
            for j in range(self.n):
                if self.same_block(i, j):
                    out[i, j] = g[i, j]
        return out

    # generators
    def generators_M(self, F: GF) -> list:
        gens = []
        for i in range(self.n):
            d = [1] * self.n
            d[i] = F.gen
            gens.append(glnq.diag(d))
        for i in self.simple:
            perm = list(range(self.n))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            gens.append(glnq.perm_matrix(perm))
            gens.append(glnq.elementary(F, self.n, i, i + 1, 1))
            gens.append(glnq.elementary(F, self.n, i + 1, i, 1))
        return gens

    def generators_N(self, F: GF) -> list:
        return glnq.root_subgroup_generators(F, self.n, self.n_positions)

    def generators_U_M(self, F: GF) -> list:
        return glnq.root_subgroup_generators(F, self.n, self.positive_roots)

    def check_u_decomposition(self, q: int, samples: int = 50, seed: int = 0) -> bool:
        """U = U_M N: cardinalities multiply and sampled products of U_M and N lie in U."""
        F = glnq.field_of_order(q)
        n = self.n
        ok = len(self.positive_roots) + len(self.n_positions) == n * (n - 1) // 2
        U = glnq.enumerate_subgroup(F, glnq.unipotent_generators(F, n), n)
        UM = _subgroup(F, self.generators_U_M(F), n)
        Nn = _subgroup(F, self.generators_N(F), n)
        ok &= len(U) == len(UM) * len(Nn)
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            x = glnq.bmatmul(F, UM[rng.integers(len(UM))], Nn[rng.integers(len(Nn))])
            ok &= glnq.is_unipotent_upper(x) and self.in_P(x)
        return bool(ok)

    def label(self) -> str:
        return "x".join(f"GL{c}" for c in self.composition)


def _subgroup(F: GF, gens, n: int) -> np.ndarray:
    return glnq.enumerate_subgroup(F, gens, n) if gens else glnq.identity(n)[None]


def levi(n: int, composition) -> LeviSpec:
    return LeviSpec(n, tuple(int(c) for c in composition))


def levi_from_name(n: int, name: str) -> LeviSpec:
    """'T', 'G' or a composition such as '2,1'."""
    if name == "T":
        return levi(n, (1,) * n)
    if name == "G":
        return levi(n, (n,))
    return levi(n, [int(x) for x in name.split(",")])


# ------------------------------------------------------------------ D_M

@dataclass
class DMSet:
    reps: list                 # permutations
    by_scan: list
    by_roots: list
    sd_pairs: int

    def elems(self, n: int) -> list:
        return [WeylElem(d, (1,) * n) for d in self.reps]


def _root_image_positive(perm, i: int, j: int) -> bool:
    return perm[i] < perm[j]


def dm_reps(spec: LeviSpec) -> DMSet:
    """Minimal-length representatives of W_0 / W_{0,M}, found by scanning cosets and by the root criterion."""
    n = spec.n
    W0 = glnq.finite_weyl(n)
    W0M = spec.W0M
    seen, by_scan = set(), []
    for w in W0:
        if w in seen:
            continue
        coset = [glnq.perm_compose(w, x) for x in W0M]
        seen.update(coset)
        lmin = min(glnq.perm_length(c) for c in coset)
        mins = [c for c in coset if glnq.perm_length(c) == lmin]
        if len(mins) != 1:
            raise CriterionMismatch("minimal length element of a coset is not unique")
        by_scan.append(mins[0])
    for d in by_scan:
        for w in W0M:
            if glnq.perm_length(glnq.perm_compose(d, w)) != glnq.perm_length(d) + glnq.perm_length(w):
                raise CriterionMismatch("length is not additive on d W_M")
    by_roots = [d for d in W0 if all(_root_image_positive(d, i, j) for i, j in spec.positive_roots)]
    if sorted(by_scan) != sorted(by_roots):
        raise CriterionMismatch("scan and root criterion disagree")
    reps = sorted(by_scan, key=lambda s: (glnq.perm_length(s), s))
    dset = set(reps)
    pairs = 0
    for i in range(n - 1):
        s = glnq.simple_reflection(n, i).perm
        for d in reps:
            sd = glnq.perm_compose(s, d)
            pairs += 1
            if glnq.perm_length(sd) < glnq.perm_length(d):
                if sd not in dset:
                    raise CriterionMismatch("length-decreasing sd left D_M")
            else:
                rest = glnq.perm_compose(glnq.perm_inverse(d), sd)
                if sd not in dset and not spec.in_W0M(rest):
                    raise CriterionMismatch("length-increasing sd is neither in D_M nor in d W_M")
    return DMSet(reps, sorted(by_scan), sorted(by_roots), pairs)


# ------------------------------------------------------------------ C_M and H_M

class LeviModule:
    """C_M on U_M\\M; its canonical representatives are the block-diagonal ones among those of U\\G."""

    def __init__(self, spec: LeviSpec, q: int):
        self.spec = spec
        self.C = umod.build_C(spec.n, q)
        self.F = self.C.F
        self.n, self.q = spec.n, q
        cs = self.C.cs
        reps = glnq.enumerate_cosets(self.F, spec.n, spec.generators_M(self.F))
        self.g_idx = np.sort(cs.index_of(reps))
        self.dim = len(self.g_idx)
        self.loc = -np.ones(len(cs), dtype=np.int64)
        self.loc[self.g_idx] = np.arange(self.dim)
        self._labels = [cs.labels[g] for g in self.g_idx]
        self._full = None

    @property
    def labels(self) -> list:
        return self._labels

    def rows(self, ys) -> np.ndarray:
        if self._full is None:
            tab = self.C.cs.products(self.g_idx, self.g_idx)
            full = self.loc[tab]
            if np.any(full < 0):
                raise RelationFailure("U_M\\M is not closed under products")
            self._full = full
        return self._full[np.asarray(list(ys), dtype=np.int64)]

    def support(self, w: WeylElem) -> list:
        return [i for i, l in enumerate(self._labels) if l == w]

    def index(self, w: WeylElem) -> int:
        return int(self.loc[self.C.cs.index_of_weyl(w)])

    def m_perm(self, m) -> np.ndarray:
        """Index array of the right action m . 1_{U_M h} = 1_{U_M h m^-1}."""
        P = self.C.g_perm(m)[self.g_idx]
        out = self.loc[P]
        if np.any(out < 0):
            raise RelationFailure("element does not normalise U_M\\M")
        return out

    def m_matrix(self, m) -> np.ndarray:
        P = self.m_perm(m)
        A = np.zeros((self.dim, self.dim), dtype=np.int64)
        A[P, np.arange(self.dim)] = 1
        return A

    def tau_matrix(self, w: WeylElem) -> np.ndarray:
        R = self.rows(self.support(w))
        A = np.zeros((self.dim, self.dim), dtype=np.int64)
        cols = np.tile(np.arange(self.dim), R.shape[0])
        np.add.at(A, (R.ravel(), cols), 1)
        return A % self.F.p

    def inclusion(self) -> np.ndarray:
        """i_M: C_M -> C, 1_{U_M m} -> 1_{U m}."""
        A = np.zeros((self.C.dim, self.dim), dtype=np.int64)
        A[self.g_idx, np.arange(self.dim)] = 1
        return A


@dataclass
class LeviHecke:
    spec: LeviSpec
    H: umod.HeckeAlgebra
    CM: LeviModule
    basis: list           # W_M
    algebra: Algebra      # H_M
    module: Module        # C_M as a left H_M-module
    j: np.ndarray         # H.dim x H_M.dim
    D: DMSet

    @property
    def F(self) -> GF:
        return self.H.F


@lru_cache(maxsize=None)
def levi_hecke(n: int, q: int, composition: tuple) -> LeviHecke:
    spec = levi(n, composition)
    H = umod.build_H(n, q)
    F = H.F
    CM = LeviModule(spec, q)
    basis = [w for w in H.basis if spec.in_W0M(w.perm)]
    mult = umod.path_a(CM, basis)
    idx = {w: i for i, w in enumerate(basis)}
    d = len(basis)
    unit = np.zeros(d, dtype=np.int64)
    unit[idx[glnq.identity_weyl(n)]] = 1
    gens = [np.eye(d, dtype=np.int64)[idx[glnq.sl2_reflection(F, n, i)]] for i in spec.simple]
    if q > 2:
        gens += [np.eye(d, dtype=np.int64)[idx[t]] for t in H.torus_gens]
    alg = Algebra(F, mult, unit, gens=gens or None, labels=[str(w) for w in basis],
                  name=f"H_{spec.label()}")
    alg.check()
    module = Module(alg, np.stack([CM.tau_matrix(w) for w in basis]), "left", name="C_M")
    module.check()
    j = np.zeros((H.dim, d), dtype=np.int64)
    for b, w in enumerate(basis):
        j[H.index[w], b] = 1
    # j_M is multiplicative on all basis pairs
    for a in range(d):
        for b in range(d):
            if not np.array_equal(la.matvec(F, j, alg.mul(alg.e(a), alg.e(b))),
                                  H.mul(j[:, a], j[:, b])):
                raise RelationFailure("j_M is not an algebra homomorphism")
    return LeviHecke(spec, H, CM, basis, alg, module, j, dm_reps(spec))


def _lh(spec: LeviSpec, q: int) -> LeviHecke:
    return levi_hecke(spec.n, q, spec.composition)


# ------------------------------------------------------------------ freeness

@dataclass
class FreenessReport:
    rank_right: int
    rank_left: int
    expected: int
    product_pairs: int

    @property
    def free(self) -> bool:
        return self.rank_right == self.rank_left == self.expected


def freeness_check(spec: LeviSpec, q: int) -> FreenessReport:
    L = _lh(spec, q)
    H, F = L.H, L.F
    ds = L.D.elems(spec.n)
    pairs = 0
    for d in ds:
        for w in L.basis:
            pairs += 1
            if not np.array_equal(H.mul(H.tau(d), H.tau(w)), H.tau(d.mul(F, w))):
                raise FreenessFailure("tau_d tau_w != tau_dw")
    right = [H.mul(H.tau(d), L.j[:, b]) for d in ds for b in range(L.algebra.dim)]
    left = [H.mul(L.j[:, b], H.tau(d.inverse(F))) for d in ds for b in range(L.algebra.dim)]
    rr = la.rank(F, np.stack(right, axis=1))
    rl = la.rank(F, np.stack(left, axis=1))
    rep = FreenessReport(rr, rl, H.dim, pairs)
    if len(right) != H.dim or not rep.free:
        raise FreenessFailure(f"rank {rr}/{rl} for {len(right)} products, dim H = {H.dim}")
    return rep


# ------------------------------------------------------------------ double cosets of P

@dataclass
class Lemma38Report:
    checked: dict
    violations: dict

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())


def lemma38_check(spec: LeviSpec, q: int) -> Lemma38Report:
    F = glnq.field_of_order(q)
    n = spec.n
    U = glnq.enumerate_subgroup(F, glnq.unipotent_generators(F, n), n)
    UM = glnq.enumerate_subgroup(F, spec.generators_U_M(F), n) if spec.positive_roots \
        else glnq.identity(n)[None]
    Nn = glnq.enumerate_subgroup(F, spec.generators_N(F), n) if spec.n_positions \
        else glnq.identity(n)[None]
    lower = [(j, i) for i, j in spec.positive_roots]
    UMminus = glnq.enumerate_subgroup(F, glnq.root_subgroup_generators(F, n, lower), n) if lower \
        else glnq.identity(n)[None]
    UM_keys = {x.tobytes() for x in UM}
    checked = {"1": 0, "2": 0, "3": 0}
    viol = {"1": 0, "2": 0, "3": 0}
    for dperm in dm_reps(spec).reps:
        d = glnq.perm_matrix(dperm)
        di = glnq.mat_inverse(F, d)
        for u in UM:
            checked["1"] += 1
            if not glnq.is_unipotent_upper(glnq.bmatmul(F, glnq.bmatmul(F, d, u), di)):
                viol["1"] += 1
        for u in UMminus:
            checked["1"] += 1
            x = glnq.bmatmul(F, glnq.bmatmul(F, d, u), di)
            if not glnq.is_unipotent_upper(x.T):
                viol["1"] += 1
        conj = glnq.bmatmul(F, glnq.bmatmul(F, di[None], U), d[None])
        for x in conj:
            checked["2"] += 1
            if spec.in_P(x) and not glnq.is_unipotent_upper(x):
                viol["2"] += 1
        found = set()
        for x in conj:
            prods = glnq.bmatmul(F, x[None], Nn)
            for y in prods:
                checked["3"] += 1
                if spec.in_M(y):
                    found.add(y.tobytes())
        if found != UM_keys:
            viol["3"] += 1
    return Lemma38Report(checked, viol)


# ------------------------------------------------------------------ representations

class Rep:
    """A finite-dimensional representation given by a matrix for each group element."""

    F: GF
    dim: int

    def mat(self, g) -> np.ndarray:
        raise NotImplementedError

    def mats(self, gens) -> list:
        return [self.mat(g) for g in gens]


class MatrixFnRep(Rep):
    def __init__(self, F: GF, dim: int, fn, name: str = "V"):
        self.F, self.dim, self._fn, self.name = F, dim, fn, name

    def mat(self, g) -> np.ndarray:
        return self._fn(np.asarray(g, dtype=np.int64))


def trivial_rep(F: GF, name: str = "1") -> Rep:
    return MatrixFnRep(F, 1, lambda g: np.ones((1, 1), dtype=np.int64), name)


def det_rep(F: GF, spec: LeviSpec, block: int, power: int = 1) -> Rep:
    """The character m -> det(m_block)^power of M."""
    lo = spec.starts[block]
    hi = lo + spec.composition[block]

    def fn(g):
        return np.array([[F.pow(glnq.det(F, g[lo:hi, lo:hi]), power)]], dtype=np.int64)
    return MatrixFnRep(F, 1, fn, f"det{block}^{power}")


def c_rep(C: umod.PermModule) -> Rep:
    return MatrixFnRep(C.F, C.dim, C.g_matrix, "C")


def cm_rep(L: LeviHecke) -> Rep:
    return MatrixFnRep(L.F, L.CM.dim, L.CM.m_matrix, "C_M")


def sub_rep(V: Rep, B) -> Rep:
    B = np.asarray(B, dtype=np.int64)
    rows, Linv = la.left_inverse(V.F, B)

    def fn(g):
        Y = la.matmul(V.F, V.mat(g), B)
        X = la.matmul(V.F, Linv, Y[rows])
        if not np.array_equal(la.matmul(V.F, B, X), Y):
            raise RelationFailure("subspace is not stable")
        return X
    return MatrixFnRep(V.F, B.shape[1], fn, f"sub({getattr(V, 'name', 'V')})")


def quotient_rep(V: Rep, S) -> tuple[Rep, np.ndarray]:
    P, lift = quotient_maps(V.F, V.dim, S)
    fn = lambda g: la.matmul(V.F, P, la.matmul(V.F, V.mat(g), lift))  # noqa: E731
    return MatrixFnRep(V.F, P.shape[0], fn, f"quot({getattr(V, 'name', 'V')})"), P


class ParabolicCosets:
    """Representatives of P\\G, keyed by the flag of row spans of the lower row blocks."""

    def __init__(self, spec: LeviSpec, F: GF):
        self.spec, self.F = spec, F
        n = spec.n
        start = glnq.identity(n)
        self.reps = [start]
        self._index = {self.key(start): 0}
        frontier = [start]
        gens = glnq.group_generators(F, n)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = glnq.bmatmul(F, x, g)
                    k = self.key(y)
                    if k not in self._index:
                        self._index[k] = len(self.reps)
                        self.reps.append(y)
                        nxt.append(y)
            frontier = nxt
        self.inv = [glnq.mat_inverse(F, r) for r in self.reps]

    def __len__(self):
        return len(self.reps)

    def key(self, g) -> bytes:
        parts = []
        for b in range(1, len(self.spec.composition)):
            R, _ = la.rref(self.F, np.asarray(g)[self.spec.starts[b]:])
            parts.append(R.tobytes())
        return b"|".join(parts)

    def index(self, g) -> int:
        return self._index[self.key(g)]

    def decompose(self, g) -> tuple[int, np.ndarray]:
        """(k, m) with g = m n rep_k, m in M, n in N."""
        k = self.index(g)
        p = glnq.bmatmul(self.F, g, self.inv[k])
        if not self.spec.in_P(p):
            raise RelationFailure("coset decomposition left P")
        return k, self.spec.levi_part(p)


@lru_cache(maxsize=None)
def parabolic_cosets(n: int, q: int, composition: tuple) -> ParabolicCosets:
    return ParabolicCosets(levi(n, composition), glnq.field_of_order(q))


class InducedRep(Rep):
    """I_P(V) on functions P\\G -> V; coordinates are the values at the representatives."""

    def __init__(self, V: Rep, spec: LeviSpec, q: int):
        self.V, self.spec, self.F = V, spec, V.F
        self.pc = parabolic_cosets(spec.n, q, spec.composition)
        self.k = len(self.pc)
        self.dim = self.k * V.dim
        if self.dim > MAX_INDUCED_DIM:
            raise TooLarge(f"dim I_P(V) = {self.dim}")
        self.name = f"I_P({getattr(V, 'name', 'V')})"

    def mat(self, g) -> np.ndarray:
        v = self.V.dim
        A = np.zeros((self.dim, self.dim), dtype=np.int64)
        for k, r in enumerate(self.pc.reps):
            k2, m = self.pc.decompose(glnq.bmatmul(self.F, r, g))
            A[k * v:(k + 1) * v, k2 * v:(k2 + 1) * v] = self.V.mat(m)
        return A

    def induced_map(self, f) -> np.ndarray:
        """I_P(f) for an M-map f : V -> V'."""
        return np.kron(np.eye(self.k, dtype=np.int64), np.asarray(f, dtype=np.int64))


def induce(V: Rep, spec: LeviSpec, q: int) -> InducedRep:
    return InducedRep(V, spec, q)


def is_equivariant(F: GF, V: Rep, W: Rep, X, gens) -> bool:
    return all(np.array_equal(la.matmul(F, X, V.mat(g)), la.matmul(F, W.mat(g), X)) for g in gens)


@dataclass
class InduceReport:
    dim: int
    expected: int
    exact: bool
    defects: list


def induction_exactness(V: Rep, S, spec: LeviSpec, q: int) -> InduceReport:
    """Induce 0 -> S -> V -> V/S -> 0 and test exactness and equivariance of the induced maps."""
    F = V.F
    S = np.asarray(S, dtype=np.int64)
    Vs = sub_rep(V, S)
    Vq, P = quotient_rep(V, S)
    IS, IV, IQ = induce(Vs, spec, q), induce(V, spec, q), induce(Vq, spec, q)
    f, g = IV.induced_map(S), IV.induced_map(P)
    gens = glnq.group_generators(F, spec.n)
    if not (is_equivariant(F, IS, IV, f, gens) and is_equivariant(F, IV, IQ, g, gens)):
        raise RelationFailure("induced maps are not G-equivariant")
    maps = [np.zeros((IS.dim, 0), dtype=np.int64), f, g, np.zeros((0, IQ.dim), dtype=np.int64)]
    rep = check_exact(F, maps)
    return InduceReport(IV.dim, len(IV.pc) * V.dim, rep.exact, rep.defects)


# ------------------------------------------------------------------ right Hecke actions on invariants

def right_hecke_action(H: umod.HeckeAlgebra, W: Rep, B) -> np.ndarray:
    """Matrices of v -> v tau_w = sum_{y in U\\UwU} y^-1 v on W^U (basis columns B)."""
    F, cs = H.F, H.C.cs
    mats = []
    for w in H.basis:
        total = np.zeros((W.dim, W.dim), dtype=np.int64)
        for y in H.C.support(w):
            total = F.vadd(total, W.mat(glnq.mat_inverse(F, cs.reps[y])))
        mats.append(la.coords(F, B, la.matmul(F, total, B)))
    return np.stack(mats)


def right_levi_action(L: LeviHecke, V: Rep, B) -> np.ndarray:
    """The same for H_M acting on V^{U_M}."""
    F, cs = L.F, L.H.C.cs
    mats = []
    for w in L.basis:
        total = np.zeros((V.dim, V.dim), dtype=np.int64)
        for y in L.CM.support(w):
            total = F.vadd(total, V.mat(glnq.mat_inverse(F, cs.reps[L.CM.g_idx[y]])))
        mats.append(la.coords(F, B, la.matmul(F, total, B)))
    return np.stack(mats)


# ------------------------------------------------------------------ xi_P

@dataclass
class XiReport:
    tensor_dim: int
    invariants_dim: int
    map_rank: int
    inverse_formula_ok: bool
    h_linear: bool
    m_equivariant: bool

    @property
    def bijective(self) -> bool:
        return self.tensor_dim == self.invariants_dim == self.map_rank


def xi_P_check(spec: LeviSpec, q: int) -> XiReport:
    """H (x)_{H_M} C_M -> C^N, h (x) c -> h * i_M(c)."""
    L = _lh(spec, q)
    H, F, C = L.H, L.F, L.H.C
    A = L.algebra
    # H as a right H_M-module through j_M
    if H.dim * L.CM.dim > MAX_TENSOR:
        raise TooLarge(f"tensor space of dimension {H.dim * L.CM.dim}")
    Hr = Module(A, np.stack([H.algebra.right_matrix(L.j[:, b]) for b in range(A.dim)]), "right", "H")
    iM = L.CM.inclusion()
    phi = np.concatenate([H.apply(H.algebra.e(i), iM) for i in range(H.dim)], axis=1)
    res = tensor_over_algebra(Hr, L.module, phi=phi)
    Npos = spec.generators_N(F)
    CN = invariants_subspace(F, C.dim, [C.g_perm(x) for x in Npos])
    inside = la.Subspace(F, C.dim, CN.T)
    if not all(inside.contains(v) for v in phi.T):
        raise NotIso("image of xi_P is not N-invariant")
    # 1_{U d m N} = tau_d (1_{U m})
    Nelems = glnq.enumerate_subgroup(F, Npos, spec.n) if Npos else glnq.identity(spec.n)[None]
    ok = True
    for d in L.D.elems(spec.n):
        dm = H.index[d]
        for j in range(L.CM.dim):
            col = phi[:, dm * L.CM.dim + j]
            g = glnq.bmatmul(F, d.mat(), C.cs.reps[L.CM.g_idx[j]])
            support = np.unique(C.cs.index_of(glnq.bmatmul(F, g[None], Nelems)))
            ok &= bool(np.array_equal(col, C.indicator(support)))
    # H-linearity on generators and M-equivariance on generators
    h_lin = True
    for g in H.algebra.gens:
        for i in range(H.dim):
            lhs = H.apply(H.mul(g, H.algebra.e(i)), iM)
            rhs = H.apply(g, H.apply(H.algebra.e(i), iM))
            h_lin &= bool(np.array_equal(lhs, rhs))
    m_eq = all(np.array_equal(la.matmul(F, iM, L.CM.m_matrix(m)), la.matmul(F, C.g_matrix(m), iM))
               for m in spec.generators_M(F))
    rep = XiReport(res.dim, CN.shape[1], res.map_rank, ok, h_lin, m_eq)
    if not (rep.bijective and ok and h_lin and m_eq):
        raise NotIso(f"xi_P fails: {rep}")
    return rep


# ------------------------------------------------------------------ psi basis

@dataclass
class PsiReport:
    invariants_dim: int
    expected: int
    shift_rule: bool
    levi_rule: bool
    tensor_dim: int
    map_rank: int

    @property
    def bijective(self) -> bool:
        return self.tensor_dim == self.map_rank == self.invariants_dim == self.expected


def psi_function(I: InducedRep, dperm, x, U) -> np.ndarray:
    """The U-invariant function of support P d U with value x at d."""
    F, v = I.F, I.V.dim
    d = glnq.perm_matrix(dperm)
    f = np.zeros(I.dim, dtype=np.int64)
    seen = {}
    for u in U:
        k, m = I.pc.decompose(glnq.bmatmul(F, d, u))
        # d u = m n rep_k, so f(rep_k) = m^-1 . f(d u) = m^-1 x
        val = la.matvec(F, I.V.mat(glnq.mat_inverse(F, m)), x)
        if k in seen and not np.array_equal(seen[k], val):
            raise NotIso("psi is not well defined")
        seen[k] = val
        f[k * v:(k + 1) * v] = val
    return f


def psi_basis_check(V: Rep, spec: LeviSpec, q: int) -> PsiReport:
    L = _lh(spec, q)
    H, F = L.H, L.F
    n = spec.n
    I = induce(V, spec, q)
    Ugens = glnq.unipotent_generators(F, n)
    U = glnq.enumerate_subgroup(F, Ugens, n)
    BU = invariants_subspace(F, I.dim, I.mats(Ugens))
    VUM = invariants_subspace(F, V.dim, V.mats(spec.generators_U_M(F))) if spec.positive_roots \
        else np.eye(V.dim, dtype=np.int64)
    right_I = right_hecke_action(H, I, BU)
    right_V = right_levi_action(L, V, VUM)

    def coords(f):
        return la.coords(F, BU, f.reshape(-1, 1))[:, 0]

    ident = tuple(range(n))
    psi1 = [coords(psi_function(I, ident, x, U)) for x in VUM.T]
    # psi_{1,x} tau_{d} = psi_{d,x} for d in D'_M = {d^-1}
    shift_rule = True
    for dperm in L.D.reps:
        dinv = glnq.perm_inverse(dperm)
        w = WeylElem(dinv, (1,) * n)
        for a, x in enumerate(VUM.T):
            lhs = la.matvec(F, right_I[H.index[w]], psi1[a])
            rhs = coords(psi_function(I, dinv, x, U))
            shift_rule &= bool(np.array_equal(lhs, rhs))
    # psi_{1,x} tau_w = psi_{1, x tau_w} for w in W_M
    levi_rule = True
    for b, w in enumerate(L.basis):
        for a in range(VUM.shape[1]):
            lhs = la.matvec(F, right_I[H.index[w]], psi1[a])
            xt = la.matvec(F, VUM, right_V[b][:, a])
            rhs = coords(psi_function(I, ident, xt, U))
            levi_rule &= bool(np.array_equal(lhs, rhs))
    # V^{U_M} (x)_{H_M} H -> I_P(V)^U, x (x) h -> psi_{1,x} h
    A = L.algebra
    m = Module(A, right_V, "right", "V^UM")
    Hl = Module(A, np.stack([H.algebra.left_matrix(L.j[:, b]) for b in range(A.dim)]), "left", "H")
    cols = []
    for a in range(VUM.shape[1]):
        for i in range(H.dim):
            cols.append(la.matvec(F, right_I[i], psi1[a]))
    phi = np.stack(cols, axis=1)
    res = tensor_over_algebra(m, Hl, phi=phi)
    rep = PsiReport(BU.shape[1], len(L.D.reps) * VUM.shape[1], shift_rule, levi_rule, res.dim, res.map_rank)
    if not (rep.bijective and shift_rule and levi_rule):
        raise NotIso(f"psi basis check fails: {rep}")
    return rep


# ------------------------------------------------------------------ adjunctions

@dataclass
class AdjunctionReport:
    rows: list = field(default_factory=list)   # (name, lhs, rhs)

    @property
    def ok(self) -> bool:
        return all(a == b for _, a, b in self.rows)


def _hom_dim(F: GF, V: Rep, W: Rep, gens) -> int:
    if V.dim == 0 or W.dim == 0:
        return 0
    return hom_group(F, V.mats(gens), W.mats(gens)).shape[1]


def restriction_rep(W: Rep, spec: LeviSpec) -> Rep:
    """R_P(W) = W^N as an M-representation."""
    F = W.F
    gensN = spec.generators_N(F)
    B = invariants_subspace(F, W.dim, W.mats(gensN)) if gensN else np.eye(W.dim, dtype=np.int64)
    return sub_rep(W, B)


def jacquet_rep(W: Rep, spec: LeviSpec) -> Rep:
    """J_P(W) = W / W(N) as an M-representation."""
    F = W.F
    gensN = spec.generators_N(F)
    if not gensN:
        return W
    P, lift = coinvariants_quotient(F, W.dim, W.mats(gensN))
    fn = lambda g: la.matmul(F, P, la.matmul(F, W.mat(g), lift))  # noqa: E731
    return MatrixFnRep(F, P.shape[0], fn, "J_P")


def adjunction_dim_checks(spec: LeviSpec, q: int, Vs: list, Ws: list) -> AdjunctionReport:
    """Hom dimension identities for I_P -| R_P and J_P -| I_P on the given samples."""
    F = glnq.field_of_order(q)
    gG = glnq.group_generators(F, spec.n)
    gM = spec.generators_M(F)
    rep = AdjunctionReport()
    for V in Vs:
        IV = induce(V, spec, q)
        for W in Ws:
            tag = f"{getattr(V, 'name', 'V')},{getattr(W, 'name', 'W')}"
            a = _hom_dim(F, IV, W, gG)
            b = _hom_dim(F, V, restriction_rep(W, spec), gM)
            rep.rows.append((f"Hom_G(I_P V, W) = Hom_M(V, R_P W) [{tag}]", a, b))
            c = _hom_dim(F, jacquet_rep(W, spec), V, gM)
            d = _hom_dim(F, W, IV, gG)
            rep.rows.append((f"Hom_M(J_P W, V) = Hom_G(W, I_P V) [{tag}]", c, d))
    if not rep.ok:
        raise AdjunctionFailure(str([r for r in rep.rows if r[1] != r[2]]))
    return rep


def _left_C_over_HM(L: LeviHecke) -> Module:
    H = L.H
    return Module(L.algebra, np.stack([H.operator(L.j[:, b]) for b in range(L.algebra.dim)]), "left", "C")


def prop314_dims(spec: LeviSpec, q: int, m: Module) -> tuple[int, int]:
    """(dim m (x)_{H_M} C, |P\\G| dim m (x)_{H_M} C_M) for a right H_M-module m."""
    L = _lh(spec, q)
    a = tensor_over_algebra(m, _left_C_over_HM(L)).dim
    b = tensor_over_algebra(m, L.module).dim
    return a, len(parabolic_cosets(spec.n, q, spec.composition)) * b


def prop317_dims(spec: LeviSpec, q: int, m: Module) -> tuple[int, int]:
    """(dim m (x)_{H_M} C_M, dim J_P(m (x)_H C)) for a right H-module m."""
    L = _lh(spec, q)
    H, F, C = L.H, L.F, L.H.C
    A = L.algebra
    m_M = Module(A, np.stack([m.act(L.j[:, b]) for b in range(A.dim)]), "right", m.name)
    a = tensor_over_algebra(m_M, L.module).dim
    # m (x)_H C as a quotient of m (x) C, then N-coinvariants
    Cl = umod.full_module(H)
    R = tensor_relations(m, Cl)
    Im = np.eye(m.dim, dtype=np.int64)
    for x in spec.generators_N(F):
        P = C.g_perm(x)
        G = np.zeros((C.dim, C.dim), dtype=np.int64)
        G[P, np.arange(C.dim)] = 1
        R = np.concatenate([R, np.kron(Im, F.vsub(G, np.eye(C.dim, dtype=np.int64)))], axis=1)
    b = m.dim * C.dim - la.rank(F, R)
    return a, b


# ------------------------------------------------------------------ projectivity through the Levi

@dataclass
class Prop320Report:
    levi_verdict: str
    block_verdicts: dict
    consistent: bool


def prop320_check(spec: LeviSpec, q: int, blocks=None) -> Prop320Report:
    """If C_M is not projective over H_M then some block of C is not projective over H."""
    L = _lh(spec, q)
    lv = is_projective(L.module).verdict
    H = L.H
    verdicts = {}
    orbits = H.orbits if blocks is None else [g for g in H.orbits if len(g.members) in blocks]
    for g in orbits:
        if g.members == (H.trivial_char(),) or len(g.members) == 1 and g.members[0] == H.trivial_char():
            verdicts[g.members[0].exponents] = is_projective(umod.build_hprime(spec.n, q).C1).verdict
        else:
            _, M, _ = umod.block_module(H, g)
            verdicts[g.members[0].exponents] = is_projective(M).verdict
    some_not = any(v == "NotProjective" for v in verdicts.values())
    consistent = lv == "Projective" or some_not
    return Prop320Report(lv, verdicts, consistent)


@dataclass
class Prop325Report:
    levi_verdict: str
    invariants_verdict: str
    summand: bool | None


def prop325_check(spec: LeviSpec, q: int) -> Prop325Report:
    """C^N projective over H iff C_M projective over H_M; if so C^N is an H-summand of C."""
    from .modalg import hom_space
    L = _lh(spec, q)
    H, F, C = L.H, L.F, L.H.C
    lv = is_projective(L.module).verdict
    CN = invariants_subspace(F, C.dim, [C.g_perm(x) for x in spec.generators_N(F)])
    full = umod.full_module(H)
    sub = full.restrict(CN, name="C^N")
    iv = is_projective(sub).verdict
    summand = None
    if lv == "Projective":
        # look for pi in Hom_H(C, C^N) with pi restricted to C^N the identity
        homs = hom_space(full, sub)
        k = CN.shape[1]
        target = np.eye(k, dtype=np.int64).reshape(-1)
        Amat = np.stack([la.matmul(F, X, CN).reshape(-1) for X in homs], axis=1) if homs \
            else np.zeros((k * k, 0), dtype=np.int64)
        summand = la.solve(F, Amat, target) is not None
    return Prop325Report(lv, iv, summand)
