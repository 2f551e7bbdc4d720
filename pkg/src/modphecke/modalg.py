"""Finite-dimensional algebras and modules over a GF.

An Algebra is stored by its structure constants: mult[i, j, k] is the
coefficient of b_k in b_i b_j. A Module stores one action matrix per basis
element of the algebra. Vectors are columns. For a right module the matrix
of a sends x to x.a, so rho(ab) = rho(b) rho(a); every algorithm below works
with left modules and treats a right module as a left module over the
opposite algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import AlgebraMismatch, NotAComplex, RelationFailure, SideMismatch
from .gf import GF


# ------------------------------------------------------------------ algebras

class Algebra:
    def __init__(self, F: GF, mult: np.ndarray, unit, gens: Sequence | None = None,
                 labels: Sequence | None = None, relations: Sequence | None = None,
                 name: str = "A"):
        self.F = F
        self.mult = np.asarray(mult, dtype=np.int64)
        self.dim = self.mult.shape[0]
        self.unit = np.asarray(unit, dtype=np.int64)
        self.gens = [np.asarray(g, dtype=np.int64) for g in (gens if gens is not None else self.basis())]
        self.labels = list(labels) if labels is not None else list(range(self.dim))
        self.relations = list(relations or [])
        self.name = name
        self._op = None
        self._words = None
        self._lprep = self._rprep = None

    def basis(self) -> list[np.ndarray]:
        return [np.eye(self.dim, dtype=np.int64)[i] for i in range(self.dim)]

    def e(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def left_matrix(self, x) -> np.ndarray:
        """Matrix of y -> x y."""
        d = self.dim
        if self._lprep is None:
            self._lprep = la.Prepared(self.F, self.mult.reshape(d, d * d).T)
        M = (self._lprep @ np.asarray(x, dtype=np.int64).reshape(d, 1)).reshape(d, d)
        return np.ascontiguousarray(M.T)

    def right_matrix(self, x) -> np.ndarray:
        """Matrix of y -> y x."""
        d = self.dim
        if self._rprep is None:
            self._rprep = la.Prepared(self.F, self.mult.transpose(0, 2, 1).reshape(d * d, d))
        M = (self._rprep @ np.asarray(x, dtype=np.int64).reshape(d, 1)).reshape(d, d)
        return np.ascontiguousarray(M.T)

    def mul(self, x, *ys) -> np.ndarray:
        out = np.asarray(x, dtype=np.int64)
        for y in ys:
            out = la.matvec(self.F, self.right_matrix(y), out)
        return out

    def add(self, *xs) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int64)
        for x in xs:
            out = self.F.vadd(out, np.asarray(x, dtype=np.int64))
        return out

    def scale(self, c: int, x) -> np.ndarray:
        return self.F.scal(c, x)

    def neg(self, x) -> np.ndarray:
        return self.F.vneg(np.asarray(x, dtype=np.int64))

    def sub(self, x, y) -> np.ndarray:
        return self.F.vsub(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))

    def opposite(self) -> "Algebra":
        if self._op is None:
            self._op = Algebra(self.F, self.mult.transpose(1, 0, 2), self.unit, self.gens,
                               self.labels, [(n, [(c, tuple(reversed(w))) for c, w in rel])
                                             for n, rel in self.relations], self.name + "^op")
            self._op._op = self
        return self._op

    def same_as(self, other: "Algebra") -> bool:
        return self is other or (self.dim == other.dim and self.F == other.F
                                 and np.array_equal(self.mult, other.mult))

    def word(self, w: Sequence[int]) -> np.ndarray:
        out = self.unit
        for g in w:
            out = self.mul(out, self.gens[g])
        return out

    def check(self) -> None:
        """Unit, associativity on generator triples, and supplied relations."""
        F = self.F
        for i in range(self.dim):
            b = self.e(i)
            if not (np.array_equal(self.mul(self.unit, b), b) and np.array_equal(self.mul(b, self.unit), b)):
                raise RelationFailure(f"{self.name}: unit fails on basis element {i}")
        for g in self.gens:
            Lg = self.left_matrix(g)
            for j in range(self.dim):
                lhs = la.matmul(F, Lg, self.left_matrix(self.e(j)))
                rhs = self.left_matrix(self.mul(g, self.e(j)))
                if not np.array_equal(lhs, rhs):
                    raise RelationFailure(f"{self.name}: associativity fails")
        for name, rel in self.relations:
            total = np.zeros(self.dim, dtype=np.int64)
            for c, w in rel:
                total = F.vadd(total, F.scal(c, self.word(w)))
            if np.any(total):
                raise RelationFailure(f"{self.name}: relation {name} fails")

    def basis_words(self):
        """Words in the generators whose products form a basis, and the change of basis.

        Returns (words, Vinv) where column j of V is the product of words[j]
        and b_i = sum_j Vinv[j, i] word_j.
        """
        if self._words is None:
            words, vecs = [()], [self.unit]
            sub = la.Subspace(self.F, self.dim, self.unit)
            frontier = [()]
            Lg = [self.left_matrix(g) for g in self.gens]
            while frontier and sub.dim < self.dim:
                nxt = []
                for w in frontier:
                    x = vecs[words.index(w)]
                    for gi, L in enumerate(Lg):
                        y = la.matvec(self.F, L, x)
                        if sub.add(y):
                            words.append((gi,) + w)
                            vecs.append(y)
                            nxt.append((gi,) + w)
                frontier = nxt
            if sub.dim < self.dim:
                raise RelationFailure(f"{self.name}: generators do not generate the algebra")
            V = np.stack(vecs, axis=1)
            self._words = (words, la.inverse(self.F, V))
        return self._words

    def regular_module(self, side: str = "left") -> "Module":
        d = self.dim
        if side == "left":
            mats = [self.left_matrix(self.e(i)) for i in range(d)]
        else:
            mats = [self.right_matrix(self.e(i)) for i in range(d)]
        return Module(self, np.stack(mats), side=side, name=f"{self.name}_{side}")

    def to_json(self) -> dict:
        nz = np.argwhere(self.mult != 0)
        return {
            "name": self.name, "dim": self.dim, "p": self.F.p, "r": self.F.r,
            "labels": [str(x) for x in self.labels],
            "unit": self.unit.tolist(),
            "structure_constants": [[int(i), int(j), int(k), int(self.mult[i, j, k])] for i, j, k in nz],
        }

    @classmethod
    def from_json(cls, F: GF, data: dict) -> "Algebra":
        d = data["dim"]
        mult = np.zeros((d, d, d), dtype=np.int64)
        for i, j, k, c in data["structure_constants"]:
            mult[i, j, k] = c
        return cls(F, mult, data["unit"], labels=data["labels"], name=data["name"])

    @classmethod
    def from_matrices(cls, F: GF, gen_mats: Sequence, relations=None, name: str = "A"):
        """The algebra of operators generated by gen_mats (with identity).

        Returns (algebra, basis_mats); the algebra's basis consists of products
        of generators found breadth-first, so basis_mats is a faithful module.
        """
        m = gen_mats[0].shape[0]
        Id = np.eye(m, dtype=np.int64)
        mats, words = [Id], [()]
        sub = la.Subspace(F, m * m, Id.reshape(1, -1))
        frontier = [0]
        while frontier:
            nxt = []
            for idx in frontier:
                for gi, G in enumerate(gen_mats):
                    Y = la.matmul(F, G, mats[idx])
                    if sub.add(Y.reshape(1, -1)):
                        mats.append(Y)
                        words.append((gi,) + words[idx])
                        nxt.append(len(mats) - 1)
            frontier = nxt
        d = len(mats)
        B = np.stack([M.reshape(-1) for M in mats], axis=1)
        rows, L = la.left_inverse(F, B)

        def coords(M):
            x = la.matvec(F, L, M.reshape(-1)[rows])
            if not np.array_equal(la.matvec(F, B, x), M.reshape(-1)):
                raise RelationFailure(f"{name}: operator span not closed under products")
            return x

        mult = np.zeros((d, d, d), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                mult[i, j] = coords(la.matmul(F, mats[i], mats[j]))
        gens = [coords(G) for G in gen_mats]
        alg = cls(F, mult, coords(Id), gens=gens, labels=words, relations=relations, name=name)
        return alg, np.stack(mats)


def subalgebra(A: Algebra, basis_vectors: Sequence, unit, gens: Sequence | None = None,
               labels=None, name: str = "B") -> tuple[Algebra, np.ndarray]:
    """Structure constants of the subspace spanned by basis_vectors (closed under products).

    Returns the algebra and the inclusion matrix (A.dim x B.dim).
    """
    F = A.F
    Bm = np.stack([np.asarray(v, dtype=np.int64) for v in basis_vectors], axis=1)
    d = Bm.shape[1]
    mult = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        R = A.left_matrix(Bm[:, i])
        prods = la.matmul(F, R, Bm)
        mult[i] = la.coords(F, Bm, prods).T
    unit_c = la.coords(F, Bm, np.asarray(unit).reshape(-1, 1))[:, 0]
    gens_c = None
    if gens is not None:
        gens_c = [la.coords(F, Bm, np.asarray(g).reshape(-1, 1))[:, 0] for g in gens]
    return Algebra(F, mult, unit_c, gens=gens_c, labels=labels, name=name), Bm


# ------------------------------------------------------------------ modules

class Module:
    """A module of dimension m; action[i] is the m x m matrix of basis element i."""

    def __init__(self, algebra: Algebra, action, side: str = "left", name: str = "M"):
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        self.algebra = algebra
        self.F = algebra.F
        self.action = np.asarray(action, dtype=np.int64)
        self.dim = self.action.shape[1] if self.action.ndim == 3 else 0
        self.side = side
        self.name = name

    @classmethod
    def from_generators(cls, algebra: Algebra, gen_action: Sequence, side: str = "left",
                        name: str = "M") -> "Module":
        """Extend generator matrices to all basis elements using basis words."""
        F = algebra.F
        words, Vinv = algebra.basis_words()
        m = gen_action[0].shape[0]
        word_mats = []
        for w in words:
            M = np.eye(m, dtype=np.int64)
            for g in (w if side == "left" else reversed(w)):
                M = la.matmul(F, M, gen_action[g])
            word_mats.append(M)
        W = np.stack(word_mats).reshape(len(words), m * m)
        act = la.matmul(F, Vinv.T, W).reshape(algebra.dim, m, m)
        return cls(algebra, act, side, name)

    def act(self, x) -> np.ndarray:
        """Matrix of the algebra element x."""
        d, m = self.algebra.dim, self.dim
        x = np.asarray(x, dtype=np.int64).reshape(1, d)
        return la.matmul(self.F, x, self.action.reshape(d, m * m)).reshape(m, m)

    def as_left(self) -> "Module":
        if self.side == "left":
            return self
        return Module(self.algebra.opposite(), self.action, "left", self.name)

    def check(self) -> None:
        """Unit acts as identity, products match structure constants on generators, relations hold."""
        F, A = self.F, self.algebra
        M = self.as_left()
        Al = M.algebra
        if not np.array_equal(M.act(Al.unit), np.eye(self.dim, dtype=np.int64)):
            raise RelationFailure(f"{self.name}: unit does not act as identity")
        for g in Al.gens:
            Rg = M.act(g)
            for j in range(Al.dim):
                if not np.array_equal(la.matmul(F, Rg, M.action[j]), M.act(Al.mul(g, Al.e(j)))):
                    raise RelationFailure(f"{self.name}: action is not multiplicative")
        for name, rel in A.relations:
            total = np.zeros((self.dim, self.dim), dtype=np.int64)
            for c, w in rel:
                W = np.eye(self.dim, dtype=np.int64)
                for g in (w if self.side == "left" else reversed(w)):
                    W = la.matmul(F, W, self.act(A.gens[g]))
                total = F.vadd(total, F.scal(c, W))
            if np.any(total):
                raise RelationFailure(f"{self.name}: relation {name} fails")

    @property
    def stacked(self) -> la.Prepared:
        """The action as one (d m) x m operand, converted once."""
        if getattr(self, "_stacked", None) is None:
            d, m = self.algebra.dim, self.dim
            self._stacked = la.Prepared(self.F, self.action.reshape(d * m, m))
        return self._stacked

    def orbit_rows(self, V) -> np.ndarray:
        """All b_i v for v a column of V, as rows."""
        d, m = self.algebra.dim, self.dim
        V = np.asarray(V, dtype=np.int64).reshape(m, -1)
        if m == 0:
            return np.zeros((0, 0), dtype=np.int64)
        R = (self.stacked @ V).reshape(d, m, -1)
        return np.ascontiguousarray(R.transpose(0, 2, 1).reshape(-1, m))

    def restrict(self, B, name: str | None = None) -> "Module":
        """The submodule spanned by the columns of B (must be stable)."""
        B = np.asarray(B, dtype=np.int64)
        d, m = self.algebra.dim, self.dim
        k = B.shape[1]
        if k == 0:
            return Module(self.algebra, np.zeros((d, 0, 0), dtype=np.int64), self.side, name or self.name)
        rows, L = la.left_inverse(self.F, B)
        imgs = la.matmul(self.F, self.action.reshape(d * m, m), B).reshape(d, m, k)
        out = np.zeros((d, k, k), dtype=np.int64)
        for i in range(d):
            X = la.matmul(self.F, L, imgs[i][rows])
            if not np.array_equal(la.matmul(self.F, B, X), imgs[i]):
                raise RelationFailure("subspace is not stable under the action")
            out[i] = X
        return Module(self.algebra, out, self.side, name or self.name)

    def quotient(self, S, name: str | None = None) -> tuple["Module", np.ndarray]:
        """Quotient by the stable subspace spanned by the columns of S.

        Returns the quotient module and the projection matrix.
        """
        P, lift = quotient_maps(self.F, self.dim, S)
        d = self.algebra.dim
        out = np.stack([la.matmul(self.F, P, la.matmul(self.F, self.action[i], lift)) for i in range(d)]) \
            if P.shape[0] else np.zeros((d, 0, 0), dtype=np.int64)
        Q = Module(self.algebra, out, self.side, name or self.name + "/S")
        return Q, P

    def dual(self) -> "Module":
        side = "right" if self.side == "left" else "left"
        return Module(self.algebra, self.action.transpose(0, 2, 1), side, self.name + "*")


def direct_sum(M: Module, N: Module) -> Module:
    if not M.algebra.same_as(N.algebra) or M.side != N.side:
        raise AlgebraMismatch("direct sum needs one algebra and one side")
    d = M.algebra.dim
    act = np.zeros((d, M.dim + N.dim, M.dim + N.dim), dtype=np.int64)
    act[:, :M.dim, :M.dim] = M.action
    act[:, M.dim:, M.dim:] = N.action
    return Module(M.algebra, act, M.side, f"{M.name}+{N.name}")


def quotient_maps(F: GF, m: int, S) -> tuple[np.ndarray, np.ndarray]:
    """Projection F^m -> F^m / span(S) in complement coordinates, and a lift."""
    S = np.asarray(S, dtype=np.int64).reshape(m, -1)
    sub = la.Subspace(F, m, S.T)
    keep = np.setdiff1d(np.arange(m), sub.piv)
    res = sub.reduce(np.eye(m, dtype=np.int64))  # row i = residue of e_i
    P = np.ascontiguousarray(res[:, keep].T)
    lift = np.zeros((m, len(keep)), dtype=np.int64)
    lift[keep, np.arange(len(keep))] = 1
    return P, lift


# ------------------------------------------------------------ submodules

def closure(M: Module, vectors) -> la.Subspace:
    """The subspace A.vectors spanned by all b_i v."""
    sub = la.Subspace(M.F, M.dim)
    V = np.asarray(vectors, dtype=np.int64).reshape(M.dim, -1)
    if V.shape[1]:
        sub.add(M.orbit_rows(V))
    return sub


def generated_submodule(M: Module, vectors) -> tuple[Module, np.ndarray]:
    """Submodule generated by the columns of `vectors`, with its inclusion matrix."""
    B = closure(M, vectors).basis()
    return M.restrict(B, name=f"<{M.name}>"), B


def greedy_generators(M: Module, candidates=None) -> list[np.ndarray]:
    """Vectors added while not in the span generated by the previous ones."""
    sub = la.Subspace(M.F, M.dim)
    if candidates is None:
        # generic vectors first (few generators), then the unit vectors to guarantee completion
        rng = np.random.default_rng(0)
        generic = rng.integers(0, M.F.q, size=(min(M.dim, 64), M.dim))
        candidates = np.concatenate([generic, np.eye(M.dim, dtype=np.int64)])
    gens = []
    for v in np.asarray(candidates, dtype=np.int64).reshape(-1, M.dim):
        if sub.dim == M.dim:
            break
        if sub.contains(v):
            continue
        gens.append(v)
        sub.add(M.orbit_rows(v.reshape(-1, 1)))
    return gens


@dataclass
class FreeCover:
    gens: list            # generators v_1..v_k of M
    P: np.ndarray         # m x (k d), column i*d + b is b_b v_i
    kernel_gens: list     # A-generators of ker P, vectors in A^k


def free_cover(M: Module) -> FreeCover:
    M = M.as_left()
    A, F = M.algebra, M.F
    d, m = A.dim, M.dim
    gens = greedy_generators(M)
    k = len(gens)
    if k == 0:
        return FreeCover([], np.zeros((m, 0), dtype=np.int64), [])
    blocks = [M.orbit_rows(v.reshape(-1, 1)).T for v in gens]  # each m x d
    P = np.concatenate(blocks, axis=1)
    K = la.nullspace(F, P)
    Ak = free_module(A, k)
    kgens = greedy_generators(Ak, K.T) if K.shape[1] else []
    return FreeCover(gens, P, kgens)


class FreeModule(Module):
    """A^k with the left regular action on each summand; the action tensor is built lazily."""

    def __init__(self, A: Algebra, k: int):
        self.algebra, self.F, self.k = A, A.F, k
        self.dim = k * A.dim
        self.side = "left"
        self.name = f"{A.name}^{k}"
        self._action = None
        self._left = None

    @property
    def action(self) -> np.ndarray:
        if self._action is None:
            A, d, k = self.algebra, self.algebra.dim, self.k
            act = np.zeros((d, k * d, k * d), dtype=np.int64)
            for i in range(d):
                L = A.left_matrix(A.e(i))
                for j in range(k):
                    act[i, j * d:(j + 1) * d, j * d:(j + 1) * d] = L
            self._action = act
        return self._action

    def orbit_rows(self, V) -> np.ndarray:
        A, d, k = self.algebra, self.algebra.dim, self.k
        if self._left is None:
            self._left = la.Prepared(self.F, np.concatenate([A.left_matrix(A.e(i)) for i in range(d)]))
        V = np.asarray(V, dtype=np.int64).reshape(k, d, -1)
        c = V.shape[2]
        R = (self._left @ V.transpose(1, 0, 2).reshape(d, k * c)).reshape(d, d, k, c)
        return np.ascontiguousarray(R.transpose(0, 3, 2, 1).reshape(d * c, k * d))


def free_module(A: Algebra, k: int) -> Module:
    return FreeModule(A, k)


def _hom_from_cover(cov: FreeCover, N: Module) -> list[np.ndarray]:
    """Hom_A(M, N) through the presentation A^k / K of M."""
    F = N.F
    A = N.algebra
    d, n = A.dim, N.dim
    k = len(cov.gens)
    m = cov.P.shape[0]
    if k == 0:
        return []
    rows = []
    for r in cov.kernel_gens:
        rows.append(np.concatenate([N.act(r[i * d:(i + 1) * d]) for i in range(k)], axis=1))
    C = np.concatenate(rows, axis=0) if rows else np.zeros((0, k * n), dtype=np.int64)
    S = la.nullspace(F, C)
    piv = la.independent_columns(F, cov.P)
    Q = la.inverse(F, cov.P[:, piv])
    maps = []
    for s in S.T:
        Nbar = np.concatenate([N.orbit_rows(s[i * n:(i + 1) * n].reshape(-1, 1)).T for i in range(k)], axis=1)
        maps.append(la.matmul(F, Nbar[:, piv], Q))
    return maps


def hom_space(M: Module, N: Module) -> list[np.ndarray]:
    """Basis of Hom_A(M, N) as matrices N.dim x M.dim."""
    if M.side != N.side:
        raise SideMismatch("modules on different sides")
    if not M.algebra.same_as(N.algebra):
        raise AlgebraMismatch("modules over different algebras")
    M, N = M.as_left(), N.as_left()
    if M.dim == 0:
        return []
    return _hom_from_cover(free_cover(M), N)


def is_homomorphism(M: Module, N: Module, X) -> bool:
    F = M.F
    return all(np.array_equal(la.matmul(F, X, M.action[i]), la.matmul(F, N.action[i], X))
               for i in range(M.algebra.dim))


@dataclass
class ProjectivityVerdict:
    projective: bool
    witness: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "Projective" if self.projective else "NotProjective"


def _hom_to_regular(A: Algebra, cov: FreeCover, chunk: int = 16) -> np.ndarray:
    """Basis of Hom_A(M, A) through the presentation, as (k d) x h: column l lists f_l(v_1..v_k).

    Kernel generators are imposed a few at a time so the constraint matrix stays small.
    """
    F, d, k = A.F, A.dim, len(cov.gens)
    N = np.eye(k * d, dtype=np.int64)
    gens = cov.kernel_gens
    for start in range(0, len(gens), chunk):
        if N.shape[1] == 0:
            break
        rows = [np.concatenate([A.left_matrix(r[i * d:(i + 1) * d]) for i in range(k)], axis=1)
                for r in gens[start:start + chunk]]
        C = la.matmul(F, np.concatenate(rows, axis=0), N)
        N = la.matmul(F, N, la.nullspace(F, C))
    return N


def _split_rows(F, P, Nall, d, k, h, rows) -> np.ndarray:
    """Rows (i, r) of the splitting system: entry at column l k + j is (P_j f_l(v_i))[r]."""
    out = np.zeros((len(rows), h * k), dtype=np.int64)
    by_i: dict = {}
    for pos, (i, r) in enumerate(rows):
        by_i.setdefault(i, []).append((pos, r))
    for i, items in by_i.items():
        pos = [a for a, _ in items]
        rr = [b for _, b in items]
        Fi = Nall.reshape(d, h, k)[:, :, i]  # d x h: f_l(v_i)
        for j in range(k):
            block = la.matmul(F, P[rr, j * d:(j + 1) * d], Fi)  # len(rr) x h
            out[np.ix_(pos, np.arange(h) * k + j)] = block
    return out


def _split_residual(F, P, Hs, c, gens, d, k) -> np.ndarray:
    """sum_j g_j(v_i) . v_j - v_i for every generator, as an m x k matrix."""
    G = la.matmul(F, Hs, c)  # (k d) x k: column j stacks g_j(v_i) over i
    Gi = G.reshape(k, d, k).transpose(2, 1, 0).reshape(k * d, k)  # column i stacks g_j(v_i) over j
    return F.vsub(la.matmul(F, P, Gi), np.stack(gens, axis=1))


def is_projective(M: Module, method: str = "lazy", batch: int = 512) -> ProjectivityVerdict:
    """Split a free cover pi: A^k -> M by an A-linear section, or prove none exists.

    A section is sum_j g_j(.) v_j with g_j in Hom_A(M, A). With method="lazy" the
    linear system for the g_j is solved on a growing set of its rows: an
    inconsistent subsystem already proves that no section exists, and a
    candidate is checked against every equation before rows are added.
    method="dense" builds the whole system at once.
    """
    if method not in ("lazy", "dense"):
        raise ValueError("method must be 'lazy' or 'dense'")
    M = M.as_left()
    A, F = M.algebra, M.F
    d, m = A.dim, M.dim
    if m == 0:
        return ProjectivityVerdict(True, {"generators": 0, "cover_dim": 0, "hom_dim": 0})
    cov = free_cover(M)
    k = len(cov.gens)
    reg = A.regular_module("left")
    Hs = _hom_to_regular(A, cov)
    h = Hs.shape[1]
    Nall = Hs.reshape(k, d, h).transpose(1, 2, 0).reshape(d, h * k)  # column (l, i)
    rhs_full = np.concatenate(cov.gens)  # row i m + r is v_i[r]
    witness = {"generators": k, "cover_dim": k * d, "kernel_generators": len(cov.kernel_gens),
               "hom_dim": h, "system": [k * m, h * k], "method": method}
    all_rows = [(i, r) for i in range(k) for r in range(m)]
    if method == "dense":
        chosen = all_rows
    else:
        rng = np.random.default_rng(0)
        pick = rng.choice(len(all_rows), size=min(batch, len(all_rows)), replace=False)
        chosen = [all_rows[x] for x in sorted(pick)]
    S = _split_rows(F, cov.P, Nall, d, k, h, chosen)
    rounds = 0
    while True:
        rounds += 1
        rhs = np.array([rhs_full[i * m + r] for i, r in chosen], dtype=np.int64)
        sol = la.solve(F, S, rhs) if h else (np.zeros(0, dtype=np.int64) if not np.any(rhs) else None)
        if sol is None:
            witness["rows_used"] = len(chosen)
            witness["rounds"] = rounds
            witness["rank"] = la.rank(F, S) if S.size else 0
            witness["augmented_rank"] = la.rank(F, np.concatenate([S, rhs.reshape(-1, 1)], axis=1))
            return ProjectivityVerdict(False, witness)
        c = sol.reshape(h, k)
        res = _split_residual(F, cov.P, Hs, c, cov.gens, d, k)
        bad = np.argwhere(res != 0)  # (r, i)
        if len(bad) == 0:
            break
        have = set(chosen)
        extra = [(int(i), int(r)) for r, i in bad if (int(i), int(r)) not in have][:batch]
        if not extra:
            raise RelationFailure("splitting system did not converge")
        chosen = chosen + extra
        S = np.concatenate([S, _split_rows(F, cov.P, Nall, d, k, h, extra)], axis=0)
    witness["rows_used"] = len(chosen)
    witness["rounds"] = rounds
    # section s: M -> A^k as a (k d) x m matrix
    piv = la.independent_columns(F, cov.P)
    Q = la.inverse(F, cov.P[:, piv])
    section = np.zeros((k * d, m), dtype=np.int64)
    for j in range(k):
        gj = la.matmul(F, Hs, c[:, j].reshape(-1, 1))[:, 0]  # values g_j(v_i), stacked over i
        Gbar = np.concatenate([reg.orbit_rows(gj[i * d:(i + 1) * d].reshape(-1, 1)).T for i in range(k)], axis=1)
        section[j * d:(j + 1) * d] = la.matmul(F, Gbar[:, piv], Q)
    if not np.array_equal(la.matmul(F, cov.P, section), np.eye(m, dtype=np.int64)):
        raise RelationFailure("section does not split the cover")
    if not is_homomorphism(M, free_module(A, k), section):
        raise RelationFailure("section is not A-linear")
    witness["section_shape"] = list(section.shape)
    witness["section"] = section
    return ProjectivityVerdict(True, witness)


# ------------------------------------------------------------ tensor products

@dataclass
class TensorResult:
    dim: int
    map_rank: int | None = None
    kernel_dim: int | None = None


def tensor_relations(m: Module, N: Module) -> np.ndarray:
    """Columns spanning {x g (x) y - x (x) g y} inside m (x) N (row-major Kronecker order)."""
    if m.side != "right" or N.side != "left":
        raise SideMismatch("need a right module and a left module")
    if not m.algebra.same_as(N.algebra):
        raise AlgebraMismatch("modules over different algebras")
    F, A = m.F, m.algebra
    d1, d2 = m.dim, N.dim
    I1, I2 = np.eye(d1, dtype=np.int64), np.eye(d2, dtype=np.int64)
    blocks = [F.vsub(np.kron(m.act(g), I2), np.kron(I1, N.act(g))) for g in A.gens]
    return np.concatenate(blocks, axis=1) if blocks else np.zeros((d1 * d2, 0), dtype=np.int64)


def tensor_over_algebra(m: Module, N: Module, inclusion=None, phi=None) -> TensorResult:
    """m (right) tensor_A N (left).

    With `inclusion` (A.dim x m.dim, m a right ideal) the natural map to N is
    analysed; `phi` may instead give any linear map on m (x) N as a matrix.
    """
    F = m.F
    d1, d2 = m.dim, N.dim
    R = tensor_relations(m, N)
    dim = d1 * d2 - la.rank(F, R)
    if inclusion is None and phi is None:
        return TensorResult(dim)
    if phi is None:
        inc = np.asarray(inclusion, dtype=np.int64)
        phi = np.concatenate([N.act(inc[:, i]) for i in range(d1)], axis=1) if d1 \
            else np.zeros((d2, 0), dtype=np.int64)
    phi = np.asarray(phi, dtype=np.int64)
    if R.shape[1] and np.any(la.matmul(F, phi, R)):
        raise RelationFailure("natural map does not vanish on relations")
    r = la.rank(F, phi)
    return TensorResult(dim, r, dim - r)


# ------------------------------------------------------------ group actions

def _is_perm(g) -> bool:
    return np.asarray(g).ndim == 1


def _dense(g, m: int) -> np.ndarray:
    g = np.asarray(g)
    if g.ndim == 2:
        return g
    P = np.zeros((m, m), dtype=np.int64)
    P[g, np.arange(m)] = 1
    return P


def perm_orbits(m: int, perms) -> np.ndarray:
    """Orbit label of each point under the group generated by index arrays."""
    parent = np.arange(m)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in perms:
        for i, j in enumerate(np.asarray(g).tolist()):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = np.array([find(i) for i in range(m)])
    _, labels = np.unique(roots, return_inverse=True)
    return labels


def invariants_subspace(F: GF, m: int, gens) -> np.ndarray:
    """Basis (columns) of the vectors fixed by every generator.

    Generators are m x m matrices or permutation index arrays (g e_i = e_{g[i]}).
    """
    gens = list(gens)
    if not gens:
        return np.eye(m, dtype=np.int64)
    if all(_is_perm(g) for g in gens):
        lab = perm_orbits(m, gens)
        B = np.zeros((m, lab.max() + 1), dtype=np.int64)
        B[np.arange(m), lab] = 1
        return B
    Id = np.eye(m, dtype=np.int64)
    C = np.concatenate([F.vsub(_dense(g, m), Id) for g in gens], axis=0)
    return la.nullspace(F, C)


def coinvariants_quotient(F: GF, m: int, gens) -> tuple[np.ndarray, np.ndarray]:
    """Projection onto V / span{g v - v} and a lift back to V."""
    gens = list(gens)
    if not gens:
        Id = np.eye(m, dtype=np.int64)
        return Id, Id
    if all(_is_perm(g) for g in gens):
        lab = perm_orbits(m, gens)
        k = lab.max() + 1
        P = np.zeros((k, m), dtype=np.int64)
        P[lab, np.arange(m)] = 1
        first = np.array([np.flatnonzero(lab == c)[0] for c in range(k)])
        lift = np.zeros((m, k), dtype=np.int64)
        lift[first, np.arange(k)] = 1
        return P, lift
    Id = np.eye(m, dtype=np.int64)
    S = np.concatenate([F.vsub(_dense(g, m), Id) for g in gens], axis=1)
    return quotient_maps(F, m, S)


def group_closure(F: GF, m: int, gens, vectors) -> np.ndarray:
    """Basis of the smallest subspace containing `vectors` and stable under gens."""
    sub = la.Subspace(F, m)
    V = np.asarray(vectors, dtype=np.int64).reshape(m, -1)
    sub.add(V.T)
    mats = [_dense(g, m) for g in gens]
    frontier = sub.basis()
    while frontier.shape[1]:
        new = []
        for G in mats:
            Y = la.matmul(F, G, frontier)
            res = sub.reduce(Y.T)
            if sub.add(res) > 0:
                new.append(res[np.any(res != 0, axis=1)])
        frontier = np.concatenate(new).T if new else np.zeros((m, 0), dtype=np.int64)
    return sub.basis()


def restrict_matrix(F: GF, G, B) -> np.ndarray:
    """Matrix of G on the stable subspace with basis columns B."""
    return la.coords(F, B, la.matmul(F, G, B))


def hom_group(F: GF, rho1: Sequence, rho2: Sequence) -> np.ndarray:
    """Basis of {X : X rho1(g) = rho2(g) X for all generators}, as flattened columns.

    rho1[i], rho2[i] are the matrices of the i-th group generator on the
    source and the target. Constraints are applied one generator at a time.
    """
    n1, n2 = rho1[0].shape[0], rho2[0].shape[0]
    basis = np.eye(n1 * n2, dtype=np.int64)  # columns: vec(X) row-major (n2 x n1)
    for A, B in zip(rho1, rho2):
        if basis.shape[1] == 0:
            break
        cols = []
        for x in basis.T:
            X = x.reshape(n2, n1)
            cols.append(F.vsub(la.matmul(F, X, A), la.matmul(F, B, X)).reshape(-1))
        C = np.stack(cols, axis=1)
        Nsp = la.nullspace(F, C)
        basis = la.matmul(F, basis, Nsp)
    return basis


# ------------------------------------------------------------ exactness

@dataclass
class ExactReport:
    exact: bool
    defects: list
    ranks: list


def check_exact(F: GF, maps: Sequence) -> ExactReport:
    """maps[i]: V_i -> V_{i+1}. Defect at V_{i+1} is dim ker maps[i+1] - rank maps[i]."""
    maps = [np.asarray(f, dtype=np.int64) for f in maps]
    for i in range(len(maps) - 1):
        f, g = maps[i], maps[i + 1]
        if f.shape[0] != g.shape[1]:
            raise NotAComplex(f"maps {i} and {i + 1} are not composable")
        if f.size and g.size and np.any(la.matmul(F, g, f)):
            raise NotAComplex(f"composite at junction {i + 1} is nonzero")
    ranks = [la.rank(F, f) if f.size else 0 for f in maps]
    defects = []
    for i in range(len(maps) - 1):
        ker = maps[i + 1].shape[1] - ranks[i + 1]
        defects.append(ker - ranks[i])
    return ExactReport(all(x == 0 for x in defects), defects, ranks)


def short_exact_maps(F: GF, sub_basis, big_dim: int, map_to_quot) -> list:
    """[0 -> S, S -> V, V -> Q, Q -> 0] for a subspace inclusion and a map."""
    S = np.asarray(sub_basis, dtype=np.int64).reshape(big_dim, -1)
    f = np.asarray(map_to_quot, dtype=np.int64)
    return [np.zeros((S.shape[1], 0), dtype=np.int64), S, f, np.zeros((0, f.shape[0]), dtype=np.int64)]
