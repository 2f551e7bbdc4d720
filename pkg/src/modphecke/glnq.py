"""GL_n(F_q) for n <= 3: U-cosets, Weyl group W = W_0 x| T, characters of T.

Matrices are int64 arrays of field codes. Most routines work on batches of
shape (N, n, n).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import OutOfRange, Singular, TooLarge
from .gf import GF, field_of_order

MAX_COSETS = 10 ** 4


def group_order(n: int, q: int) -> int:
    if not 1 <= n <= 3 or q > 16:
        raise OutOfRange(f"group order only for n <= 3 and q <= 16, got ({n}, {q})")
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


# ---------------------------------------------------------------- matrices

def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def bmatmul(F: GF, A, B) -> np.ndarray:
    """Batched product of small matrices (broadcasting over leading axes)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    n = A.shape[-1]
    out = None
    for k in range(n):
        t = F.vmul(A[..., :, k, None], B[..., None, k, :])
        out = t if out is None else F.vadd(out, t)
    return out


def det(F: GF, g) -> int:
    g = np.asarray(g)
    n = g.shape[0]
    total = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i in range(n):
            term = F.mul(term, int(g[i, perm[i]]))
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total = F.add(total, term if inv % 2 == 0 else F.neg(term))
    return total


def mat_inverse(F: GF, g) -> np.ndarray:
    from .linalg import inverse
    return inverse(F, np.asarray(g, dtype=np.int64))


def elementary(F: GF, n: int, i: int, j: int, c: int) -> np.ndarray:
    """Identity plus c at position (i, j)."""
    x = identity(n)
    x[i, j] = F.add(int(x[i, j]), c)
    return x


def diag(values) -> np.ndarray:
    return np.diag(np.asarray(values, dtype=np.int64))


def perm_matrix(perm) -> np.ndarray:
    """P with P e_j = e_{perm[j]}."""
    n = len(perm)
    P = np.zeros((n, n), dtype=np.int64)
    for j, s in enumerate(perm):
        P[s, j] = 1
    return P


def is_unipotent_upper(g) -> bool:
    g = np.asarray(g)
    return bool(np.all(np.diag(g) == 1) and not np.any(np.tril(g, -1)))


def group_generators(F: GF, n: int) -> list[np.ndarray]:
    gens = []
    for i in range(n):
        d = [1] * n
        d[i] = F.gen
        gens.append(diag(d))
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(perm_matrix(perm))
        gens.append(elementary(F, n, i, i + 1, 1))
        gens.append(elementary(F, n, i + 1, i, 1))
    return gens


def root_subgroup_generators(F: GF, n: int, positions) -> list[np.ndarray]:
    """Generators x_{ij}(b), b in an F_p-basis of F_q, for (i, j) in positions."""
    return [elementary(F, n, i, j, b) for (i, j) in positions for b in F.additive_basis()]


def unipotent_generators(F: GF, n: int) -> list[np.ndarray]:
    return root_subgroup_generators(F, n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def enumerate_subgroup(F: GF, gens, n: int) -> np.ndarray:
    """All elements of the (finite) group generated by gens, as a batch."""
    seen = {identity(n).tobytes(): identity(n)}
    frontier = [identity(n)]
    while frontier:
        batch = np.stack(frontier)
        frontier = []
        for g in gens:
            prods = bmatmul(F, batch, g)
            for m in prods:
                key = m.tobytes()
                if key not in seen:
                    seen[key] = m
                    frontier.append(m)
    out = np.stack(list(seen.values()))
    keys = encode(F.q, out)
    return out[np.argsort(keys)]


# ------------------------------------------------------- canonical U-cosets

def canonicalize_batch(F: GF, mats, track: bool = False):
    """Canonical representatives of the cosets U g for a batch of invertible g.

    Row i is cleared, by adding multiples of lower rows, at the pivot columns of
    all rows below it; a row's pivot is its first nonzero column. Returns the
    canonical forms, and with track=True also u in U with u g = canonical.
    """
    A = np.array(mats, dtype=np.int64, copy=True)
    single = A.ndim == 2
    if single:
        A = A[None]
    N, n, _ = A.shape
    idx = np.arange(N)
    U = np.broadcast_to(identity(n), (N, n, n)).copy() if track else None
    piv = np.zeros((N, n), dtype=np.int64)
    nz = A[:, n - 1, :] != 0
    if not np.all(nz.any(axis=1)):
        raise Singular("matrix is singular")
    piv[:, n - 1] = np.argmax(nz, axis=1)
    for i in range(n - 2, -1, -1):
        for j in range(n - 1, i, -1):
            c = piv[:, j]
            a = A[idx, i, c]
            b = A[idx, j, c]
            f = F.vmul(a, F.vinv(b))
            A[:, i, :] = F.vsub(A[:, i, :], F.vmul(f[:, None], A[:, j, :]))
            if track:
                U[:, i, :] = F.vsub(U[:, i, :], F.vmul(f[:, None], U[:, j, :]))
        nz = A[:, i, :] != 0
        if not np.all(nz.any(axis=1)):
            raise Singular("matrix is singular")
        piv[:, i] = np.argmax(nz, axis=1)
    if not np.all(np.sort(piv, axis=1) == np.arange(n)):
        raise Singular("matrix is singular")
    if single:
        return (A[0], U[0]) if track else A[0]
    return (A, U) if track else A


def canonicalize(F: GF, g) -> np.ndarray:
    return canonicalize_batch(F, g)


def encode(q: int, mats) -> np.ndarray:
    """Integer key of each matrix (base-q digits)."""
    M = np.asarray(mats, dtype=np.int64)
    flat = M.reshape(M.shape[0], -1) if M.ndim == 3 else M.reshape(1, -1)
    w = q ** np.arange(flat.shape[1], dtype=np.int64)
    return flat @ w


def pivots_and_labels(F: GF, canon) -> tuple[np.ndarray, np.ndarray]:
    """For canonical forms: the permutation sigma (sigma[piv_i] = i) and diag d[piv_i] = R[i, piv_i]."""
    C = np.asarray(canon)
    N, n, _ = C.shape
    piv = np.argmax(C != 0, axis=2)  # (N, n): pivot column of each row
    sigma = np.zeros((N, n), dtype=np.int64)
    d = np.zeros((N, n), dtype=np.int64)
    rows = np.arange(n)
    for i in range(n):
        sigma[np.arange(N), piv[:, i]] = rows[i]
        d[np.arange(N), piv[:, i]] = C[np.arange(N), i, piv[:, i]]
    return sigma, d


# ---------------------------------------------------------------- Weyl group

@dataclass(frozen=True, order=True)
class WeylElem:
    """(perm, diag): the matrix P_perm . diag(diag), with P e_j = e_{perm[j]}.

    Permutations are 0-based tuples; diag entries are field codes.
    """
    perm: tuple
    diag: tuple

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def length(self) -> int:
        return perm_length(self.perm)

    def mat(self) -> np.ndarray:
        return perm_matrix(self.perm) @ diag(self.diag)

    def mul(self, F: GF, other: "WeylElem") -> "WeylElem":
        s, t = self.perm, other.perm
        perm = tuple(s[t[j]] for j in range(self.n))
        d = tuple(F.mul(self.diag[t[j]], other.diag[j]) for j in range(self.n))
        return WeylElem(perm, d)

    def inverse(self, F: GF) -> "WeylElem":
        n = self.n
        inv = [0] * n
        x = [0] * n
        for j, s in enumerate(self.perm):
            inv[s] = j
            x[s] = F.inv(self.diag[j])
        return WeylElem(tuple(inv), tuple(x))

    def is_torus(self) -> bool:
        return self.perm == tuple(range(self.n))

    def finite_part(self) -> "WeylElem":
        return WeylElem(self.perm, (1,) * self.n)

    def torus_part(self) -> tuple:
        return self.diag


def perm_length(perm) -> int:
    n = len(perm)
    return sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])


def perm_compose(s, t) -> tuple:
    return tuple(s[t[j]] for j in range(len(t)))


def perm_inverse(s) -> tuple:
    inv = [0] * len(s)
    for j, x in enumerate(s):
        inv[x] = j
    return tuple(inv)


def simple_reflection(n: int, i: int) -> WeylElem:
    perm = list(range(n))
    perm[i], perm[i + 1] = perm[i + 1], perm[i]
    return WeylElem(tuple(perm), (1,) * n)


def sl2_reflection(F: GF, n: int, i: int) -> WeylElem:
    """The representative [[0, 1], [-1, 0]] of s_i in rows/columns i, i+1; its square is -1 there."""
    d = [1] * n
    d[i] = F.neg(1)
    return WeylElem(simple_reflection(n, i).perm, tuple(d))


def torus_elem(d) -> WeylElem:
    return WeylElem(tuple(range(len(d))), tuple(int(x) for x in d))


def identity_weyl(n: int) -> WeylElem:
    return WeylElem(tuple(range(n)), (1,) * n)


def finite_weyl(n: int) -> list[tuple]:
    return sorted(itertools.permutations(range(n)), key=lambda s: (perm_length(s), s))


def torus(F: GF, n: int) -> list[tuple]:
    return [tuple(d) for d in itertools.product(F.units(), repeat=n)]


def weyl_enumerate(F: GF, n: int) -> list[WeylElem]:
    """W ordered by (length, perm, diag)."""
    T = torus(F, n)
    return [WeylElem(s, d) for s in finite_weyl(n) for d in T]


def reduced_word(perm) -> list[int]:
    """Lexicographically least reduced word (s_{i1} ... s_{ik}) for a permutation.

    Returns indices i1, ..., ik with perm = s_{i1} s_{i2} ... s_{ik}.
    """
    perm = tuple(perm)
    word = []
    n = len(perm)
    while perm_length(perm) > 0:
        for i in range(n - 1):
            s = list(range(n))
            s[i], s[i + 1] = s[i + 1], s[i]
            cand = perm_compose(tuple(s), perm)
            if perm_length(cand) < perm_length(perm):
                word.append(i)
                perm = cand
                break
    return word


def longest_perm(n: int) -> tuple:
    return tuple(range(n - 1, -1, -1))


def bruhat_decompose(F: GF, g):
    """g = u1 . mat(w) . u2 with u1, u2 upper unitriangular."""
    g = np.asarray(g, dtype=np.int64)
    n = g.shape[0]
    canon, u = canonicalize_batch(F, g, track=True)
    sigma, d = pivots_and_labels(F, canon[None])
    w = WeylElem(tuple(int(x) for x in sigma[0]), tuple(int(x) for x in d[0]))
    Dinv = diag([F.inv(int(x)) for x in d[0]])
    # canon = P D u2  =>  u2 = D^{-1} P^{-1} canon
    Pinv = perm_matrix(sigma[0]).T
    u2 = bmatmul(F, Dinv, bmatmul(F, Pinv, canon))
    u1 = mat_inverse(F, u)
    assert is_unipotent_upper(u2) and is_unipotent_upper(u1)
    return w, u1, u2


# ---------------------------------------------------------------- cosets

class CosetSpace:
    """U\\G with canonical representatives, sorted by integer key."""

    def __init__(self, F: GF, n: int, reps: np.ndarray):
        self.F, self.n, self.q = F, n, F.q
        keys = encode(F.q, reps)
        order = np.argsort(keys)
        self.reps = np.ascontiguousarray(reps[order])
        self.keys = keys[order]
        sigma, d = pivots_and_labels(F, self.reps)
        self.labels = [WeylElem(tuple(int(x) for x in s), tuple(int(x) for x in t))
                       for s, t in zip(sigma, d)]
        self._by_label: dict = {}
        for i, w in enumerate(self.labels):
            self._by_label.setdefault(w, []).append(i)

    def __len__(self):
        return len(self.reps)

    def index_of(self, mats) -> np.ndarray:
        """Indices of the cosets U g for a batch of g."""
        canon = canonicalize_batch(self.F, mats)
        if canon.ndim == 2:
            canon = canon[None]
        keys = encode(self.q, canon)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        if not np.array_equal(self.keys[pos], keys):
            raise KeyError("coset not found")
        return pos

    def index_of_weyl(self, w: WeylElem) -> int:
        return int(self.index_of(w.mat()[None])[0])

    def double_coset(self, w: WeylElem) -> list[int]:
        """Indices of cosets U y contained in U w U."""
        return self._by_label.get(w, [])

    def right_perm(self, g) -> np.ndarray:
        """perm[i] = index of U rep_i g."""
        return self.index_of(bmatmul(self.F, self.reps, np.asarray(g)))

    def left_perm(self, t) -> np.ndarray:
        """perm[i] = index of U t rep_i, for t normalising U."""
        return self.index_of(bmatmul(self.F, np.asarray(t), self.reps))

    def products(self, ys, gs) -> np.ndarray:
        """Table P[a, b] = index of U rep_{ys[a]} rep_{gs[b]}."""
        ys, gs = np.asarray(ys), np.asarray(gs)
        A = self.reps[ys][:, None]
        B = self.reps[gs][None, :]
        prods = bmatmul(self.F, A, B).reshape(-1, self.n, self.n)
        return self.index_of(prods).reshape(len(ys), len(gs))

    @property
    def identity_index(self) -> int:
        return int(self.index_of(identity(self.n)[None])[0])


def enumerate_cosets(F: GF, n: int, gens=None) -> np.ndarray:
    """Canonical representatives of U\\G by breadth-first search on right multiplication."""
    if gens is None:
        gens = group_generators(F, n)
    start = canonicalize_batch(F, identity(n)[None])
    seen = {int(encode(F.q, start)[0]): start[0]}
    frontier = start
    while len(frontier):
        new = []
        for g in gens:
            canon = canonicalize_batch(F, bmatmul(F, frontier, g))
            keys = encode(F.q, canon)
            for k, m in zip(keys.tolist(), canon):
                if k not in seen:
                    seen[k] = m
                    new.append(m)
        frontier = np.stack(new) if new else np.zeros((0, n, n), dtype=np.int64)
    return np.stack(list(seen.values()))


@lru_cache(maxsize=None)
def coset_space(n: int, q: int) -> CosetSpace:
    if not 1 <= n <= 3:
        raise OutOfRange(f"n = {n} not supported")
    size = group_order(n, q) // q ** (n * (n - 1) // 2)
    if size > MAX_COSETS:
        raise TooLarge(f"|U\\G| = {size} exceeds {MAX_COSETS}")
    F = field_of_order(q)
    return CosetSpace(F, n, enumerate_cosets(F, n))


# ---------------------------------------------------------------- characters

@dataclass(frozen=True, order=True)
class Character:
    """chi(diag(g^{k_1}, ..., g^{k_n})) = g^{sum a_i k_i}, exponents a in Z/(q-1)."""
    exponents: tuple

    def value(self, F: GF, d) -> int:
        e = sum(a * F.dlog(int(x)) for a, x in zip(self.exponents, d))
        return F.gen_pow(e)

    def act(self, perm, q: int) -> "Character":
        """chi^w with chi^w(t) = chi(w t w^{-1}) for w the permutation matrix."""
        return Character(tuple(self.exponents[perm[j]] % (q - 1) for j in range(len(perm))))

    def inverse(self, q: int) -> "Character":
        return Character(tuple((-a) % (q - 1) for a in self.exponents))


@dataclass(frozen=True)
class CharOrbit:
    members: tuple
    regular: bool

    def __len__(self):
        return len(self.members)


def characters_and_orbits(n: int, q: int) -> tuple[list[Character], list[CharOrbit]]:
    chars = [Character(e) for e in itertools.product(range(q - 1), repeat=n)]
    seen, orbits = set(), []
    perms = list(itertools.permutations(range(n)))
    for c in chars:
        if c in seen:
            continue
        orb = sorted({c.act(s, q) for s in perms})
        seen.update(orb)
        orbits.append(CharOrbit(tuple(orb), len(orb) == factorial(n)))
    return chars, orbits


def conj_torus(d, perm) -> tuple:
    """w t w^{-1} for w = P_perm: entry perm[j] of the result is d[j]."""
    out = [0] * len(d)
    for j, s in enumerate(perm):
        out[s] = d[j]
    return tuple(out)
