"""Exact dense linear algebra over a GF.

Matrices are numpy int64 arrays of field codes. Elimination runs in numba
kernels: prime fields use modular arithmetic, extension fields use the
field's addition and multiplication tables.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .errors import Singular
from .gf import GF


@njit(cache=True)
def _inv_mod(a, p):
    r, e, b = 1, p - 2, a % p
    while e:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


@njit(cache=True)
def _rref_prime(A, p, limit):
    m, n = A.shape
    piv = np.empty(min(m, limit) + 1, np.int64)
    nzbuf = np.empty(n, np.int64)
    r = 0
    for c in range(limit):
        if r == m:
            break
        k = -1
        for i in range(r, m):
            if A[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(n):
                t = A[k, j]
                A[k, j] = A[r, j]
                A[r, j] = t
        iv = _inv_mod(A[r, c], p)
        cnt = 0
        for j in range(c, n):
            if A[r, j] != 0:
                A[r, j] = A[r, j] * iv % p
                nzbuf[cnt] = j
                cnt += 1
        for i in range(m):
            if i != r:
                f = A[i, c]
                if f != 0:
                    g = p - f
                    for t in range(cnt):
                        j = nzbuf[t]
                        A[i, j] = (A[i, j] + g * A[r, j]) % p
        piv[r] = c
        r += 1
    return piv[:r]


@njit(cache=True)
def _rref_table(A, add_t, mul_t, neg_t, inv_t, limit):
    m, n = A.shape
    piv = np.empty(min(m, limit) + 1, np.int64)
    nzbuf = np.empty(n, np.int64)
    r = 0
    for c in range(limit):
        if r == m:
            break
        k = -1
        for i in range(r, m):
            if A[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(n):
                t = A[k, j]
                A[k, j] = A[r, j]
                A[r, j] = t
        iv = inv_t[A[r, c]]
        cnt = 0
        for j in range(c, n):
            if A[r, j] != 0:
                A[r, j] = mul_t[iv, A[r, j]]
                nzbuf[cnt] = j
                cnt += 1
        for i in range(m):
            if i != r:
                f = A[i, c]
                if f != 0:
                    g = neg_t[f]
                    for t in range(cnt):
                        j = nzbuf[t]
                        A[i, j] = add_t[A[i, j], mul_t[g, A[r, j]]]
        piv[r] = c
        r += 1
    return piv[:r]


def _as_mat(A, n_cols=None) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1) if n_cols is None else A.reshape(-1, n_cols)
    return A


def rref_inplace(F: GF, A: np.ndarray, limit: int | None = None) -> np.ndarray:
    """Row reduce A in place; pivots are searched only in the first `limit` columns."""
    if limit is None:
        limit = A.shape[1]
    if A.shape[0] == 0 or A.shape[1] == 0:
        return np.zeros(0, dtype=np.int64)
    if F.prime:
        return _rref_prime(A, F.p, limit)
    if not F.tables:
        raise NotImplementedError("linear algebra needs table arithmetic")
    return _rref_table(A, F.add_t, F.mul_t, F.neg_t, F.inv_t, limit)


def rref(F: GF, A) -> tuple[np.ndarray, np.ndarray]:
    R = np.array(_as_mat(A), dtype=np.int64, copy=True)
    piv = rref_inplace(F, R)
    return R[:len(piv)], piv


def rank(F: GF, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    R = np.array(A, dtype=np.int64, copy=True)
    if R.shape[0] > R.shape[1]:
        R = np.ascontiguousarray(R.T)
    return len(rref_inplace(F, R))


def nullspace(F: GF, A) -> np.ndarray:
    """Columns form a basis of {x : A x = 0}."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(F, A)
    free = np.setdiff1d(np.arange(n), piv)
    N = np.zeros((n, len(free)), dtype=np.int64)
    if len(free):
        N[free, np.arange(len(free))] = 1
        N[piv, :] = F.vneg(R[:, free]) if len(piv) else N[piv, :]
    return N


def solve(F: GF, A, B) -> np.ndarray | None:
    """Some X with A X = B, or None when the system is inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    m, n = A.shape
    if m == 0:
        X = np.zeros((n, B.shape[1]), dtype=np.int64)
        return X[:, 0] if vec else X
    aug = np.ascontiguousarray(np.concatenate([A, B], axis=1))
    piv = rref_inplace(F, aug, limit=n)
    r = len(piv)
    if np.any(aug[r:, n:]):
        return None
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    X[piv] = aug[:r, n:]
    return X[:, 0] if vec else X


class Prepared:
    """A left operand converted once for repeated products."""

    def __init__(self, F: GF, A):
        self.F = F
        self.A = np.asarray(A, dtype=np.int64)
        if F.prime:
            self.parts = [self.A.astype(np.float64)]
        else:
            digits = F.digits[self.A]
            self.parts = [digits[..., i].astype(np.float64) for i in range(F.r)]

    @property
    def shape(self):
        return self.A.shape

    def __matmul__(self, B) -> np.ndarray:
        return _matmul_parts(self.F, self.parts, np.asarray(B, dtype=np.int64), self.A.shape[-1])


def _matmul_parts(F: GF, parts, B, inner) -> np.ndarray:
    p = F.p
    if F.prime:
        if inner * (p - 1) ** 2 < 2 ** 52:
            C = np.matmul(parts[0], B.astype(np.float64))
            return np.rint(C).astype(np.int64) % p
        return np.matmul(parts[0].astype(np.int64) % p, B % p) % p
    r = F.r
    DB = [F.digits[B][..., i].astype(np.float64) for i in range(r)]
    prod = [None] * (2 * r - 1)
    for i in range(r):
        for j in range(r):
            t = np.matmul(parts[i], DB[j])
            prod[i + j] = t if prod[i + j] is None else prod[i + j] + t
    coeffs = [np.rint(c).astype(np.int64) % p for c in prod]
    mod = F.modulus
    for k in range(2 * r - 2, r - 1, -1):
        c = coeffs[k]
        for i in range(r):
            coeffs[k - r + i] = (coeffs[k - r + i] - c * mod[i]) % p
    out = np.zeros_like(coeffs[0])
    for i in range(r):
        out += coeffs[i] * p ** i
    return out


def matmul(F: GF, A, B) -> np.ndarray:
    if isinstance(A, Prepared):
        return A @ B
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[-1] == 0:
        shape = A.shape[:-1] + B.shape[1:]
        return np.zeros(shape, dtype=np.int64)
    return Prepared(F, A) @ B


def matvec(F: GF, A, x) -> np.ndarray:
    return matmul(F, A, np.asarray(x, dtype=np.int64).reshape(-1, 1))[:, 0]


def inverse(F: GF, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    X = solve(F, A, np.eye(n, dtype=np.int64))
    if X is None or rank(F, A) < n:
        raise Singular("matrix is not invertible")
    return X


def column_basis(F: GF, A) -> np.ndarray:
    """Independent columns spanning the column space, in RREF of the transpose."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=np.int64)
    R, _ = rref(F, A.T)
    return np.ascontiguousarray(R.T)


def independent_columns(F: GF, A) -> np.ndarray:
    """Indices of a maximal independent set of columns (greedy, left to right)."""
    A = np.array(A, dtype=np.int64, copy=True)
    return rref_inplace(F, A)


def left_inverse(F: GF, B) -> tuple[np.ndarray, np.ndarray]:
    """For B of full column rank return (rows, L) with L @ B[rows] = I.

    Coordinates of a vector v in span(B) are L @ v[rows].
    """
    B = np.asarray(B, dtype=np.int64)
    rows = independent_columns(F, B.T)
    if len(rows) != B.shape[1]:
        raise Singular("basis is not of full column rank")
    return rows, inverse(F, B[rows])


def coords(F: GF, B, V, check: bool = True):
    """Coordinates of the columns of V in the basis B (columns)."""
    rows, L = left_inverse(F, B)
    V = np.asarray(V, dtype=np.int64)
    X = matmul(F, L, V[rows])
    if check and not np.array_equal(matmul(F, B, X), V):
        raise ValueError("vectors are not in the span of the basis")
    return X


class Subspace:
    """A subspace of F^n kept as a fully reduced echelon basis (rows)."""

    def __init__(self, F: GF, n: int, vectors=None):
        self.F, self.n = F, n
        self.E = np.zeros((0, n), dtype=np.int64)
        self.piv = np.zeros(0, dtype=np.int64)
        if vectors is not None:
            self.add(vectors)

    @property
    def dim(self) -> int:
        return len(self.piv)

    def reduce(self, V) -> np.ndarray:
        """Residues of the rows of V modulo the subspace."""
        V = _as_mat(V, self.n)
        if self.dim == 0 or V.shape[0] == 0:
            return V.copy()
        return self.F.vsub(V, matmul(self.F, V[:, self.piv], self.E))

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def add(self, V) -> int:
        """Add the rows of V; return the number of new dimensions."""
        res = self.reduce(V)
        res = res[np.any(res != 0, axis=1)]
        if res.shape[0] == 0:
            return 0
        R, piv = rref(self.F, res)
        if self.dim:
            self.E = self.F.vsub(self.E, matmul(self.F, self.E[:, piv], R))
        E = np.concatenate([self.E, R])
        P = np.concatenate([self.piv, piv])
        order = np.argsort(P, kind="stable")
        self.E, self.piv = np.ascontiguousarray(E[order]), P[order]
        return len(piv)

    def basis(self) -> np.ndarray:
        """Basis as columns."""
        return np.ascontiguousarray(self.E.T)


def sparse_rank_prime(M, p: int) -> int:
    """Rank over F_p of a scipy sparse integer matrix, by elimination on row dictionaries.

    Rows with the fewest entries are used as pivots first, which keeps fill-in low on
    incidence matrices.
    """
    import heapq

    M = M.tocsr()
    rows = []
    for i in range(M.shape[0]):
        lo, hi = M.indptr[i], M.indptr[i + 1]
        r = {int(c): int(v) % p for c, v in zip(M.indices[lo:hi], M.data[lo:hi]) if int(v) % p}
        rows.append(r)
    by_col: dict = {}
    for i, r in enumerate(rows):
        for c in r:
            by_col.setdefault(c, set()).add(i)
    heap = [(len(r), i) for i, r in enumerate(rows) if r]
    heapq.heapify(heap)
    alive = [bool(r) for r in rows]
    rank = 0
    while heap:
        size, i = heapq.heappop(heap)
        r = rows[i]
        if not alive[i] or size != len(r):
            if alive[i] and r:
                heapq.heappush(heap, (len(r), i))
            continue
        alive[i] = False
        c = min(r, key=lambda col: len(by_col[col]))
        inv = pow(r[c], p - 2, p)
        rank += 1
        for col in r:
            by_col[col].discard(i)
        for k in list(by_col[c]):
            rk = rows[k]
            f = rk[c] * inv % p
            for col, v in r.items():
                nv = (rk.get(col, 0) - f * v) % p
                if nv:
                    if col not in rk:
                        by_col[col].add(k)
                    rk[col] = nv
                elif col in rk:
                    del rk[col]
                    by_col[col].discard(k)
            if rk:
                heapq.heappush(heap, (len(rk), k))
            else:
                alive[k] = False
    return rank
