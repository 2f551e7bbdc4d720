"""Balls in the Bruhat-Tits building of GL_n (n = 2, 3) over a p-adic field.

Vertices are homothety classes of lattices, stored as the Hermite normal form of
the primitive representative inside O^n, computed modulo p^m with m = R + 1.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np
from scipy import sparse

from . import affweyl
from . import linalg as la
from .errors import NotAFace, NotClassifiable, TooLarge
from .gf import field_of_order

LIMITS = {2: lambda p, R: p <= 5 and R <= 6, 3: lambda p, R: (p == 2 and R <= 3) or (p == 3 and R <= 2)}


def _val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


def hnf(rows, p: int, m: int) -> tuple:
    """Upper triangular Hermite form of the lattice spanned by rows and p^m O^n."""
    P = p ** m
    n = len(rows[0])
    R = [[x % P for x in r] for r in rows]
    out = []
    for j in range(n):
        best, bv = None, m
        for k, r in enumerate(R):
            v = _val(r[j], p, m)
            if v < bv:
                best, bv = k, v
        if best is None:
            piv = [0] * n
            piv[j] = P
        else:
            piv = R.pop(best)
            unit = piv[j] // p ** bv
            inv = pow(unit, -1, P)
            piv = [(x * inv) % P for x in piv]
            piv[j] = p ** bv
            for k, r in enumerate(R):
                f = r[j] // p ** bv
                if f:
                    R[k] = [(a - f * b) % P for a, b in zip(r, piv)]
        out.append(piv)
    for j in range(n):
        d = out[j][j]
        for i in range(j):
            f = out[i][j] // d
            if f:
                out[i] = [a if c < j else (a - f * b) % P for c, (a, b) in enumerate(zip(out[i], out[j]))]
    return tuple(tuple(r) for r in out)


def is_primitive(B, p: int) -> bool:
    return any(x % p for r in B for x in r)


def canonical(rows, p: int, m: int) -> tuple:
    """Canonical form of the homothety class: the primitive representative inside O^n."""
    B = hnf(rows, p, m)
    n = len(B)
    while not is_primitive(B, p):
        scaled = [[x // p for x in r] for r in B]
        scaled += [[p ** (m - 1) if i == j else 0 for j in range(n)] for i in range(n)]
        B = hnf(scaled, p, m)
    return B


def _det(M) -> int:
    M = [list(r) for r in M]
    k = len(M)
    if k == 1:
        return M[0][0]
    if k == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return sum((-1) ** c * M[0][c] * _det([r[:c] + r[c + 1:] for r in M[1:]]) for c in range(k))


def smith_exponents(B, p: int) -> list[int]:
    """Exponents of the invariant factors via determinantal divisors."""
    n = len(B)
    cap = 10 ** 6
    d = [0]
    for k in range(1, n + 1):
        best = cap
        for rs in combinations(range(n), k):
            for cs in combinations(range(n), k):
                best = min(best, _val(_det([[B[r][c] for c in cs] for r in rs]), p, cap))
        d.append(best)
    return [d[k] - d[k - 1] for k in range(1, n + 1)]


def distance(B, p: int) -> int:
    e = smith_exponents(B, p)
    return max(e) - min(e)


def label(B, p: int) -> int:
    return sum(_val(B[i][i], p, 10 ** 6) for i in range(len(B))) % len(B)


def _subspaces(n: int, p: int):
    """Proper nonzero subspaces of F_p^n as reduced row echelon bases."""
    for k in range(1, n):
        for pivots in combinations(range(n), k):
            free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pivots]
            for vals in product(range(p), repeat=len(free)):
                M = [[0] * n for _ in range(k)]
                for i, pc in enumerate(pivots):
                    M[i][pc] = 1
                for (i, j), v in zip(free, vals):
                    M[i][j] = v
                yield M


def neighbours(B, p: int, m: int) -> list[tuple]:
    """Classes of the lattices strictly between pL and L."""
    n = len(B)
    base = [[p * x for x in r] for r in B]
    out = []
    for S in _subspaces(n, p):
        gens = [[sum(c * B[i][j] for i, c in enumerate(row)) for j in range(n)] for row in S]
        out.append(canonical(base + gens, p, m))
    return out


def standard_vertex(n: int, p: int, m: int) -> tuple:
    return canonical([[1 if i == j else 0 for j in range(n)] for i in range(n)], p, m)


def weyl_vertex(w: affweyl.ExtAffElem, p: int, m: int) -> tuple:
    """The class of w . O^n, spanned by p^{lam_j} e_{w0(j)}."""
    n = w.n
    shift = min(w.lam)
    rows = []
    for j in range(n):
        r = [0] * n
        r[w.w0[j]] = p ** (w.lam[j] - shift)
        rows.append(r)
    return canonical(rows, p, m)


@dataclass
class Ball:
    n: int
    p: int
    R: int
    m: int
    vertices: list
    dist: dict
    labels: dict
    adj: dict
    edges: list
    chambers: list
    bfs_dist: dict = field(default_factory=dict)
    method_agreement: bool = True

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def simplices(self, k: int) -> list:
        if k == 0:
            return [(v,) for v in self.vertices]
        if k == 1:
            return self.edges
        if k == 2 and self.n == 3:
            return self.chambers
        return []

    def simplex_distance(self, s) -> int:
        return max(self.dist[v] for v in s)

    def to_json(self) -> dict:
        idx = self.index
        return {
            "n": self.n, "p": self.p, "radius": self.R,
            "vertices": [{"basis": [list(r) for r in v], "distance": self.dist[v], "label": self.labels[v]}
                         for v in self.vertices],
            "edges": [[idx[a] for a in e] for e in self.edges],
            "chambers": [[idx[a] for a in c] for c in self.chambers],
        }

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True)


def _lattice_scan(n: int, p: int, R: int, m: int) -> set:
    """All primitive Hermite forms with p^R O^n inside the lattice."""
    out = set()
    for a in product(range(R + 1), repeat=n):
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for vals in product(*[range(p ** a[j]) for (_, j) in slots]):
            B = [[0] * n for _ in range(n)]
            for i in range(n):
                B[i][i] = p ** a[i]
            for (i, j), v in zip(slots, vals):
                B[i][j] = v
            Bt = tuple(tuple(r) for r in B)
            if not is_primitive(Bt, p):
                continue
            e = smith_exponents(Bt, p)
            if max(e) <= R:
                out.add(canonical(Bt, p, m))
    return out


def enumerate_ball(n: int, p: int, R: int) -> Ball:
    if n not in LIMITS or not LIMITS[n](p, R):
        raise TooLarge(f"ball ({n}, {p}, {R}) is outside the supported range")
    m = R + 1
    origin = standard_vertex(n, p, m)
    bfs = {origin: 0}
    adj: dict = {origin: set()}
    queue = deque([origin])
    while queue:
        v = queue.popleft()
        for w in neighbours(v, p, m):
            dw = distance(w, p)
            if dw > R:
                continue
            adj.setdefault(v, set()).add(w)
            adj.setdefault(w, set()).add(v)
            if w not in bfs:
                bfs[w] = bfs[v] + 1
                queue.append(w)
    scan = _lattice_scan(n, p, R, m)
    vertices = sorted(bfs, key=lambda v: (distance(v, p), v))
    dist = {v: distance(v, p) for v in vertices}
    labels = {v: label(v, p) for v in vertices}
    agree = set(scan) == set(bfs) and all(dist[v] == bfs[v] for v in vertices)
    idx = {v: i for i, v in enumerate(vertices)}
    edges = sorted({tuple(sorted((a, b), key=idx.get)) for a in vertices for b in adj[a]},
                   key=lambda e: (idx[e[0]], idx[e[1]]))
    chambers = []
    if n == 3:
        for a, b in edges:
            for c in adj[a] & adj[b]:
                if idx[c] > idx[b]:
                    chambers.append((a, b, c))
    else:
        chambers = list(edges)
    return Ball(n, p, R, m, vertices, dist, labels, adj, edges, chambers, bfs, agree)


# ------------------------------------------------------------------ incidence and homology

def incidence(ball: Ball, sigma, tau, convention: str = "position") -> int:
    """[sigma : tau] from the label dropped when passing to the face.

    convention "position": (-1)^j with j the position of the dropped label among the sorted labels
    of sigma; "literal": j is the dropped label itself.
    """
    if not set(tau) < set(sigma) or len(tau) != len(sigma) - 1:
        raise NotAFace("not a codimension-one face")
    ls = sorted(ball.labels[v] for v in sigma)
    lt = {ball.labels[v] for v in tau}
    dropped = [x for x in ls if x not in lt]
    if len(dropped) != 1:
        raise NotAFace("labels of the face do not determine the dropped vertex")
    j = ls.index(dropped[0]) if convention == "position" else dropped[0]
    return -1 if j % 2 else 1


def boundary_matrix(ball: Ball, k: int, convention: str = "position") -> sparse.csr_matrix:
    """Matrix of the boundary from k-simplices to (k-1)-simplices over the integers.

    k = 0 gives the augmentation."""
    src = ball.simplices(k)
    if k == 0:
        return sparse.csr_matrix(np.ones((1, len(src)), dtype=np.int64))
    tgt = ball.simplices(k - 1)
    tindex = {frozenset(t): i for i, t in enumerate(tgt)}
    rows, cols, vals = [], [], []
    for c, s in enumerate(src):
        for drop in range(len(s)):
            face = s[:drop] + s[drop + 1:]
            rows.append(tindex[frozenset(face)])
            cols.append(c)
            vals.append(incidence(ball, s, face, convention))
    return sparse.csr_matrix((vals, (rows, cols)), shape=(len(tgt), len(src)), dtype=np.int64)


def boundary(ball: Ball, chain, k: int, convention: str = "position") -> np.ndarray:
    F = field_of_order(ball.p)
    return (boundary_matrix(ball, k, convention) @ np.asarray(chain, dtype=np.int64)) % F.p


def boundary_squared_zero(ball: Ball, convention: str = "position") -> bool:
    """Every composite of consecutive boundaries, the augmentation included, vanishes mod p."""
    for k in range(ball.n - 1):
        prod = boundary_matrix(ball, k, convention) @ boundary_matrix(ball, k + 1, convention)
        if np.any(prod.toarray() % ball.p):
            return False
    return True


@dataclass
class HomologyReport:
    chain_dims: list
    ranks: list          # rank of the boundary out of degree k (k = 0 is the augmentation)
    reduced_betti: list

    @property
    def acyclic(self) -> bool:
        return all(b == 0 for b in self.reduced_betti)


def homology_ranks(ball: Ball) -> HomologyReport:
    """Reduced homology over F_p of the augmented chain complex of the ball."""
    F = field_of_order(ball.p)
    dims = [len(ball.simplices(k)) for k in range(ball.n)]
    ranks = []
    for k in range(ball.n):
        ranks.append(la.sparse_rank_prime(boundary_matrix(ball, k), F.p))
    betti = []
    for k in range(ball.n):
        out_rank = ranks[k]
        in_rank = ranks[k + 1] if k + 1 < ball.n else 0
        betti.append(dims[k] - out_rank - in_rank)
    # degree -1: the augmentation must be onto F_p
    betti.append(1 - ranks[0])
    return HomologyReport(dims, ranks, betti)


# ------------------------------------------------------------------ GL_3 chambers

@dataclass
class ChamberType:
    kind: str        # "a" or "b"
    m: int
    x: tuple
    ys: list         # admissible choices of y
    z: tuple | None


def chamber_type(ball: Ball, sigma) -> ChamberType:
    if ball.n != 3:
        raise NotClassifiable("chamber types are defined for GL_3")
    m = ball.simplex_distance(sigma)
    if m < 1:
        raise NotClassifiable("chamber at distance 0")
    top = [v for v in sigma if ball.dist[v] == m]
    low = [v for v in sigma if ball.dist[v] == m - 1]
    if len(top) + len(low) != 3 or not low:
        raise NotClassifiable("vertex distances are not m and m - 1")
    if len(top) == 2:
        return ChamberType("a", m, top[0], [top[1]], low[0])
    return ChamberType("b", m, top[0], low, None)


@dataclass
class Lemma71Report:
    chambers: int
    type_counts: dict
    violations: list
    lower_neighbour_violations: list
    unclassifiable: int

    @property
    def ok(self) -> bool:
        return not self.violations and not self.lower_neighbour_violations


def check_lemma71(ball: Ball) -> Lemma71Report:
    if ball.n != 3:
        raise NotClassifiable("chamber types are defined for GL_3 only")
    by_edge: dict = {}
    for c in ball.chambers:
        for e in combinations(c, 2):
            by_edge.setdefault(frozenset(e), []).append(c)
    counts: dict = {}
    viol, uncl = [], 0
    for c in ball.chambers:
        try:
            ct = chamber_type(ball, c)
        except NotClassifiable:
            uncl += 1
            continue
        counts[(ct.m, ct.kind)] = counts.get((ct.m, ct.kind), 0) + 1
        for y in ct.ys:
            others = [o for o in by_edge[frozenset((ct.x, y))]
                      if o != c and ball.simplex_distance(o) == ct.m]
            if ct.kind == "a" and others:
                viol.append(("a", c))
            if ct.kind == "b":
                for o in others:
                    try:
                        if chamber_type(ball, o).kind != "a":
                            viol.append(("b", c))
                    except NotClassifiable:
                        viol.append(("b", c))
    lower = []
    for v in ball.vertices:
        m = ball.dist[v]
        if m == 0:
            continue
        down = [w for w in ball.adj[v] if ball.dist[w] == m - 1]
        if len(down) not in (1, 2):
            lower.append(v)
        elif len(down) == 2 and down[1] not in ball.adj[down[0]]:
            lower.append(v)
    return Lemma71Report(len(ball.chambers), counts, viol, lower, uncl)


def top_vertex_counts(ball: Ball) -> dict:
    """Histogram of the number of vertices at maximal distance per chamber."""
    out: dict = {}
    for c in ball.chambers:
        m = ball.simplex_distance(c)
        k = sum(ball.dist[v] == m for v in c)
        out[k] = out.get(k, 0) + 1
    return out


def thick(ball: Ball) -> bool:
    """Every edge away from the boundary sphere lies in a chamber."""
    inchamber = {frozenset(e) for c in ball.chambers for e in combinations(c, 2)}
    return all(frozenset(e) in inchamber for e in ball.edges if ball.simplex_distance(e) < ball.R)


@dataclass
class SupportReport:
    trials: int
    violations: int


def support_radius_property(ball: Ball, trials: int, seed: int) -> SupportReport:
    """Random 2-chains f: the largest edge distance in supp(df) equals the largest chamber distance in supp f."""
    if ball.n != 3:
        raise NotClassifiable("the support property concerns GL_3")
    rng = np.random.default_rng(seed)
    D2 = boundary_matrix(ball, 2).tocsc()
    cdist = np.array([ball.simplex_distance(c) for c in ball.chambers])
    edist = np.array([ball.simplex_distance(e) for e in ball.edges])
    cidx = {c: i for i, c in enumerate(ball.chambers)}
    by_vertex: dict = {}
    for c in ball.chambers:
        for v in c:
            by_vertex.setdefault(v, []).append(cidx[c])
    viol = 0
    for _ in range(trials):
        f = np.zeros(len(ball.chambers), dtype=np.int64)
        v = ball.vertices[rng.integers(len(ball.vertices))]
        pool = set(by_vertex.get(v, []))
        for w in ball.adj[v]:
            pool.update(by_vertex.get(w, []))
        pool = sorted(pool)
        if not pool:
            continue
        k = int(rng.integers(1, min(8, len(pool)) + 1))
        chosen = rng.choice(pool, size=k, replace=False)
        f[chosen] = rng.integers(1, ball.p, size=k)
        df = (D2 @ f) % ball.p
        rf = cdist[f != 0].max()
        rd = edist[df != 0].max() if np.any(df) else -1
        viol += int(rd < rf)
    return SupportReport(trials, viol)


# ------------------------------------------------------------------ the tree

def tree_edge_e(ball: Ball, sigma) -> tuple:
    """The edge joining sigma to its unique neighbour closer to the origin."""
    if ball.n != 2:
        raise NotClassifiable("e(sigma) is defined on the tree")
    m = ball.dist[sigma]
    if m == 0:
        raise NotClassifiable("e is not defined at the origin here")
    down = [w for w in ball.adj[sigma] if ball.dist[w] == m - 1]
    if len(down) != 1:
        raise AssertionError("lower neighbour is not unique")
    return (sigma, down[0])


@dataclass
class TreeReport:
    counts: dict
    expected: dict
    unique_lower: bool
    acyclic: bool

    @property
    def ok(self) -> bool:
        return self.counts == self.expected and self.unique_lower and self.acyclic


def tree_checks(ball: Ball) -> TreeReport:
    counts: dict = {}
    for v in ball.vertices:
        counts[ball.dist[v]] = counts.get(ball.dist[v], 0) + 1
    expected = {0: 1}
    for m in range(1, ball.R + 1):
        expected[m] = (ball.p + 1) * ball.p ** (m - 1)
    unique = True
    for v in ball.vertices:
        if ball.dist[v]:
            try:
                tree_edge_e(ball, v)
            except AssertionError:
                unique = False
    acyclic = len(ball.edges) == len(ball.vertices) - 1
    return TreeReport(counts, expected, unique, acyclic)


# ------------------------------------------------------------------ Iwahori interval

def iwahori_interval(a1: int, a2: int, m: int) -> int:
    """The value of b2 - b1 for the diagonal x with K_m inside x^-1 I_1 x inside g^-1 I_1 g K_m."""
    a = a2 - a1
    if 1 - m <= a <= m:
        return a
    return m if a >= m + 1 else 1 - m


def interval_oracle(a1: int, a2: int, m: int, span: int = 64) -> list[int]:
    """All d = b2 - b1 satisfying the valuation conditions, by direct search.

    Subgroups of Iwahori shape are recorded as (u, l), the minimal valuations of the upper and lower
    off-diagonal entries; conjugating by diag(w^b1, w^b2) shifts (u, l) by (d, -d), products take minima,
    and containment compares entrywise.
    """
    I1, Km = (0, 1), (m, m)
    a = a2 - a1
    conj_g = (I1[0] + a, I1[1] - a)
    target = (min(conj_g[0], Km[0]), min(conj_g[1], Km[1]))
    out = []
    for d in range(-span, span + 1):
        cx = (I1[0] + d, I1[1] - d)
        contains_Km = cx[0] <= Km[0] and cx[1] <= Km[1]
        inside = cx[0] >= target[0] and cx[1] >= target[1]
        if contains_Km and inside:
            out.append(d)
    return out
