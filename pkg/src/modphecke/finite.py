"""Projectivity verdicts and dimension checks for the finite groups GL_2(F_q) and GL_3(F_q)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import glnq
from . import linalg as la
from .glnq import Character
from .modalg import check_exact, group_closure, is_projective, tensor_over_algebra
from .umod import (HeckeAlgebra, block_algebra, block_module, build_C, build_H, build_hprime, chi_basis,
                   gl3_quadruple, rank_of, right_ideal, right_ideal_module)


def _is_prime(q: int) -> bool:
    return all(q % k for k in range(2, int(q ** 0.5) + 1))


# ------------------------------------------------------------------ GL_2, the unipotent block

@dataclass
class DecompositionReport:
    q: int
    dim: int
    projective: bool
    free_part: int          # dim H' e_inf
    summands: list          # dim H'S e_a, a in k^x
    total_rank: int
    s_rule: bool            # tau_s e_a is the sum of the other e_b

    @property
    def ok(self) -> bool:
        return (self.projective and self.dim == self.q + 1 and self.free_part == 2
                and all(d == 1 for d in self.summands) and self.total_rank == self.dim and self.s_rule)


def _bruhat_cell_index(q: int, B: np.ndarray, g) -> int:
    """Column of the C' basis B (one column per B-coset) supported on U g."""
    C = build_C(2, q)
    i = int(C.cs.index_of(np.asarray(g)[None])[0])
    cols = np.flatnonzero(B[i])
    if len(cols) != 1:
        raise AssertionError("C' basis columns are not supported on disjoint B-orbits")
    return int(cols[0])


def gl2_decomposition(q: int) -> DecompositionReport:
    """C' = H' e_inf + sum over a in k^x of H'S e_a, with e_inf the indicator of B."""
    Hp = build_hprime(2, q)
    F, A, M = Hp.F, Hp.algebra, Hp.C1
    k = M.dim
    s = glnq.simple_reflection(2, 0).mat()
    cols = {"inf": _bruhat_cell_index(q, Hp.B, glnq.identity(2))}
    for a in range(q):
        u = glnq.elementary(F, 2, 0, 1, a)
        cols[a] = _bruhat_cell_index(q, Hp.B, glnq.bmatmul(F, s, u))
    if len(set(cols.values())) != k:
        raise AssertionError("the e_a do not exhaust B\\G")
    e = {x: np.eye(k, dtype=np.int64)[:, c] for x, c in cols.items()}
    S = M.act(Hp.S(0))
    s_rule = True
    for x, v in e.items():
        others = np.zeros(k, dtype=np.int64)
        for y in e:
            if y != x:
                others = F.vadd(others, e[y])
        # the operator of tau_s on C' is S (eps_1 acts as the identity there)
        s_rule &= bool(np.array_equal(la.matvec(F, S, v), others))
    free = np.stack([e["inf"], la.matvec(F, S, e["inf"])], axis=1)
    summands = []
    parts = [free]
    for a in F.units():
        img = la.matvec(F, S, e[a]).reshape(-1, 1)
        summands.append(la.rank(F, img))
        parts.append(img)
    total = la.rank(F, np.concatenate(parts, axis=1))
    free_dim = la.rank(F, free)
    verdict = is_projective(M)
    return DecompositionReport(q, k, verdict.projective, free_dim, summands, total, s_rule)


# ------------------------------------------------------------------ per-block projectivity of C

@dataclass
class BlockVerdict:
    members: list
    regular: bool
    algebra_dim: int
    module_dim: int
    projective: bool
    witness: dict = field(default_factory=dict)


@dataclass
class ProjectivityReport:
    n: int
    q: int
    blocks: list

    @property
    def projective(self) -> bool:
        return all(b.projective for b in self.blocks)

    @property
    def certificate(self) -> BlockVerdict | None:
        """A block on which C is not projective, when there is one."""
        return next((b for b in self.blocks if not b.projective), None)


def c_projectivity(n: int, q: int, stop_early: bool = False) -> ProjectivityReport:
    H = build_H(n, q)
    out = []
    for g in H.orbits:
        alg, mod, _ = block_module(H, g)
        v = is_projective(mod)
        wit = {k: x for k, x in v.witness.items() if k != "section"}
        out.append(BlockVerdict([c.exponents for c in g.members], g.regular, alg.dim, mod.dim,
                                v.projective, wit))
        if stop_early and not v.projective:
            break
    return ProjectivityReport(n, q, out)


def cprime_projectivity(n: int, q: int):
    return is_projective(build_hprime(n, q).C1)


# ------------------------------------------------------------------ GL_2, regular blocks

def _regular_pairs(H: HeckeAlgebra) -> list[tuple[Character, Character]]:
    s = glnq.simple_reflection(2, 0).perm
    return [(g.members[0], g.members[0].act(s, H.q)) for g in H.orbits if g.regular]


def tau_s_image(H: HeckeAlgebra, chi: Character) -> np.ndarray:
    """Basis of tau_s C_chi inside C."""
    s = H.simple[0]
    return la.column_basis(H.F, H.C.tau_apply(s, chi_basis(H.C, chi)))


@dataclass
class SequenceRow:
    chi: tuple
    chi_s: tuple
    dim_c_chi: int
    dim_s_chi: int          # dim tau_s C_chi
    dim_s_chi_s: int        # dim tau_s C_{chi^s}
    ideal_exact: bool       # the sequence of right ideals of H_gamma
    tensor_dim: int         # dim tau_s eps_chi H (x)_H C
    tensor_rank: int        # rank of the natural map to C
    kernel_oracle: int      # dim C_chi - dim tau_s C_{chi^s} - dim tau_s C_chi

    @property
    def kernel(self) -> int:
        return self.tensor_dim - self.tensor_rank

    @property
    def exact(self) -> bool:
        return self.dim_s_chi + self.dim_s_chi_s == self.dim_c_chi


def _ideal_sequence_exact(H: HeckeAlgebra, chi: Character, chi_s: Character) -> bool:
    F, A = H.F, H.algebra
    ts = H.tau(H.simple[0])
    sub = right_ideal(A, H.mul(ts, H.eps(chi_s)))
    mid = right_ideal(A, H.eps(chi))
    quo = right_ideal(A, H.mul(ts, H.eps(chi)))
    # left multiplication by tau_s, written in the bases above
    f = la.coords(F, quo, la.matmul(F, A.left_matrix(ts), mid))
    inc = la.coords(F, mid, sub)
    maps = [np.zeros((sub.shape[1], 0), dtype=np.int64), inc, f, np.zeros((0, quo.shape[1]), dtype=np.int64)]
    return check_exact(F, maps).exact


def gl2_sequences(q: int) -> list[SequenceRow]:
    """For each regular orbit {chi, chi^s}: dimensions in the sequence of G-representations
    and the kernel of tau_s eps_chi H (x)_H C -> C."""
    H = build_H(2, q)
    orbit = {c.exponents: g for g in H.orbits for c in g.members}
    rows = []
    for chi, chi_s in _regular_pairs(H):
        x = H.mul(H.tau(H.simple[0]), H.eps(chi))
        # x lies in H_gamma, so x H (x)_H C = x H_gamma (x)_{H_gamma} C_gamma
        blk = block_algebra(H, orbit[chi.exponents])
        alg, Cg, _ = block_module(H, orbit[chi.exponents], blk)
        emb = blk[1]
        xg = la.coords(H.F, emb, x.reshape(-1, 1))[:, 0]
        ideal, inc = right_ideal_module(alg, xg)
        res = tensor_over_algebra(ideal, Cg, inclusion=inc)
        d_chi = chi_basis(H.C, chi).shape[1]
        a = tau_s_image(H, chi).shape[1]
        b = tau_s_image(H, chi_s).shape[1]
        rows.append(SequenceRow(chi.exponents, chi_s.exponents, d_chi, a, b,
                                _ideal_sequence_exact(H, chi, chi_s), res.dim, res.map_rank,
                                d_chi - a - b))
    return rows


@dataclass
class KernelReport:
    q: int
    chi: tuple
    dim_K: int
    dim_KU: int
    dim_closure: int
    closure_is_image: bool      # G-span of K^U equals tau_s C_chi
    image_in_K: bool
    proper: bool                # tau_s C_chi is strictly smaller than K
    dim_c_chi_s_U: int


def gl2_kernel(q: int) -> KernelReport:
    """K = ker(tau_s : C_{chi^s} -> C_chi) for the first regular orbit."""
    H = build_H(2, q)
    F, C = H.F, H.C
    chi, chi_s = _regular_pairs(H)[0]
    src = chi_basis(C, chi_s)
    img = C.tau_apply(H.simple[0], src)
    K = la.matmul(F, src, la.nullspace(F, img))

    def u_fixed(V):
        rows = [F.vsub(la.matmul(F, C.g_matrix(u), V), V) for u in glnq.unipotent_generators(F, 2)]
        return la.matmul(F, V, la.nullspace(F, np.concatenate(rows, axis=0)))

    KU = u_fixed(K)
    closure = group_closure(F, C.dim, C.group_perms(), KU)
    image = tau_s_image(H, chi)
    both = np.concatenate([closure, image], axis=1)
    same = la.rank(F, both) == closure.shape[1] == image.shape[1]
    inside = la.rank(F, np.concatenate([K, image], axis=1)) == K.shape[1]
    return KernelReport(q, chi.exponents, K.shape[1], KU.shape[1], closure.shape[1], bool(same),
                        bool(inside), image.shape[1] < K.shape[1], u_fixed(src).shape[1])


# ------------------------------------------------------------------ GL_3, unipotent block

@dataclass
class RankTable:
    q: int
    omega: int
    s2y: int
    ys2: int
    x: int
    dim_cprime: int
    dim_yc: int
    dim_zc: int

    @property
    def balance(self) -> int:
        """Sum of the composition factor dimensions predicted by the ranks."""
        return self.omega + 2 * (self.s2y + self.ys2) + self.x

    def expected(self) -> tuple:
        p = glnq.field_of_order(self.q).p
        r = round(np.log(self.q) / np.log(p))
        m = (p * (p + 1) // 2) ** r
        return (1, m, m, self.q ** 3)


def gl3_rank_table(q: int) -> RankTable:
    Hp = build_hprime(3, q)
    A = Hp.algebra
    Q = gl3_quadruple(Hp)
    return RankTable(q, rank_of(Hp, Q.Om), rank_of(Hp, A.mul(Q.S2, Q.Y)), rank_of(Hp, A.mul(Q.Y, Q.S2)),
                     rank_of(Hp, Q.X), Hp.C1.dim, rank_of(Hp, Q.Y), rank_of(Hp, Q.Z))


@dataclass
class ComplexReport:
    name: str
    dims: tuple          # (sub, middle, quotient)
    defect: int
    sub_equal: bool      # the two descriptions of the left term agree

    @property
    def exact(self) -> bool:
        return self.defect == 0


def _short_complex(F, sub, mid, op, quo) -> int:
    """Defect of 0 -> sub -> mid -> quo -> 0 where the middle map is op (ambient matrix)."""
    inc = la.coords(F, mid, sub)
    f = la.coords(F, quo, la.matmul(F, op, mid))
    maps = [np.zeros((sub.shape[1], 0), dtype=np.int64), inc, f, np.zeros((0, quo.shape[1]), dtype=np.int64)]
    rep = check_exact(F, maps)
    return sum(abs(d) for d in rep.defects)


def _same_span(F, U, V) -> bool:
    r = la.rank(F, np.concatenate([U, V], axis=1))
    return r == U.shape[1] == V.shape[1]


def gl3_complexes(q: int) -> list[ComplexReport]:
    """The two sequences of right ideals of H' and their images in C'."""
    Hp = build_hprime(3, q)
    F, A, M = Hp.F, Hp.algebra, Hp.C1
    Q = gl3_quadruple(Hp)
    out = []

    def ideal(x):
        return right_ideal(A, x)

    def image(x):
        return la.column_basis(F, M.act(x))

    # ideals: sub, middle, map, quotient; alternative description of sub
    specs = [
        ("ideal_Y", A.mul(Q.Y, Q.S2), Q.Y, Q.S2, A.mul(Q.S2, Q.Y), A.mul(Q.S2s, Q.Z)),
        ("ideal_Z", A.mul(Q.Z, Q.S2s), Q.Z, Q.S2s, A.mul(Q.S2s, Q.Z), A.mul(Q.S2, Q.Y)),
    ]
    for name, sub, mid, g, quo, alt in specs:
        S, Mi, Qu = ideal(sub), ideal(mid), ideal(quo)
        d = _short_complex(F, S, Mi, A.left_matrix(g), Qu)
        out.append(ComplexReport(name, (S.shape[1], Mi.shape[1], Qu.shape[1]), d, _same_span(F, S, ideal(alt))))
    for name, sub, mid, g, quo, alt in [
        ("image_Y", A.mul(Q.Y, Q.S2), Q.Y, Q.S2, A.mul(Q.S2, Q.Y), A.mul(Q.S2s, Q.Z)),
        ("image_Z", A.mul(Q.Z, Q.S2s), Q.Z, Q.S2s, A.mul(Q.S2s, Q.Z), A.mul(Q.S2, Q.Y)),
    ]:
        S, Mi, Qu = image(sub), image(mid), image(quo)
        op = M.act(g)
        inc_ok = la.rank(F, np.concatenate([Mi, S], axis=1)) == Mi.shape[1]
        img = la.matmul(F, op, Mi)
        img_ok = la.rank(F, np.concatenate([Qu, img], axis=1)) == Qu.shape[1]
        if not (inc_ok and img_ok):
            raise AssertionError(f"({name}) is not a complex of subspaces")
        d = _short_complex(F, S, Mi, op, Qu)
        out.append(ComplexReport(name, (S.shape[1], Mi.shape[1], Qu.shape[1]), d, _same_span(F, S, image(alt))))
    return out


def expected_exact(q: int) -> bool:
    return _is_prime(q)
