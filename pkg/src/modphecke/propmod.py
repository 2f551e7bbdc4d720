"""Length-truncated models of H~ (x)_H V, where H~ is the pro-p Iwahori Hecke algebra
and V is C, C^N or C^U, with the left H-action given by the case rules."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import affweyl as aw
from . import glnq
from . import linalg as la
from . import umod
from .affweyl import ExtAffElem
from .errors import RelationFailure, TruncationOverflow
from .glnq import WeylElem
from .modalg import invariants_subspace


def _lift_s(F, n: int, i: int) -> ExtAffElem:
    w = glnq.sl2_reflection(F, n, i)
    return ExtAffElem(w.perm, (0,) * n, w.diag)


def _finite(x: ExtAffElem) -> WeylElem:
    if any(x.lam):
        raise RelationFailure(f"{x} is not in the finite Weyl group")
    t = x.t if x.t is not None else (1,) * x.n
    return WeylElem(x.w0, t)


def _split_torus(x: ExtAffElem) -> tuple[ExtAffElem, tuple]:
    t = x.t if x.t is not None else (1,) * x.n
    return ExtAffElem(x.w0, x.lam), t


@dataclass
class Generator:
    kind: str          # "s" or "t"
    index: int         # simple reflection index, or the torus element itself for kind "t"
    t: tuple | None = None

    def __str__(self):
        return f"tau_s{self.index}" if self.kind == "s" else f"tau_t{self.t}"


class BlockOp:
    """An operator on the model stored as vdim x vdim blocks keyed by (target, source) component."""

    def __init__(self, F, ncomp: int, vdim: int):
        self.F, self.ncomp, self.vdim = F, ncomp, vdim
        self.blocks: dict = {}

    def add(self, r: int, c: int, A) -> None:
        if (r, c) in self.blocks:
            self.blocks[r, c] = self.F.vadd(self.blocks[r, c], A)
        else:
            self.blocks[r, c] = np.asarray(A, dtype=np.int64)

    def block(self, r: int, c: int) -> np.ndarray:
        return self.blocks.get((r, c), np.zeros((self.vdim, self.vdim), dtype=np.int64))

    def apply(self, Y) -> np.ndarray:
        """The operator applied to the columns of Y (dim x k)."""
        F, v = self.F, self.vdim
        out = np.zeros_like(Y)
        for (r, c), A in self.blocks.items():
            src = Y[c * v:(c + 1) * v]
            if np.any(src):
                out[r * v:(r + 1) * v] = F.vadd(out[r * v:(r + 1) * v], la.matmul(F, A, src))
        return out

    def apply_blocks(self, Y: dict) -> dict:
        """The operator on a block vector {component: vdim x k array}."""
        F = self.F
        out: dict = {}
        for (r, c), A in self.blocks.items():
            if c in Y:
                Z = la.matmul(F, A, Y[c])
                out[r] = F.vadd(out[r], Z) if r in out else Z
        return out

    def dense(self) -> np.ndarray:
        v = self.vdim
        M = np.zeros((self.ncomp * v, self.ncomp * v), dtype=np.int64)
        for (r, c), A in self.blocks.items():
            M[r * v:(r + 1) * v, c * v:(c + 1) * v] = A
        return M


@dataclass
class TruncatedModel:
    """Components tau_d (x) V for d in D of length <= L (modulo the centre)."""

    n: int
    q: int
    L: int
    kind: str
    H: umod.HeckeAlgebra
    B: np.ndarray                     # basis of V inside C (columns)
    D: list
    lengths: dict
    dcount: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {d: k for k, d in enumerate(self.D)}
        self.vdim = self.B.shape[1]
        self.dim = len(self.D) * self.vdim
        self._ops: dict = {}
        self.F = self.H.F
        Fx = self.F
        # tau_s^2 = tau_s . sum_t a_t tau_t in the finite algebra
        self._square = []
        for i in range(self.n - 1):
            s = self.H.simple[i]
            sq = self.H.mul(self.H.tau(s), self.H.tau(s))
            coeffs = {}
            for w, c in self.H.as_dict(sq).items():
                st = s.inverse(Fx).mul(Fx, w)
                if not st.is_torus():
                    raise RelationFailure("tau_s^2 is not supported on sT")
                coeffs[st.diag] = c
            self._square.append(coeffs)

    @property
    def one(self) -> ExtAffElem:
        return aw.identity(self.n)

    def component(self, x, d) -> np.ndarray:
        k = self.index[d]
        return x[k * self.vdim:(k + 1) * self.vdim]

    def embed(self, d, v) -> np.ndarray:
        x = np.zeros(self.dim, dtype=np.int64)
        k = self.index[d]
        x[k * self.vdim:(k + 1) * self.vdim] = v
        return x

    def op(self, w: WeylElem) -> np.ndarray:
        """Matrix of tau_w on V."""
        if w not in self._ops:
            self._ops[w] = self.H.operator(self.H.tau(w), None if self.kind == "C" else self.B)
        return self._ops[w]

    def _torus_comb(self, coeffs: dict) -> np.ndarray:
        F = self.F
        out = np.zeros((self.vdim, self.vdim), dtype=np.int64)
        for t, c in coeffs.items():
            out = F.vadd(out, F.scal(c, self.op(glnq.torus_elem(t))))
        return out

    # ---------------------------------------------------------------- case rules

    def rule(self, gen: Generator, d: ExtAffElem) -> tuple[str, ExtAffElem, np.ndarray]:
        """(case, target component, matrix) describing gen . (tau_d (x) v)."""
        F, n = self.F, self.n
        if gen.kind == "t":
            # tau_t tau_d = tau_d tau_{d^-1 t d}
            t = tuple(gen.t[d.w0[j]] for j in range(n))
            return "t", d, self.op(glnq.torus_elem(t))
        s = _lift_s(F, n, gen.index)
        ld = self.lengths[d]
        sd = s.mul(d, F)
        sd_plain, t2 = _split_torus(sd)
        key = sd_plain.normalized()
        lsd = aw.length(sd_plain)
        if lsd == ld + 1:
            if key in self.index or aw.is_distinguished(sd_plain):
                if key not in self.index:
                    raise TruncationOverflow(f"s{gen.index} {d} leaves the window")
                # tau_s tau_d = tau_{sd} = tau_{(sd)'} tau_{t2}
                return "up", key, self.op(glnq.torus_elem(t2))
            x = d.inverse(F).mul(sd, F)
            return "fold", d, self.op(_finite(x))
        if lsd == ld - 1:
            # d = s e t*, with e in D; tau_s tau_d = tau_s^2 tau_e tau_t*
            e_full = s.inverse(F).mul(d, F)
            e_plain, _ = _split_torus(e_full)
            if not aw.is_distinguished(e_plain):
                raise RelationFailure("length-decreasing s d left D")
            coeffs = {}
            for t, c in self._square[gen.index].items():
                # tau_t tau_e = tau_e tau_{e^-1 t e}
                te = tuple(t[e_plain.w0[j]] for j in range(n))
                coeffs[te] = F.add(coeffs.get(te, 0), c)
            return "down", d, self._torus_comb(coeffs)
        raise RelationFailure(f"length of s d is {lsd}, of d is {ld}")

    def act_left(self, gen: Generator, x) -> np.ndarray:
        F = self.F
        out = np.zeros(self.dim, dtype=np.int64)
        for d in self.D:
            v = self.component(x, d)
            if not np.any(v):
                continue
            if self.lengths[d] > self.L - 1:
                raise TruncationOverflow(f"component {d} is outside the safety window")
            _, tgt, A = self.rule(gen, d)
            k = self.index[tgt]
            out[k * self.vdim:(k + 1) * self.vdim] = F.vadd(out[k * self.vdim:(k + 1) * self.vdim],
                                                             la.matvec(F, A, v))
        return out

    def matrix(self, gen: Generator, max_len: int | None = None) -> BlockOp:
        """Action restricted to the components of length <= max_len (default L - 1)."""
        max_len = self.L - 1 if max_len is None else max_len
        M = BlockOp(self.F, len(self.D), self.vdim)
        for d in self.D:
            if self.lengths[d] > max_len:
                continue
            _, tgt, A = self.rule(gen, d)
            M.add(self.index[tgt], self.index[d], A)
        return M

    @cached_property
    def generators(self) -> list[Generator]:
        gens = [Generator("s", i) for i in range(self.n - 1)]
        for t in self.H.torus_gens:
            gens.append(Generator("t", -1, t.diag))
        return gens

    def case_counts(self) -> dict:
        counts: dict = {}
        for d in self.D:
            if self.lengths[d] > self.L - 1:
                continue
            for g in self.generators:
                c = self.rule(g, d)[0]
                counts[c] = counts.get(c, 0) + 1
        return counts


def _vspace(H: umod.HeckeAlgebra, kind: str, spec=None) -> np.ndarray:
    C, F = H.C, H.F
    if kind == "C":
        return np.eye(C.dim, dtype=np.int64)
    if kind == "C^U":
        gens = glnq.unipotent_generators(F, H.n)
    elif kind == "C^N":
        gens = spec.generators_N(F)
    else:
        raise ValueError(f"unknown component kind {kind}")
    if not gens:
        return np.eye(C.dim, dtype=np.int64)
    return invariants_subspace(F, C.dim, [C.g_perm(g) for g in gens])


def build_model(n: int, q: int, L: int, kind: str = "C", spec=None) -> TruncatedModel:
    rep = aw.enumerate_D(n, L)
    H = umod.build_H(n, q)
    D = list(rep.by_roots)
    lengths = {d: rep.lengths[d] for d in D}
    B = _vspace(H, kind, spec)
    return TruncatedModel(n, q, L, kind, H, B, D, lengths)


def n_invariant_model(n: int, q: int, spec, L: int) -> TruncatedModel:
    return build_model(n, q, L, "C^N", spec)


# ------------------------------------------------------------------ checks

@dataclass
class StabilityReport:
    inputs: int
    violations: int
    cases: dict

    @property
    def stable(self) -> bool:
        return self.violations == 0


def complement_stability(model: TruncatedModel) -> StabilityReport:
    """The span of the components d != 1 is stable under every generator."""
    one = model.index[model.one]
    viol = inputs = 0
    for g in model.generators:
        M = model.matrix(g)
        for d in model.D:
            if d == model.one or model.lengths[d] > model.L - 1:
                continue
            k = model.index[d]
            inputs += model.vdim
            viol += int(np.count_nonzero(np.any(M.block(one, k) != 0, axis=0)))
    return StabilityReport(inputs, viol, model.case_counts())


@dataclass
class ProjectionReport:
    checked: int
    failures: int

    @property
    def ok(self) -> bool:
        return self.failures == 0


def summand_projection_check(model: TruncatedModel) -> ProjectionReport:
    """Projection onto the d = 1 component commutes with every generator on the safety window."""
    # with P the projection onto the d = 1 block, PM = MP on a source block c means:
    # block (1, c) vanishes for c != 1, and block (r, 1) vanishes for r != 1
    one = model.index[model.one]
    window = [model.index[d] for d in model.D if model.lengths[d] <= model.L - 1]
    failures = checked = 0
    for g in model.generators:
        M = model.matrix(g)
        checked += 1
        bad = any(np.any(M.block(one, c)) for c in window if c != one)
        bad |= any(np.any(A) for (r, c), A in M.blocks.items() if c == one and r != one)
        failures += int(bad)
    return ProjectionReport(checked, failures)


def anchor_check(model: TruncatedModel) -> bool:
    """The d = 1 block of every generator equals the finite action on V."""
    one = model.index[model.one]
    H = model.H
    for g in model.generators:
        block = model.matrix(g).block(one, one)
        w = H.simple[g.index] if g.kind == "s" else glnq.torus_elem(g.t)
        if not np.array_equal(block, model.op(w)):
            return False
    return True


@dataclass
class RelationReport:
    checked: int
    failures: list


def _bv_add(F, a: dict, b: dict, c: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        v = v if c == 1 else F.scal(c, v)
        out[k] = F.vadd(out[k], v) if k in out else v
    return out


def _bv_equal(a: dict, b: dict) -> bool:
    """Equality of block vectors, a missing block counting as zero."""
    for k in set(a) | set(b):
        x, y = a.get(k), b.get(k)
        if x is None or y is None:
            if np.any(x if y is None else y):
                return False
        elif not np.array_equal(x, y):
            return False
    return True


def relation_check(model: TruncatedModel, margin: int = 3) -> RelationReport:
    """Quadratic, braid and torus relations of H on components of length <= L - margin.

    Vectors are handled blockwise, one source component at a time.
    """
    F, n = model.F, model.n
    vd = model.vdim
    mats = {str(g): model.matrix(g) for g in model.generators}
    H = model.H
    words = {w: tuple(str(g) for g in _word(model, w)) for w in H.basis}
    failures: set = set()
    checked = 0
    sources = [model.index[d] for d in model.D if model.lengths[d] <= model.L - margin]
    for c in sources:
        memo: dict = {(): {c: np.eye(vd, dtype=np.int64)}}

        def act(word: tuple) -> dict:
            if word not in memo:
                memo[word] = mats[word[0]].apply_blocks(act(word[1:]))
            return memo[word]

        def element_action(x) -> dict:
            out: dict = {}
            for w, coef in H.as_dict(x).items():
                out = _bv_add(F, out, act(words[w]), coef)
            return out

        # every product of a generator with a basis element, compared with the finite product
        for g in model.generators:
            gw = H.simple[g.index] if g.kind == "s" else glnq.torus_elem(g.t)
            for w in H.basis:
                if w.length > 1:
                    continue
                lhs = act((str(g),) + words[w])
                rhs = element_action(H.mul(H.tau(gw), H.tau(w)))
                if not _bv_equal(lhs, rhs):
                    failures.add((str(g), str(w)))
        for i in range(n - 2):
            a, b = str(Generator("s", i)), str(Generator("s", i + 1))
            if not _bv_equal(act((a, b, a)), act((b, a, b))):
                failures.add(("braid", str(i)))
    for g in model.generators:
        checked += sum(1 for w in H.basis if w.length <= 1)
    checked += n - 2
    return RelationReport(checked, sorted(failures))


def _word(model: TruncatedModel, w: WeylElem) -> list[Generator]:
    """Generators whose product is tau_w in the finite Hecke algebra (reduced word, then the torus part)."""
    F, n = model.F, model.n
    word = glnq.reduced_word(w.perm)
    head = glnq.identity_weyl(n)
    for i in word:
        head = head.mul(F, glnq.sl2_reflection(F, n, i))
    t = head.inverse(F).mul(F, w)
    if not t.is_torus():
        raise RelationFailure("torus part of a Weyl element is not diagonal")
    gens = [Generator("s", i) for i in word]
    tgen = _torus_word(model, t.diag)
    return gens + tgen


def _torus_word(model: TruncatedModel, t) -> list[Generator]:
    F = model.F
    out = []
    for i, x in enumerate(t):
        e = F.dlog(x)
        gen = model.H.torus_gens[i].diag
        out += [Generator("t", -1, gen)] * e
    return out


def embedding_check(small: TruncatedModel, big: TruncatedModel) -> bool:
    """The C^U-model sits inside the C^N-model as an H-stable subspace."""
    F = small.F
    E_v = la.coords(F, big.B, small.B)
    E = np.kron(np.eye(len(small.D), dtype=np.int64), E_v)
    if small.D != big.D:
        raise ValueError("models must share the window")
    span = la.Subspace(F, big.dim, E.T)
    for g in big.generators:
        M = big.matrix(g)
        for d in small.D:
            if small.lengths[d] > small.L - 1:
                continue
            k = small.index[d]
            cols = M.apply(E[:, k * small.vdim:(k + 1) * small.vdim])
            if not all(span.contains(c) for c in cols.T):
                return False
    return True


@dataclass
class EpsCommutationReport:
    checked: int
    failures: int


def eps_commutation_check(model: TruncatedModel) -> EpsCommutationReport:
    """Recompute the length-decreasing case as -sum_{chi^s = chi} eps_{chi^e} and compare.

    Here e = s^-1 d and chi^e(t) = chi(e t e^-1); the model itself uses the torus expansion of tau_s^2.
    """
    F, n, H = model.F, model.n, model.H
    sign = 1 if n % 2 == 0 else F.neg(1)
    checked = failures = 0
    for d in model.D:
        if d == model.one or model.lengths[d] > model.L - 1:
            continue
        for i in range(n - 1):
            case, _, A = model.rule(Generator("s", i), d)
            if case != "down":
                continue
            s = _lift_s(F, n, i)
            e = s.inverse(F).mul(d, F)
            x = np.zeros(H.dim, dtype=np.int64)
            for chi in H.chars:
                if chi.act(H.simple[i].perm, H.q) != chi:
                    continue
                for t in H.torus():
                    ete = glnq.conj_torus(t, e.w0)
                    k = H.index[glnq.torus_elem(t)]
                    x[k] = F.add(x[k], F.mul(sign, chi.value(F, ete)))
            x = F.vneg(x)
            B = None if model.kind == "C" else model.B
            checked += 1
            failures += int(not np.array_equal(H.operator(x, B), A))
    return EpsCommutationReport(checked, failures)
