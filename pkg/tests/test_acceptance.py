"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line.  Integer quantities are compared
exactly; wall-clock limits are pinned below.
"""
import time

import pytest

from modphecke import affweyl as aw
from modphecke import building as bd
from modphecke import finite as fin
from modphecke import parab, propmod, umod

# wall-clock budgets in seconds
BUDGET_CPRIME_GL2 = 5.0
BUDGET_C_GL2 = 60.0
BUDGET_C_GL3 = 600.0


def report(num, ok, detail):
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def timed(f, *a, **k):
    t = time.perf_counter()
    out = f(*a, **k)
    return out, time.perf_counter() - t


def test_criterion_01_gl2_cprime_decomposes():
    rows = []
    for q in (2, 3, 4, 5):
        r, dt = timed(fin.gl2_decomposition, q)
        rows.append((q, r.ok and r.dim == q + 1 and len(r.summands) == q - 1, dt))
    ok = all(good and dt < BUDGET_CPRIME_GL2 for _, good, dt in rows)
    report(1, ok, " ".join(f"q={q}:{'ok' if g else 'bad'}/{dt:.1f}s" for q, g, dt in rows))


def test_criterion_02_gl2_c_projective_iff_prime():
    t = time.perf_counter()
    verdicts = {q: fin.c_projectivity(2, q).projective for q in (2, 3, 4, 5, 9)}
    kernels = [r.kernel for r in fin.gl2_sequences(4)]
    dt = time.perf_counter() - t
    ok = verdicts == {2: True, 3: True, 4: False, 5: True, 9: False}
    ok &= all(k == 1 for k in kernels) and dt < BUDGET_C_GL2
    report(2, ok, f"verdicts={verdicts} kernels(q=4)={kernels} {dt:.1f}s")


def test_criterion_03_gl2_sequence_dimensions():
    sums = {}
    for q in (2, 3, 4, 5):
        sums[q] = {(r.dim_s_chi + r.dim_s_chi_s, r.dim_c_chi) for r in fin.gl2_sequences(q)}
    ok = all(s == {(q + 1, q + 1)} for q, s in sums.items() if q != 4 and s)
    ok &= all(a < 5 and c == 5 for a, c in sums[4])
    report(3, ok, f"(sum, dim C_chi) per q: {sums}")


def test_criterion_04_gl2_kernel_at_four():
    r = fin.gl2_kernel(4)
    ok = r.dim_KU == 1 and r.closure_is_image and r.image_in_K and r.proper
    report(4, ok, f"dim K={r.dim_K} dim K^U={r.dim_KU} dim closure={r.dim_closure}")


def test_criterion_05_gl3_rank_table():
    got = {}
    for q in (2, 3, 4):
        r = fin.gl3_rank_table(q)
        got[q] = ((r.omega, r.s2y, r.ys2, r.x), r.balance, r.dim_cprime)
    want = {2: (1, 3, 3, 8), 3: (1, 6, 6, 27), 4: (1, 9, 9, 64)}
    ok = all(got[q][0] == want[q] for q in want)
    ok &= all(got[p][1] == got[p][2] == (1 + p) * (1 + p + p * p) for p in (2, 3))
    report(5, ok, f"ranks/balance/dim C': {got}")


def test_criterion_06_gl3_cprime_and_complexes():
    proj = {q: fin.cprime_projectivity(3, q).projective for q in (2, 3, 4)}
    defects = {q: [c.defect for c in fin.gl3_complexes(q)] for q in (2, 3, 4)}
    ok = proj == {2: True, 3: True, 4: False}
    ok &= defects[2] == defects[3] == [0, 0, 0, 0]
    ok &= defects[4] == [0, 0, 2, 2]
    report(6, ok, f"C' projective={proj} defects={defects}")


def test_criterion_07_gl3_c_projectivity():
    r2 = fin.c_projectivity(3, 2)
    r3, dt = timed(fin.c_projectivity, 3, 3)
    cert = r3.certificate
    ok = r2.projective and not r3.projective and cert is not None and dt < BUDGET_C_GL3
    ok &= cert is not None and cert.witness.get("augmented_rank", 0) > cert.witness.get("rank", 0)
    report(7, ok, f"q=2 {r2.projective}; q=3 {r3.projective} via block {cert.members if cert else None} "
                  f"in {dt:.0f}s")


def test_criterion_08_structure_constants():
    bad = {nq: umod.path_mismatches(*nq) for nq in [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3)]}
    report(8, all(v == 0 for v in bad.values()), f"mismatches={bad}")


@pytest.mark.parametrize("q", [2, 3])
def test_criterion_09_parabolic_suite(q):
    parts = {}
    for name in ("2,1", "T"):
        spec = parab.levi_from_name(3, name)
        D = parab.dm_reps(spec)
        parts[f"dm[{name}]"] = D.by_scan == D.by_roots
        parts[f"free[{name}]"] = parab.freeness_check(spec, q).free
        parts[f"cosets[{name}]"] = parab.lemma38_check(spec, q).ok
        x = parab.xi_P_check(spec, q)
        parts[f"xi[{name}]"] = x.bijective and x.inverse_formula_ok
        F = umod.build_C(3, q).F
        ps = parab.psi_basis_check(parab.det_rep(F, spec, 0), spec, q)
        parts[f"psi[{name}]"] = ps.bijective and ps.shift_rule and ps.levi_rule
    se = umod.special_elements(umod.build_H(3, q), strict=True)
    parts["one_G"] = se.product_is_one_G
    parts["chain"] = all(se.lemma_chain)
    st = umod.steinberg_dims(3, q)
    parts["steinberg"] = st.injective and st.expected == q ** 3
    bad = [k for k, v in parts.items() if not v]
    report(9, not bad, f"q={q} {len(parts)} checks, failing: {bad or 'none'}")


def test_criterion_10_affine_suite():
    out = []
    for n, L in [(2, 10), (3, 6)]:
        orc = aw.word_oracle(n, L)
        lengths = all(aw.length(e) == orc.length(e) for e in orc.elements())
        D = aw.enumerate_D(n, L)
        additive = aw.check_prop51(n, L)
        sd = aw.check_lemma53(n, L)
        out.append((n, lengths, D.agree and D.injective and D.oracle_mismatches == 0,
                    additive.violations == 0 and additive.checked > 0, sd.violations == [] and sd.checked > 0))
    report(10, all(all(r[1:]) for r in out), f"(n, length, D, W0 form, sd) = {out}")


def test_criterion_11_propmod_suite():
    out = {}
    for nqL in [(2, 2, 6), (2, 3, 6), (3, 2, 4)]:
        m = propmod.build_model(*nqL)
        out[nqL] = (propmod.complement_stability(m).stable, propmod.summand_projection_check(m).ok,
                    propmod.anchor_check(m))
    report(11, all(all(v) for v in out.values()), f"(stable, projection, anchor) = {out}")


def test_criterion_12_building_suite():
    notes = []
    ok = True
    for n, p, R in [(3, 2, 1), (3, 2, 2), (3, 2, 3), (3, 3, 1), (3, 3, 2)]:
        b = bd.enumerate_ball(n, p, R)
        r = bd.check_lemma71(b)
        good = (b.method_agreement and r.ok and r.unclassifiable == 0 and set(bd.top_vertex_counts(b)) <= {1, 2}
                and bd.boundary_squared_zero(b) and bd.homology_ranks(b).acyclic)
        ok &= good
        notes.append(f"({n},{p},{R}):{len(b.vertices)}v/{r.chambers}c")
    for p in (2, 3, 5):
        for R in range(1, 7):
            b = bd.enumerate_ball(2, p, R)
            t = bd.tree_checks(b)
            counts = [sum(1 for v in b.vertices if b.dist[v] == k) for k in range(1, R + 1)]
            ok &= t.ok and counts == [(p + 1) * p ** (k - 1) for k in range(1, R + 1)]
            ok &= bd.boundary_squared_zero(b) and bd.homology_ranks(b).acyclic
    bad = sum(bd.interval_oracle(a1, a2, m) != [bd.iwahori_interval(a1, a2, m)]
              for m in range(1, 6) for a1 in range(-5, 6) for a2 in range(a1 - 10, a1 + 11))
    ok &= bad == 0
    report(12, ok, " ".join(notes) + f" trees p<=5 R<=6, interval disagreements={bad}")
