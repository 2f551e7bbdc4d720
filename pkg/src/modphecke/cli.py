"""Command-line driver: runs families of checks and writes a JSON or CSV report.

Exit status is 0 when every check passes, 1 when some check fails and 2 on a
configuration error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import __version__

SCHEMA = "modphecke-report/1"
DEFAULT_SEED = 20240229

# supported parameter ranges per command
FINITE_Q = {2: (2, 3, 4, 5, 7, 8, 9), 3: (2, 3, 4)}
AFFINE_L = {2: 12, 3: 8}
PROPMOD = {2: (5, 8), 3: (3, 4)}      # n -> (max q, max L)
BUILDING = {2: {2: 6, 3: 6, 5: 6}, 3: {2: 3, 3: 2}}


class ConfigError(ValueError):
    pass


@dataclass
class Check:
    name: str
    anchor: str
    run: Callable[[], tuple]


@dataclass
class Record:
    name: str
    anchor: str
    passed: bool
    numbers: dict
    witness: str
    elapsed_ms: float | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self, timings: bool) -> dict:
        out = {"name": self.name, "anchor": self.anchor, "verdict": "pass" if self.passed else "fail",
               "numbers": self.numbers, "witness": self.witness}
        if timings:
            out["elapsed_ms"] = self.elapsed_ms
        return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    return x


# ------------------------------------------------------------------ finite

def _prime(q: int) -> bool:
    return q > 1 and all(q % k for k in range(2, int(q ** 0.5) + 1))


def finite_checks(n: int, q: int) -> list[Check]:
    from . import finite as fin
    from . import umod

    checks = []

    def structure():
        bad = umod.path_mismatches(n, q)
        H = umod.build_H(n, q)
        return bad == 0, {"mismatches": bad, "pairs": H.dim ** 2, "dim_H": H.dim}, "convolution vs relations"

    def idem():
        H = umod.build_H(n, q)
        ids = umod.idempotents(H)
        dims = sorted(umod.block_basis(H.C, g).shape[1] for g in ids.blocks)
        ok = sum(dims) == H.C.dim
        return ok, {"characters": len(ids.eps), "blocks": len(ids.blocks), "block_dims": dims,
                    "dim_C": H.C.dim}, "orthogonal idempotents summing to 1"

    def c_proj():
        r = fin.c_projectivity(n, q)
        expected = _prime(q) if n == 2 else q == 2
        cert = r.certificate
        wit = "all blocks split" if cert is None else f"block {cert.members[0]} has no section"
        return r.projective == expected, {"projective": r.projective, "expected": expected,
                                          "blocks": [[b.members[0], b.projective] for b in r.blocks]}, wit

    def cprime_proj():
        v = fin.cprime_projectivity(n, q)
        expected = True if n == 2 else _prime(q)
        return v.projective == expected, {"projective": v.projective, "expected": expected,
                                          "generators": v.witness.get("generators")}, v.verdict

    checks += [Check("structure_constants", "(1.2), (1.9)", structure),
               Check("idempotents", "(1.8)", idem),
               Check("C_projective", "Prop 2.2" if n == 2 else "Prop 4.13", c_proj),
               Check("Cprime_projective", "Prop 2.1" if n == 2 else "Prop 4.12", cprime_proj)]

    if n == 2:
        def decomp():
            r = fin.gl2_decomposition(q)
            return r.ok, {"dim": r.dim, "free_part": r.free_part, "summands": r.summands,
                          "total_rank": r.total_rank}, "H' e_inf + sum of H'S e_a"

        def seqs():
            rows = fin.gl2_sequences(q)
            expected = _prime(q)
            ok = all(r.ideal_exact and r.exact == expected and r.kernel == r.kernel_oracle for r in rows)
            nums = {"rows": [{"chi": r.chi, "dim_C_chi": r.dim_c_chi, "dim_tau_s_C_chi": r.dim_s_chi,
                              "dim_tau_s_C_chi_s": r.dim_s_chi_s, "tensor_kernel": r.kernel,
                              "kernel_oracle": r.kernel_oracle} for r in rows],
                    "expected_exact": expected}
            return ok, nums, f"{len(rows)} regular orbits"

        checks += [Check("gl2_decomposition", "Prop 2.1", decomp),
                   Check("gl2_sequences", "(2.1), (2.2)", seqs)]
        if not _prime(q):
            def kernel():
                r = fin.gl2_kernel(q)
                ok = r.dim_KU == 1 and r.closure_is_image and r.image_in_K and r.proper
                return ok, {"dim_K": r.dim_K, "dim_KU": r.dim_KU, "dim_closure": r.dim_closure,
                            "dim_C_chi_s_U": r.dim_c_chi_s_U}, f"chi = {r.chi}"
            checks.append(Check("gl2_kernel", "Prop 2.3", kernel))
    else:
        def ranks():
            r = fin.gl3_rank_table(q)
            got = (r.omega, r.s2y, r.ys2, r.x)
            ok = got == r.expected() and r.dim_yc == r.dim_zc == q + q * q
            if _prime(q):
                ok &= r.balance == r.dim_cprime
            return ok, {"omega": r.omega, "S2Y": r.s2y, "YS2": r.ys2, "X": r.x, "dim_YC": r.dim_yc,
                        "dim_ZC": r.dim_zc, "balance": r.balance, "dim_Cprime": r.dim_cprime}, "ranks on C'"

        def complexes():
            rows = fin.gl3_complexes(q)
            ok = True
            for c in rows:
                want = True if c.name.startswith("ideal") else _prime(q)
                ok &= c.exact == want and c.sub_equal
            return ok, {c.name: {"dims": c.dims, "defect": c.defect} for c in rows}, "exactness table"

        def special():
            H = umod.build_H(n, q)
            se = umod.special_elements(H, strict=False)
            return all(se.lemma_chain), {"chain": se.lemma_chain, "product_is_one_G": se.product_is_one_G}, \
                "1_G, st and the eps_1 chain"

        checks += [Check("gl3_ranks", "Props 4.5, 4.8", ranks),
                   Check("gl3_complexes", "(4.15)-(4.18)", complexes),
                   Check("special_elements", "Lemma 3.19", special)]
    return checks


# ------------------------------------------------------------------ affine

def affine_checks(n: int, L: int) -> list[Check]:
    from . import affweyl as aw

    def d_table():
        r = aw.enumerate_D(n, L)
        table = [[str(d), r.lengths[d]] for d in r.by_roots]
        ok = r.agree and r.injective and r.oracle_mismatches == 0 and table[0] == [str(aw.identity(n)), 0]
        return ok, {"elements": len(r.elements), "D": len(r.by_roots), "compared_cosets": r.compared_cosets,
                    "oracle_mismatches": r.oracle_mismatches, "table": table}, "roots vs minimal length"

    def prop51():
        r = aw.check_prop51(n, L)
        return r.violations == 0, {"checked": r.checked, "violations": r.violations,
                                   "general_checked": r.general_checked,
                                   "general_counterexamples": len(r.general_counterexamples)}, "l(dw) = l(d) + l(w)"

    def lemma53():
        r = aw.check_lemma53(n, L)
        return not r.violations, {"checked": r.checked, "violations": len(r.violations)}, "sd dichotomy"

    return [Check("affine_D", "(5.1.1)", d_table),
            Check("affine_prop51", "Prop 5.1", prop51),
            Check("affine_lemma53", "Lemma 5.3", lemma53)]


# ------------------------------------------------------------------ propmod

def propmod_checks(n: int, q: int, L: int) -> list[Check]:
    from . import propmod as pm

    def model():
        return pm.build_model(n, q, L)

    def stability():
        r = pm.complement_stability(model())
        return r.stable, {"inputs": r.inputs, "violations": r.violations, "cases": r.cases}, "d != 1 span"

    def projection():
        r = pm.summand_projection_check(model())
        return r.ok, {"checked": r.checked, "failures": r.failures}, "projection to d = 1"

    def anchor():
        ok = pm.anchor_check(model())
        return ok, {"equal": ok}, "d = 1 block equals C"

    def relations():
        r = pm.relation_check(model())
        return not r.failures, {"checked": r.checked, "failures": len(r.failures)}, "finite relations"

    def eps():
        r = pm.eps_commutation_check(model())
        return r.failures == 0, {"checked": r.checked, "failures": r.failures}, "two routes for tau_s^2"

    return [Check("propmod_stability", "Lemma 5.10", stability),
            Check("propmod_projection", "Prop 5.14", projection),
            Check("propmod_anchor", "Prop 5.8", anchor),
            Check("propmod_relations", "(5.1)", relations),
            Check("propmod_eps", "Cor 5.12", eps)]


# ------------------------------------------------------------------ building

def building_checks(n: int, p: int, R: int, seed: int) -> list[Check]:
    from . import building as bd

    def ball():
        return bd.enumerate_ball(n, p, R)

    def stats():
        b = ball()
        return b.method_agreement, {"vertices": len(b.vertices), "edges": len(b.edges),
                                    "chambers": len(b.chambers) if n == 3 else 0}, "scan vs search"

    def d2():
        ok = bd.boundary_squared_zero(ball())
        return ok, {"zero": ok}, "position incidence"

    def homology():
        r = bd.homology_ranks(ball())
        return r.acyclic, {"chain_dims": r.chain_dims, "reduced_betti": r.reduced_betti}, "reduced homology"

    def interval():
        bad = 0
        grid = 0
        for m in range(1, 6):
            for a1 in range(-5, 6):
                for a2 in range(a1 - 10, a1 + 11):
                    grid += 1
                    bad += bd.interval_oracle(a1, a2, m) != [bd.iwahori_interval(a1, a2, m)]
        return bad == 0, {"grid": grid, "disagreements": bad}, "valuation search"

    out = [Check("building_ball", "(7.1)", stats),
           Check("building_boundary", "(5.1.2)", d2),
           Check("building_homology", "Prop 7.2", homology),
           Check("building_interval", "Prop 6.1", interval)]
    if n == 2:
        def tree():
            r = bd.tree_checks(ball())
            return r.ok, {"counts": r.counts, "expected": r.expected, "unique_lower": r.unique_lower}, \
                "unique lower neighbour"
        out.append(Check("building_tree", "(6.1)", tree))
    else:
        def lemma71():
            b = ball()
            r = bd.check_lemma71(b)
            tops = bd.top_vertex_counts(b)
            ok = r.ok and set(tops) <= {1, 2} and bd.thick(b)
            return ok, {"chambers": r.chambers, "types": {f"{k[0]}{k[1]}" if isinstance(k, tuple) else k: v
                                                          for k, v in sorted(r.type_counts.items())},
                        "violations": len(r.violations), "lower_neighbour_violations": len(r.lower_neighbour_violations),
                        "top_vertices": tops}, "types (a) and (b)"

        def support():
            r = bd.support_radius_property(ball(), 500, seed)
            return r.violations == 0, {"trials": r.trials, "violations": r.violations}, f"seed {seed}"
        out += [Check("building_lemma71", "Lemma 7.1", lemma71),
                Check("building_support", "Prop 7.2", support)]
    return out


# ------------------------------------------------------------------ driver

def _threads() -> int:
    raw = os.environ.get("MODPHECKE_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise ConfigError(f"MODPHECKE_THREADS={raw!r} is not an integer")
    if k < 1:
        raise ConfigError("MODPHECKE_THREADS must be positive")
    return k


def _run_one(c: Check) -> Record:
    t0 = time.perf_counter()
    try:
        ok, nums, wit = c.run()
    except Exception as exc:  # a raised check failure is reported, not propagated
        ok, nums, wit = False, {}, f"{type(exc).__name__}: {exc}"
    ms = round((time.perf_counter() - t0) * 1000, 1)
    return Record(c.name, c.anchor, bool(ok), _jsonable(nums), wit, ms)


def run_checks(checks: list[Check], threads: int = 1) -> list[Record]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            recs = list(ex.map(_run_one, checks))
    else:
        recs = [_run_one(c) for c in checks]
    return sorted(recs, key=lambda r: r.name)


def validate(args) -> dict:
    """Normalised configuration; raises ConfigError outside the supported ranges."""
    cmd = args.command
    cfg = {"command": cmd, "seed": args.seed}
    if cmd in ("finite", "all"):
        n, q = args.n or 2, args.q or 3
        if n not in FINITE_Q or q not in FINITE_Q[n]:
            raise ConfigError(f"finite supports n=2 with q in {FINITE_Q[2]} and n=3 with q in {FINITE_Q[3]}")
        cfg["finite"] = {"n": n, "q": q}
    if cmd in ("affine", "all"):
        n, L = args.n or 2, args.len if args.len is not None else 8
        if n not in AFFINE_L or not 0 <= L <= AFFINE_L[n]:
            raise ConfigError(f"affine supports n in (2, 3) with len up to {AFFINE_L}")
        cfg["affine"] = {"n": n, "len": L}
    if cmd in ("propmod", "all"):
        n, q, L = args.n or 2, args.q or 3, args.len if args.len is not None else 6
        if n not in PROPMOD or q > PROPMOD[n][0] or not 2 <= L <= PROPMOD[n][1] or q not in FINITE_Q[n]:
            raise ConfigError(f"propmod supports (n: max q, max len) = {PROPMOD}")
        cfg["propmod"] = {"n": n, "q": q, "len": L}
    if cmd in ("building", "all"):
        n, p, R = args.n or 2, args.p or 3, args.radius if args.radius is not None else 3
        if n not in BUILDING or p not in BUILDING[n] or not 1 <= R <= BUILDING[n][p]:
            raise ConfigError(f"building supports n -> p -> max radius {BUILDING}")
        cfg["building"] = {"n": n, "p": p, "radius": R}
    return cfg


def collect(cfg: dict) -> list[Check]:
    checks = []
    if "finite" in cfg:
        checks += finite_checks(cfg["finite"]["n"], cfg["finite"]["q"])
    if "affine" in cfg:
        checks += affine_checks(cfg["affine"]["n"], cfg["affine"]["len"])
    if "propmod" in cfg:
        c = cfg["propmod"]
        checks += propmod_checks(c["n"], c["q"], c["len"])
    if "building" in cfg:
        c = cfg["building"]
        checks += building_checks(c["n"], c["p"], c["radius"], cfg["seed"])
    return checks


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def build_report(cfg: dict, records: list[Record], timings: bool) -> dict:
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "config": cfg,
        "config_hash": config_hash(cfg),
        "checks": [r.to_json(timings) for r in records],
        "passed": all(r.passed for r in records),
    }


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "verdict", "value"])
    for c in report["checks"]:
        w.writerow([c["name"], c["verdict"], json.dumps(c["numbers"], sort_keys=True, separators=(",", ":"))])
    return buf.getvalue()


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modphecke", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("finite", "affine", "propmod", "building", "all"):
        sp = sub.add_parser(name)
        sp.add_argument("--n", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--radius", type=int)
        sp.add_argument("--len", type=int)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--timings", action="store_true", help="include per-check wall time")
    return ap


def main(argv=None) -> int:
    ap = parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = validate(args)
        threads = _threads()
    except ConfigError as exc:
        print(f"modphecke: configuration error: {exc}", file=sys.stderr)
        return 2
    records = run_checks(collect(cfg), threads)
    text = render(build_report(cfg, records, args.timings), args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for r in records:
        if not r.passed:
            print(f"FAILED {r.name}: {r.witness}", file=sys.stderr)
    return 0 if all(r.passed for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
