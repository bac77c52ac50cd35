"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from itertools import product

from conftest import ACCEPTANCE
from pairtopo.acfqe import (
    KSystem,
    decide_at,
    eliminate_exists,
    equivalent,
    from_system,
    union,
)
from pairtopo.difffield import OmegaElement, k_dependence, t, wronskian_eval
from pairtopo.exactalg import MPoly
from pairtopo.formulas import (
    BasicFormulaBlock,
    Or,
    free_variables,
    parse,
    parse_poly,
    to_blocks,
    to_text,
)
from pairtopo.pairsets import (
    Constructible,
    _rational_decomposition,
    _sample_in,
    c_difference,
    closure,
    complement,
    coord_names,
    member,
    mk_kn,
    mk_span,
    mk_xn,
    mk_yn,
    zariski_restrict_k,
)
from pairtopo.ranks import OrdinalRank, mr_bounds, mr_catalog, sdim
from pairtopo.sampling import point_pool, random_point
from pairtopo.translator import (
    decide_combined,
    decide_direct,
    holds,
    member_cert,
    translate,
    translate_combination,
)

from suites import BLOCK_SUITE, FORMULA_CORPUS, VARS, ZARISKI_CASES, catalog_closed_sets, random_systems


def record(number, title, ok, detail=""):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE[number] = line
    print(line)
    assert ok, line


def test_criterion_1_wronskian_dependence():
    rng = random.Random(1)
    start = time.perf_counter()
    bad, dependent = 0, 0
    for _ in range(500):
        tup = random_point(rng, rng.randint(1, 4), max_order=3, height=10)
        cert = k_dependence(tup)
        w = wronskian_eval(tup)
        if (w == 0) != (cert is not None):
            bad += 1
        if cert is not None:
            dependent += 1
            if sum((c * a for c, a in zip(cert, tup)), OmegaElement(0)) != 0:
                bad += 1
    elapsed = time.perf_counter() - start
    record(1, "Wronskian vanishes exactly on dependent tuples", bad == 0 and elapsed < 30,
           f"500 tuples, {dependent} dependent, {bad} failures, {elapsed:.1f}s")


def test_criterion_2_dual_path():
    start = time.perf_counter()
    mismatches = 0
    for text, n in BLOCK_SUITE:
        block = to_blocks(parse(text), free_vars=coord_names(n))
        assert isinstance(block, BasicFormulaBlock)
        assert block.n <= 3 and block.m <= 2 and block.s <= 2
        cert = translate(block)
        for p in point_pool(n, 100, seed=2):
            if member_cert(cert, p) != decide_direct(block, p):
                mismatches += 1
    elapsed = time.perf_counter() - start
    record(2, "certificate membership equals direct decision",
           mismatches == 0 and elapsed < 300 and len(BLOCK_SUITE) >= 10,
           f"{len(BLOCK_SUITE)} blocks x 100 points, {mismatches} mismatches, {elapsed:.1f}s")


def test_criterion_3_worked_translation():
    block = to_blocks(parse("exists y in U. x2 = y*x1"))
    cert = translate(block)
    probes = [((1, 5), True), ((t(0), 3 * t(0)), True), ((1, t(0)), False),
              ((0, 1), False), ((0, 0), True)]
    got = [member_cert(cert, p) for p, _ in probes]
    ok = got == [e for _, e in probes]
    record(3, "worked translation probes", ok, f"{len(cert.cells)} K-cells, results {got}")


def _existential_family(C):
    """The defining condition of a basic closed set on rational points, as a k-system."""
    eqs, cvars, groups = [], [], []
    for bi, blk in enumerate(C.block_components()):
        basis, g = _rational_decomposition(blk)
        cs = [f"c{bi}_{i}" for i in range(len(blk))]
        cvars += cs
        groups.append(cs)
        for l in range(len(basis)):
            eqs.append(sum((MPoly.var(c) * g[i][l] for i, c in enumerate(cs)), MPoly.zero()))
    out = None
    for pick in product(*groups):
        neq = MPoly.const(1)
        for c in pick:
            neq = neq * MPoly.var(c)
        r = eliminate_exists(KSystem(tuple(cvars), coord_names(C.n), tuple(eqs), neq))
        out = r if out is None else union(out, r)
    return out


def test_criterion_4_k_restriction():
    failures = []
    for name, C, expected in ZARISKI_CASES:
        polys = zariski_restrict_k(C)
        if expected is not None and [str(p) for p in polys] != expected:
            failures.append(f"{name}: family {polys}")
        rng = random.Random(name)
        names = coord_names(C.n)
        for _ in range(50):
            pt = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(C.n))
            vals = dict(zip(names, pt))
            if member(C, pt) != all(p.evaluate(vals) == 0 for p in polys):
                failures.append(f"{name}: point {pt}")
        family = from_system(KSystem((), names, tuple(polys)))
        if not equivalent(family, _existential_family(C)):
            failures.append(f"{name}: ideal-level check")
    record(4, "k-restriction of basic closed sets", not failures,
           f"{len(ZARISKI_CASES)} sets x 50 points, ideal-level via elimination"
           + (f"; {failures[:3]}" if failures else ""))


def test_criterion_5_acf_elimination():
    a, b = MPoly.var("a"), MPoly.var("b")
    inv = eliminate_exists(KSystem(("b",), ("a",), (a * b - 1,)))
    sq = eliminate_exists(KSystem(("b",), ("a",), (b ** 2 - a,)))
    classics = inv.pairs == (((), a),) and sq.is_everything()
    disagreements = 0
    rng = random.Random(5)
    systems = random_systems(10, seed=55)
    for s in systems:
        assert len(s.exist_vars) <= 2
        assert max(p.total_degree() for p in s.equations + (s.inequation,)) <= 3
        r = eliminate_exists(s)
        for _ in range(50):
            vals = {v: Fraction(rng.randint(-4, 4), rng.randint(1, 2)) for v in VARS}
            if r.member(vals) != decide_at(s, vals):
                disagreements += 1
    record(5, "elimination over the constants", classics and disagreements == 0,
           f"exists b(ab=1) -> {inv}; exists b(b^2=a) -> {sq}; "
           f"10 systems x 50 points, {disagreements} disagreements")


def test_criterion_6_rank_catalog():
    checks = {}
    for n in (1, 2, 3):
        checks[f"sdim(Omega^{n})={n}"] = sdim(Constructible.full(n)).value == n
        checks[f"sdim(k^{n})=0"] = sdim(mk_kn(n)).value == 0
    checks["sdim(Y2)=1"] = sdim(mk_yn(2)).value == 1
    for name, C in catalog_closed_sets().items():
        checks[f"sdim({name})<{C.n}"] = sdim(C).upper < C.n
    checks["MR(k)=1"] = mr_catalog("kPower", 1) == OrdinalRank(0, 1)
    checks["MR(Omega)=omega"] = mr_catalog("omegaPower", 1) == OrdinalRank(1, 0)
    checks["MR(k+k alpha)=2"] = mr_catalog("kPlusKAlpha") == OrdinalRank(0, 2)
    checks["MR(span(1,t0))=2"] = mr_bounds(mk_span([1, t(0)])).lower == OrdinalRank(0, 2)
    y2 = mr_bounds(mk_yn(2))
    checks["MR(Y2)<omega*2"] = y2.strict_upper and y2.upper == OrdinalRank(2, 0)
    rest = mr_bounds(complement(mk_yn(2)))
    checks["MR(Omega^2 minus Y2)=omega*2"] = rest.exact and rest.lower == OrdinalRank(2, 0)
    failed = [k for k, v in checks.items() if not v]
    record(6, "rank catalog", not failed, f"{len(checks)} checks" + (f"; failed {failed}" if failed else ""))


def closure_instances():
    Cl = Constructible.closed
    return {
        "X2": mk_xn(2),
        "Y2 minus k^2": c_difference(Cl(mk_yn(2)), Cl(mk_kn(2))),
        "Omega minus 0": complement(mk_yn(1)),
        "Omega^2 minus Y2": complement(mk_yn(2)),
        "span(1,t0) minus 0": c_difference(Cl(mk_span([1, t(0)])), Cl(mk_yn(1))),
        "Y3 minus k^3": c_difference(Cl(mk_yn(3)), Cl(mk_kn(3))),
    }


def test_criterion_7_closure_invariance():
    problems = []
    for name, X in closure_instances().items():
        res = closure(X, samples=100, seed=7)
        if res.tag != "exact":
            problems.append(f"{name}: tag {res.tag}")
            continue
        again = closure(Constructible.closed(res.closed), samples=100, seed=7)
        if again.closed != res.closed:
            problems.append(f"{name}: not idempotent")
        a, b = sdim(X), sdim(res.closed)
        if not (a.exact and b.exact and a.value == b.value):
            problems.append(f"{name}: sdim {a.lower}..{a.upper} vs {b.lower}..{b.upper}")
        rng = random.Random(name)
        members = res.closed.members
        for i in range(100):
            if i % 2 == 0 and members:
                p = _sample_in(members[i % len(members)], rng, 1)[0]
            else:
                p = random_point(rng, X.n)
            if member(X, p) and not member(res.closed, p):
                problems.append(f"{name}: not extensive at {p}")
                break
    count = len(closure_instances())
    record(7, "closure keeps small dimension", not problems and count >= 5,
           f"{count} instances x 100 samples" + (f"; {problems}" if problems else ""))


def test_criterion_8_front_end():
    problems = []
    for text in FORMULA_CORPUS:
        f = parse(text)
        if parse(to_text(f)) != f:
            problems.append(f"round trip: {text}")
    assert len(FORMULA_CORPUS) == 30
    for idx, text in enumerate(FORMULA_CORPUS):
        f = parse(text)
        free = free_variables(f)
        comb = translate_combination(to_blocks(f, free_vars=free))
        for p in point_pool(len(free), 100, seed=idx):
            if holds(f, p, free) != decide_combined(comb, p):
                problems.append(f"truth: {text} at {p}")
                break
    shape = to_blocks(parse("exists y in U. x1 != 0 and x2 != 1 and x1 = y"))
    if not (isinstance(shape, BasicFormulaBlock) and shape.p0 == parse_poly("x1*(x2 - 1)")):
        problems.append("inequations not multiplied together")
    dist = to_blocks(parse("exists y in U. (x1 = y or x2 = y)"))
    if not (isinstance(dist, Or) and all(isinstance(a, BasicFormulaBlock) for a in dist.args)):
        problems.append("existential not distributed over disjunction")
    record(8, "parser, printer and normal form", not problems,
           "30 formulas, 100 points each" + (f"; {problems[:3]}" if problems else ""))


CLI_RUNS = [
    ["--format", "json", "translate", "exists y in U. x2 = y*x1"],
    ["translate", "exists y in U. x1*y != 1 and x2 = y^2"],
    ["member", "exists y in U. x2 = y*x1", "(2, 3)"],
    ["--format", "json", "member", "exists y in U. x2 = y*x1", "(1, t0)"],
    ["--seed", "7", "closure", "X2"],
    ["--seed", "7", "--format", "json", "closure", "x1 = 0 or x2 != 0"],
    ["--seed", "7", "sdim", "Y2"],
    ["--seed", "7", "--format", "json", "sdim", "X2"],
    ["--seed", "7", "mr", "k"],
    ["--seed", "7", "--format", "json", "mr", "Y2"],
    ["wronskian", "1, t0, t0^2"],
]


def _cli(argv, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    proc = subprocess.run([sys.executable, "-m", "pairtopo", *argv],
                          capture_output=True, env=env, timeout=300)
    return proc.returncode, proc.stdout


def test_criterion_9_determinism():
    differing = []
    for argv in CLI_RUNS:
        a, b = _cli(argv, 1), _cli(argv, 2)
        if a != b or a[0] != 0:
            differing.append(" ".join(argv))
    record(9, "repeated CLI runs are byte-identical", not differing,
           f"{len(CLI_RUNS)} commands run twice under different hash seeds"
           + (f"; differing {differing}" if differing else ""))
