"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed at the end of the run.

Run directly with ``python3 tests/test_acceptance.py`` for the same lines without pytest.
"""
import itertools
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import enumerate_terms, random_term  # noqa: E402
from lpalg.algfile import parse_algebra_file, read_box_table, read_cs, read_lpb_algebra, read_poly_algebra  # noqa: E402
from lpalg.corpus import (  # noqa: E402
    algebra_files, check_entry, corpus, load_cs, load_proof, nontheorems, refute_nontheorem,
)
from lpalg.evidence import BinaryModel, eval_formula, refute  # noqa: E402
from lpalg.finitealg import (  # noqa: E402
    FiniteBA, box_table_from_model, stone, transport, transport_conditions, verify_full_lp,
)
from lpalg.internalize import ConstantOracle, internalize  # noqa: E402
from lpalg.lpbalg import (  # noqa: E402
    TermStructure, bi_stone, bi_stone_poly, bistone_conditions, bistone_poly_conditions, eval_term,
    interp_poly, pconst, peval, pjoin, pneg, pointwise_ops, poly_equal, pvar, random_full_lpb,
    term_assignments, two_terms, verify_full_lpb, verify_poly_lpb,
)
from lpalg.pralg import build_pr_algebra, canonical, element, law_report, propositional_formulas  # noqa: E402
from lpalg.proofs import SCHEME_IDS, check_proof, match_scheme  # noqa: E402
from lpalg.syntax import (  # noqa: E402
    ONE, ZERO, App, Bang, Const, Eq, Neg, Sum, Var, closure_universe, meet, parse_formula, parse_term,
    show, subterms,
)
from lpalg.termbool import brute_force_equal, term_equal  # noqa: E402

F, T = parse_formula, parse_term
RESULTS: dict[int, tuple[bool, str]] = {}

TITLES = {
    1: "derivation check and internalization of the five-step proof",
    2: "evidence values under the one-entry constant specification",
    3: "non-theorem refuted in the minimal model",
    4: "term equality agrees with the truth-table oracle",
    5: "soundness sweep over the corpus",
    6: "finite representation through Stone maps",
    7: "polynomial identities",
    8: "proof algebra laws and operations",
}


def record(n, ok, detail):
    RESULTS[n] = (ok, detail)
    assert ok, detail


# ---------------------------------------------------------------- 1

def criterion_1():
    e = load_proof("pp_chain")
    start = time.perf_counter()
    checked = check_proof(e.proof, cs=e.cs).ok
    term, out = internalize(e.proof, cs=e.cs, oracle=ConstantOracle(e.cs, strict=True))
    rechecked = check_proof(out, cs=e.cs).ok
    elapsed = time.perf_counter() - start
    ok = (checked and e.proof.conclusion == F("p -> p") and len(e.proof.steps) == 5
          and term == T("(a*b)*c") and len(out.steps) == 5 and out.conclusion == F("(a*b)*c:(p -> p)")
          and rechecked and len(e.cs.entries) == 3 and elapsed < 0.1)
    return ok, f"term {show(term)}, {len(out.steps)} steps, re-check {rechecked}, {elapsed * 1000:.1f} ms"


def test_criterion_1():
    record(1, *criterion_1())


# ---------------------------------------------------------------- 2

def criterion_2():
    cs = load_cs("conj_idem.cs")
    phi, top = F("c:(p & p -> p)"), F("c:top")
    vals = []
    for p in (False, True):
        m = BinaryModel.make(cs, valuation={"p": p})
        vals.append((eval_formula(phi, m), eval_formula(top, m), eval_formula(F("(p & p -> p) <-> top"), m)))
    counter = refute(F("c:(p & p -> p) <-> c:top"), cs)
    ok = vals == [(1, 0, 1), (1, 0, 1)] and counter is not None
    return ok, f"values per valuation {vals}, countermodel {'found' if counter else 'missing'}"


def test_criterion_2():
    record(2, *criterion_2())


# ---------------------------------------------------------------- 3

def criterion_3():
    cs = load_cs("pp_chain.cs")
    phi = F("(a*b)*c:(bot -> q)")
    m = refute(phi, cs)
    ok = m is not None and m.box(phi.t, phi.phi) == 0 and eval_formula(phi, m) == 0
    return ok, "evidence value 0" if ok else "no countermodel"


def test_criterion_3():
    record(3, *criterion_3())


# ---------------------------------------------------------------- 4

B_COLUMNS = {
    "B1": lambda s, t, u: (Sum(s, t), Sum(t, s)),
    "B1d": lambda s, t, u: (meet(s, t), meet(t, s)),
    "B2": lambda s, t, u: (Sum(s, Sum(t, u)), Sum(Sum(s, t), u)),
    "B2d": lambda s, t, u: (meet(s, meet(t, u)), meet(meet(s, t), u)),
    "B3": lambda s, t, u: (Sum(s, ZERO), s),
    "B3d": lambda s, t, u: (meet(s, ONE), s),
    "B4": lambda s, t, u: (Sum(s, Neg(s)), ONE),
    "B4d": lambda s, t, u: (meet(s, Neg(s)), ZERO),
    "B5": lambda s, t, u: (Sum(s, meet(t, u)), meet(Sum(s, t), Sum(s, u))),
    "B5d": lambda s, t, u: (meet(s, Sum(t, u)), Sum(meet(s, t), meet(s, u))),
}


def _rewrite(rng, t, pool):
    """An equal term: one Boolean law applied at a random position (congruence inside * and !)."""
    subs = list(subterms(t))
    target = rng.choice(subs)
    s = rng.choice(pool)
    k = rng.randrange(7)
    if k == 0:
        new = Sum(target, ZERO)
    elif k == 1:
        new = Neg(Neg(target))
    elif k == 2:
        new = meet(target, Sum(target, s))
    elif k == 3:
        new = Sum(target, meet(target, s))
    elif k == 4 and isinstance(target, Sum):
        new = Sum(target.t, target.s)
    elif k == 5 and isinstance(target, Sum) and isinstance(target.t, Sum):
        new = Sum(Sum(target.s, target.t.s), target.t.t)
    else:
        new = meet(Sum(target, s), Sum(target, Neg(s)))
    return _replace(t, target, new)


def _replace(t, old, new):
    if t == old:
        return new
    if isinstance(t, Neg):
        return Neg(_replace(t.t, old, new))
    if isinstance(t, Bang):
        return Bang(_replace(t.t, old, new))
    if isinstance(t, Sum):
        return Sum(_replace(t.s, old, new), _replace(t.t, old, new))
    if isinstance(t, App):
        return App(_replace(t.s, old, new), _replace(t.t, old, new))
    return t


def criterion_4(total=100_000, per_column=1000):
    rng = random.Random(2024)
    start = time.perf_counter()
    by_size = enumerate_terms(3)
    small = [t for n in (1, 2, 3) for t in by_size[n]]
    pairs = list(itertools.product(small, repeat=2))
    pool = [random_term(rng, rng.randint(1, 10)) for _ in range(400)]
    remaining = total - len(pairs)
    for i in range(remaining):
        kind = i % 3
        t = random_term(rng, rng.randint(1, 10))
        if kind == 0:
            pairs.append((t, _rewrite(rng, t, pool)))
        elif kind == 1:
            pairs.append((t, rng.choice(pool)))
        else:  # near miss: swap the arguments of an application, or rewrite then perturb
            u = _rewrite(rng, t, pool)
            apps = [x for x in subterms(u) if isinstance(x, App)]
            if apps:
                a = rng.choice(apps)
                u = _replace(u, a, App(a.t, a.s))
            pairs.append((t, u))
    disagree, equal = 0, 0
    for s, t in pairs:
        e = term_equal(s, t)
        equal += e
        disagree += e != brute_force_equal(s, t)
    leaves = [Var("x"), Var("y"), Const("a"), Const("b"), ZERO]
    column_fail = []
    for name, col in B_COLUMNS.items():
        for _ in range(per_column):
            s, t, u = (random_term(rng, rng.randint(1, 6), leaves) for _ in range(3))
            lhs, rhs = col(s, t, u)
            if not term_equal(lhs, rhs) or match_scheme(Eq(lhs, rhs), name) is None:
                column_fail.append(name)
                break
    for _ in range(per_column):
        t = random_term(rng, rng.randint(1, 8), leaves)
        if not term_equal(t, t) or match_scheme(Eq(t, t), "Eq1") is None:
            column_fail.append("Eq1")
            break
    elapsed = time.perf_counter() - start
    ok = disagree == 0 and not column_fail and len(pairs) >= total and elapsed < 60
    return ok, (f"{len(pairs)} pairs ({equal} equal), {disagree} disagreements, "
                f"failed columns {column_fail or 'none'}, {elapsed:.1f} s")


def test_criterion_4():
    record(4, *criterion_4())


# ---------------------------------------------------------------- 5

def criterion_5():
    entries = corpus()
    bad = [e.name for e in entries if not check_entry(e)[0]]
    nts = nontheorems()
    unrefuted = [show(n.formula) for n in nts if refute_nontheorem(n) is None]
    schemes = set()
    rules = set()
    for e in entries:
        for s in e.proof.steps:
            j = s.just
            schemes.add(getattr(j, "scheme", None))
            rules.add(type(j).__name__)
    schemes.discard(None)
    ok = (len(entries) >= 25 and not bad and not unrefuted and schemes >= set(SCHEME_IDS)
          and {"MP", "CSMember", "Int", "JReg", "AppRule"} <= rules)
    return ok, (f"{len(entries)} proofs ({len(schemes)} schemes, rules {sorted(rules)}), failing {bad or 'none'}; "
                f"{len(nts)} non-theorems, unrefuted {unrefuted or 'none'}")


def test_criterion_5():
    record(5, *criterion_5())


# ---------------------------------------------------------------- 6

def criterion_6(randoms=10):
    start = time.perf_counter()
    lines = []
    ok = True
    lp_sources = []
    cs46 = load_cs("conj_idem.cs")
    fu = closure_universe([F("c:(p & p -> p)"), F("c:top")], 1)
    lp_sources.append(("live model", FiniteBA(1), box_table_from_model(BinaryModel.make(cs46), fu), cs46))
    for name, text in algebra_files():
        af = parse_algebra_file(text)
        if af.kind == "full-lp":
            A, box = read_box_table(af)
            lp_sources.append((name, A, box, read_cs(af)))
    for name, A, box, cs in lp_sources:
        B, w = stone(A)
        img = transport(A, box, w)
        good = w.verify().ok and transport_conditions(box, img, w).ok and verify_full_lp(B, img, cs).ok
        ok &= good
        lines.append(f"{name}:{'ok' if good else 'FAIL'}")
    rng = random.Random(6)
    sizes = []
    for _ in range(randoms):
        alg = random_full_lpb(rng)
        img, f, g = bi_stone(alg)
        good = (verify_full_lpb(alg).ok and bistone_conditions(alg, img, f, g).ok and verify_full_lpb(img).ok
                and alg.ts.ba.size() <= 8 and alg.A.size() <= 8 and len(alg.formulas) <= 12)
        ok &= good
        sizes.append((alg.ts.ba.size(), alg.A.size(), len(alg.formulas)))
    for name, text in algebra_files():
        af = parse_algebra_file(text)
        if af.kind == "full-lpb":
            alg = read_lpb_algebra(af)
            img, f, g = bi_stone(alg)
            good = bistone_conditions(alg, img, f, g).ok and verify_full_lpb(img).ok
        elif af.kind == "poly-lpb":
            alg = read_poly_algebra(af)
            img, f, g = bi_stone_poly(alg)
            good = bistone_poly_conditions(alg, img, f, g).ok and verify_poly_lpb(img).ok
        else:
            continue
        ok &= good
        lines.append(f"{name}:{'ok' if good else 'FAIL'}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    return ok, f"{', '.join(lines)}; {randoms} random (|T|,|A|,formulas) {sizes}; {elapsed:.1f} s"


def test_criterion_6():
    record(6, *criterion_6())


# ---------------------------------------------------------------- 7

def _corpus_term_structures():
    out = []
    for name, text in algebra_files():
        af = parse_algebra_file(text)
        if af.kind == "full-lpb":
            out.append((name, read_lpb_algebra(af).ts))
        elif af.kind == "poly-lpb":
            out.append((name, read_poly_algebra(af).ts))
    rng = random.Random(6)
    out += [(f"random{i}", random_full_lpb(rng).ts) for i in range(10)]
    for n in (1, 2, 3):
        out.append((f"powerset{n}", TermStructure(FiniteBA(n), {}, {})))
    return out


def criterion_7(count=10_000):
    ts = two_terms({(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}, {0: 1, 1: 0}, {"a": 1, "b": 0})
    ops = pointwise_ops(ts)
    rng = random.Random(7)
    names = ["x", "y"]
    vs = list(term_assignments(ts, names))
    fails = 0
    for _ in range(count):
        t = random_term(rng, rng.randint(1, 12))
        p = interp_poly(t, ts, ops)
        fails += any(peval(p, v, ts) != eval_term(t, v, ts) for v in vs)
    structures = _corpus_term_structures()
    poly_bad = []
    for name, s in structures:
        if s.ba.size() < 2:
            continue
        x, y = pvar(s, "x"), pvar(s, "y")
        if not poly_equal(pjoin(x, pneg(x)), pconst(s, s.ba.one), s) or poly_equal(x, y, s):
            poly_bad.append(name)
    ok = fails == 0 and not poly_bad
    return ok, (f"{count} terms, {fails} mismatches; x+-x = 1 and x != y on {len(structures)} structures, "
                f"failing {poly_bad or 'none'}")


def test_criterion_7():
    record(7, *criterion_7())


# ---------------------------------------------------------------- 8

def criterion_8():
    details = []
    ok = True
    for atoms in ((), ("p",), ("p", "q")):
        alg = build_pr_algebra([(phi, None) for phi in propositional_formulas(atoms, 1)])
        rep = law_report(alg)
        ok &= rep.ok and alg.size() == 2 ** (2 ** len(atoms))
        details.append(f"{len(atoms)} atoms: {alg.size()} classes {'ok' if rep.ok else 'FAIL'}")
    e = load_proof("lift_or")
    alg = build_pr_algebra([(phi, None) for phi in propositional_formulas(("p", "q"), 1)]
                           + [(e.proof.conclusion, e.proof)], e.cs)
    banged = alg.bang(alg.table[canonical(e.proof.conclusion)])
    applied = alg.app(element(F("p -> q")), element(F("p")))
    mismatch = alg.app(element(F("p -> q")), element(F("q")))
    ok &= (show(banged.rep) == "c*x:(p | q)" and check_proof(banged.proof, cs=e.cs).ok
           and applied == element(F("q")) and mismatch == alg.zero)
    details.append(f"!_Pr gives [{show(banged.rep)}], [p -> q]._Pr[p] = [{show(applied.rep)}]")
    return ok, "; ".join(details)


def test_criterion_8():
    record(8, *criterion_8())


def summary_lines():
    out = []
    for n in sorted(TITLES):
        if n not in RESULTS:
            out.append(f"criterion {n}: NOT RUN  {TITLES[n]}")
            continue
        ok, detail = RESULTS[n]
        out.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {TITLES[n]} ({detail})")
    return out


if __name__ == "__main__":
    for n, fn in enumerate((criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
                            criterion_7, criterion_8), 1):
        try:
            RESULTS[n] = fn()
        except Exception as exc:  # report and keep going
            RESULTS[n] = (False, f"{type(exc).__name__}: {exc}")
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
