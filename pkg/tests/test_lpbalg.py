import itertools
import random

import pytest
from hypothesis import given, settings

from conftest import enumerate_terms, random_term, terms
from lpalg.algfile import parse_algebra_file, read_lpb_algebra, read_poly_algebra
from lpalg.corpus import algebra_files, two_element_structures
from lpalg.finitealg import FiniteBA
from lpalg.lpbalg import (
    LPBError, Polynomial, TermStructure, UniverseError, bi_stone, bi_stone_poly, bistone_conditions,
    bistone_poly_conditions, default_ops, eval_formula, eval_term, extend_ops, interp_poly,
    make_lpb_algebra, make_poly_algebra, minimal_lpb_algebra, pconst, peval, pjoin, pneg,
    pointwise_ops, poly_equal, poly_from_function, pull_back, pvar, random_full_lpb, read_poly,
    term_assignments, two_terms, validity, verify_full_lpb, verify_poly_lpb,
)
from lpalg.syntax import Const, Var, parse_formula, parse_term, show, subterms
from lpalg.termbool import term_equal

F, T = parse_formula, parse_term
PL1 = "p -> p | q"


def meet_structure(**interp):
    return two_terms(interp=interp)


def four_terms(seed=0):
    """A random term structure on the powerset of two atoms."""
    rng = random.Random(seed)
    ba = FiniteBA(2)
    els = ba.elements
    app = {(a, b): rng.choice(els) for a in els for b in els}
    bang = {a: rng.choice(els) for a in els}
    return TermStructure(ba, app, bang, {"a": 1, "b": 2})


def four_poly_terms():
    """A four-element structure whose tables are polynomial: meet and negation."""
    ba = FiniteBA(2)
    els = ba.elements
    return TermStructure(ba, {(a, b): a & b for a in els for b in els}, {a: 3 ^ a for a in els}, {"a": 1, "b": 2})


def all_two_structures():
    for app in itertools.product((0, 1), repeat=4):
        for bang in itertools.product((0, 1), repeat=2):
            yield two_terms({(a, b): app[2 * a + b] for a in (0, 1) for b in (0, 1)}, {0: bang[0], 1: bang[1]})


# ---------------------------------------------------------------- terms

@pytest.mark.parametrize("text,v,want", [
    ("0", {}, 0),
    ("x", {"x": 1}, 1),
    ("-x", {"x": 1}, 0),
    ("x + -x", {"x": 0}, 1),
    ("x * y", {"x": 1, "y": 0}, 0),
    ("!x", {"x": 1}, 1),
    ("a", {}, 1),
    ("a * x", {"x": 0}, 0),
])
def test_eval_term_two(text, v, want):
    assert eval_term(T(text), v, meet_structure(a=1)) == want


def test_eval_term_errors():
    ts = two_terms()
    with pytest.raises(LPBError):
        eval_term(T("x"), {}, ts)
    assert eval_term(T("x"), {}, ts, strict=False) == 0
    with pytest.raises(LPBError):
        eval_term(T("c"), {}, ts)


def test_structure_validation():
    ts = four_terms()
    assert ts.validate() is ts
    broken = TermStructure(FiniteBA(1), {(0, 0): 0}, {0: 0, 1: 1})
    with pytest.raises(LPBError):
        broken.validate()
    with pytest.raises(LPBError):
        TermStructure(FiniteBA(1), {(a, b): 0 for a in (0, 1) for b in (0, 1)}, {0: 0, 1: 1}, {"0": 1}).validate()


def test_with_minted():
    ts = TermStructure(FiniteBA(3), {(a, b): 0 for a in range(8) for b in range(8)}, {a: a for a in range(8)},
                       {"a": 1})
    m = ts.with_minted(["a", "b", "c", "0"])
    assert m.I("a") == 1 and {m.I("b"), m.I("c")} == {2, 4}
    with pytest.raises(LPBError):
        ts.with_minted(["b", "c", "d"])


@given(terms())
@settings(max_examples=150, deadline=None)
def test_equal_terms_agree_in_every_structure(t):
    """Boolean-equal terms take equal values, which is what makes EqTm sound."""
    ts = four_terms(3)
    names = sorted({u.name for u in subterms(t) if isinstance(u, Var)} | {"x"})
    for u in (T("x"), T("0"), T("-0"), T("x * y")):
        if term_equal(t, u):
            for v in term_assignments(ts, names):
                assert eval_term(t, v, ts) == eval_term(u, v, ts)


def test_equal_terms_agree_exhaustive():
    ts = four_terms(5)
    small = [t for ts_ in enumerate_terms(3).values() for t in ts_]
    names = ["x", "y"]
    vs = list(term_assignments(ts, names))
    for s, t in itertools.combinations(small, 2):
        if term_equal(s, t):
            assert all(eval_term(s, v, ts) == eval_term(t, v, ts) for v in vs), (s, t)


# ---------------------------------------------------------------- full algebras

def test_eval_formula_equations_and_boxes():
    ts = meet_structure()
    alg = make_lpb_algebra(FiniteBA(1), ts, {(1, F(PL1)): 1}, [F(PL1), F("x:(" + PL1 + ")"), F("x = y")])
    assert eval_formula(F("x = x"), {"p": 0, "q": 0}, {"x": 0}, alg) == 1
    assert eval_formula(F("x = y"), {"p": 0, "q": 0}, {"x": 0, "y": 1}, alg) == 0
    assert eval_formula(F(f"x:({PL1})"), {"p": 0, "q": 0}, {"x": 1}, alg) == 1
    assert eval_formula(F(f"x:({PL1})"), {"p": 0, "q": 0}, {"x": 0}, alg) == 0
    with pytest.raises(UniverseError):
        eval_formula(F("x:r"), {"r": 0}, {"x": 1}, alg)


def test_make_rejects_outside_universe():
    with pytest.raises(UniverseError):
        make_lpb_algebra(FiniteBA(1), two_terms(), {(1, F("q")): 1}, [F("p")])
    with pytest.raises(LPBError):
        make_lpb_algebra(FiniteBA(1), two_terms(), {(7, F("p")): 1}, [F("p")])


def test_zero_box_is_full():
    alg = make_lpb_algebra(FiniteBA(1), two_terms(), {}, [F("x:(p -> p)"), F("x = x")])
    assert verify_full_lpb(alg).ok


def test_box_of_bottom_breaks_jT():
    alg = make_lpb_algebra(FiniteBA(1), two_terms(), {(1, F("bot")): 1}, [F("bot")])
    rep = verify_full_lpb(alg)
    assert "Al-jT" in rep.conditions_failed()


def test_broken_sum():
    fu = [F(PL1)]
    alg = make_lpb_algebra(FiniteBA(1), two_terms(), {(0, F(PL1)): 1}, fu)
    rep = verify_full_lpb(alg)
    assert rep.conditions_failed() == {"Al-Sum"}
    assert any(v.witness[:2] == ("0x0", "0x1") or v.witness[:2] == ("0x1", "0x0") for v in rep.violations)


def test_al_one_and_cs():
    from lpalg.proofs import System, parse_cs
    cs = parse_cs(f"c : {PL1}\n", System.LPB)
    ts = meet_structure(c=1)
    empty = make_lpb_algebra(FiniteBA(1), ts, {}, [F(PL1)])
    rep = verify_full_lpb(empty, cs, theorems=[F(PL1)])
    assert {"Al-1", "Al-CS"} <= rep.conditions_failed()
    full = minimal_lpb_algebra([F(PL1)], cs, ts)
    assert verify_full_lpb(full, cs, theorems=[F(PL1)]).ok


def test_unlinked_j4_forces_alpha_independence():
    """With bang the identity, Al-j4 plus Al-jT make Box(phi) constant in alpha."""
    fu = [F(PL1), F(f"x:({PL1})")]
    only_one = make_lpb_algebra(FiniteBA(1), two_terms(), {(1, F(PL1)): 1, (1, F(f"x:({PL1})")): 1}, fu)
    assert not verify_full_lpb(only_one).ok
    assert verify_full_lpb(minimal_lpb_algebra(fu)).ok


def test_validity():
    alg = minimal_lpb_algebra([F(PL1), F(f"x:({PL1})")])
    assert validity(alg, F(f"x:({PL1})")) is None
    assert validity(alg, F("x = y")) is not None
    th, v = validity(alg, F("p"))
    assert th["p"] == 0


def test_two_element_structures_count():
    assert len(list(two_element_structures(F("x:p")))) == 64
    assert len(list(two_element_structures(F("a:p")))) == 128


@pytest.mark.parametrize("seed", range(6))
def test_random_full_lpb(seed):
    alg = random_full_lpb(random.Random(seed))
    assert verify_full_lpb(alg).ok
    assert any(x != alg.A.zero for x in alg.box.values())


@pytest.mark.parametrize("seed", range(6))
def test_bi_stone_round_trip(seed):
    alg = random_full_lpb(random.Random(100 + seed))
    image, f, g = bi_stone(alg)
    assert bistone_conditions(alg, image, f, g).ok
    assert verify_full_lpb(image).ok
    back = pull_back(image, f, g, alg)
    assert back.box == alg.box


def test_bi_stone_detects_tampering():
    alg = random_full_lpb(random.Random(1))
    image, f, g = bi_stone(alg)
    (key, val), *_ = image.box.items()
    box = dict(image.box)
    box[key] = image.A.neg(val)
    bad = type(image)(image.A, image.ts, box, image.formulas, image.terms)
    assert "box" in bistone_conditions(alg, bad, f, g).conditions_failed()


# ---------------------------------------------------------------- polynomials

def test_poly_basics():
    ts = four_terms()
    x, y = pvar(ts, "x"), pvar(ts, "y")
    one, zero = pconst(ts, ts.ba.one), pconst(ts, ts.ba.zero)
    assert poly_equal(pjoin(x, pneg(x)), one, ts)
    assert not poly_equal(x, y, ts)
    assert pjoin(x, pneg(x)) == one
    assert pjoin(x, zero) == x
    assert peval(pjoin(x, y), {"x": 1, "y": 2}, ts) == 3
    assert read_poly(x.show(), ts) == x
    with pytest.raises(LPBError):
        read_poly("poly[x](0x2)", ts)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_poly_equal_every_size(n):
    ts = TermStructure(FiniteBA(n), {}, {})
    x, y = pvar(ts, "x"), pvar(ts, "y")
    assert poly_equal(pjoin(x, pneg(x)), pconst(ts, ts.ba.one), ts)
    assert not poly_equal(x, y, ts)


def test_poly_from_function():
    ts = four_terms()
    p = poly_from_function(lambda v: ts.ba.meet(v["x"], v["y"]), ["x", "y"], ts)
    assert all(peval(p, v, ts) == ts.ba.meet(v["x"], v["y"]) for v in term_assignments(ts, ["x", "y"]))
    with pytest.raises(LPBError):  # not atom by atom
        poly_from_function(lambda v: ts.ba.one if v["x"] == 1 else ts.ba.zero, ["x"], ts)


def test_default_extension():
    ts = meet_structure(a=1)
    ops = default_ops(ts)
    assert interp_poly(T("x * y"), ts, ops) == pvar(ts, "x")
    assert interp_poly(T("!y"), ts, ops) == pvar(ts, "y")
    assert interp_poly(T("a * a"), ts, ops) == pconst(ts, 1)
    assert interp_poly(T("x + -x"), ts, ops) == pconst(ts, 1)


def test_pointwise_extension():
    ts = meet_structure(a=1)
    ops = pointwise_ops(ts)
    p = interp_poly(T("x * y"), ts, ops)
    assert p.vars == ("x", "y") and p.tables == (0x8,)
    with pytest.raises(LPBError):  # a random four-element table is not polynomial
        interp_poly(T("x * y"), four_terms(0), pointwise_ops(four_terms(0)))


def test_extend_ops_checks_agreement():
    ts = meet_structure()
    assert extend_ops(ts).kind == "default"
    assert extend_ops(ts, kind="pointwise").kind == "pointwise"
    with pytest.raises(LPBError):
        extend_ops(ts, app=lambda a, b: pconst(ts, 1))
    with pytest.raises(LPBError):
        extend_ops(ts, bang=lambda a: pneg(a))


def _lemma_holds(ts, ops, sample):
    names = ["x", "y"]
    vs = list(term_assignments(ts, names))
    return all(peval(interp_poly(t, ts, ops), v, ts) == eval_term(t, v, ts) for t in sample for v in vs)


def test_interpretation_lemma_needs_pointwise():
    """v(I~(t)) = t^v holds for the pointwise extension in every two-element structure,
    and fails for the default extension in all but one."""
    rng = random.Random(0)
    leaves = [Var("x"), Var("y"), T("0")]
    sample = [random_term(rng, rng.randint(1, 8), leaves) for _ in range(150)]
    default_ok = [_lemma_holds(ts, default_ops(ts), sample) for ts in all_two_structures()]
    pointwise_ok = [_lemma_holds(ts, pointwise_ops(ts), sample) for ts in all_two_structures()]
    assert all(pointwise_ok)
    assert sum(default_ok) == 1
    only = [ts for ts, ok in zip(all_two_structures(), default_ok) if ok][0]
    assert all(only.dot(a, b) == a for a in (0, 1) for b in (0, 1))
    assert all(only.bang_of(a) == a for a in (0, 1))


def test_default_counterexample():
    ts = meet_structure()
    p = interp_poly(T("x * y"), ts, default_ops(ts))
    assert peval(p, {"x": 1, "y": 0}, ts) == 1
    assert eval_term(T("x * y"), {"x": 1, "y": 0}, ts) == 0


@given(terms(max_leaves=5))
@settings(max_examples=100, deadline=None)
def test_poly_congruence(t):
    """Boolean-equal terms have equal polynomials under either extension."""
    for ts, ops in ((four_terms(2), default_ops(four_terms(2))), (four_poly_terms(), pointwise_ops(four_poly_terms()))):
        assert interp_poly(t, ts, ops) == interp_poly(parse_term(f"-(-({show(t)}))"), ts, ops)
        assert interp_poly(t, ts, ops) == interp_poly(parse_term(f"({show(t)}) + 0"), ts, ops)


def test_poly_algebra_verify():
    ts = meet_structure()
    fu = [F(PL1), F(f"x:({PL1})"), F(f"(x+y):({PL1})")]
    classes = {pconst(ts, a) for a in ts.elements}
    ops = default_ops(ts)
    terms_ = [T("x"), T("y"), T("x+y")]
    keyed = {(p, F(PL1)): 1 for p in classes | {interp_poly(t, ts, ops) for t in terms_}}
    keyed |= {(p, F(f"x:({PL1})")): 1 for p in classes | {interp_poly(t, ts, ops) for t in terms_}}
    keyed |= {(p, F(f"(x+y):({PL1})")): 1 for p in classes | {interp_poly(t, ts, ops) for t in terms_}}
    alg = make_poly_algebra(FiniteBA(1), ts, keyed, fu)
    assert verify_poly_lpb(alg).ok
    image, f, g = bi_stone_poly(alg)
    assert bistone_poly_conditions(alg, image, f, g).ok
    assert verify_poly_lpb(image).ok


def test_poly_well_definedness_conflict():
    ts = meet_structure()
    fu = [F(PL1)]
    alg = make_poly_algebra(FiniteBA(1), ts, {(T("x"), F(PL1)): 1, (T("--x"), F(PL1)): 0}, fu)
    rep = verify_poly_lpb(alg)
    assert "well-defined" in rep.conditions_failed()


def test_poly_broken_j4():
    ts = meet_structure()
    fu = [F(PL1), F(f"x:({PL1})")]
    alg = make_poly_algebra(FiniteBA(1), ts, {(pconst(ts, a), F(PL1)): 1 for a in (0, 1)} |
                            {(T("x"), F(PL1)): 1}, fu)
    assert "Al-j4" in verify_poly_lpb(alg).conditions_failed()


def test_poly_stone_map_on_random_terms():
    for ts, ops in ((four_terms(7), default_ops(four_terms(7))), (four_poly_terms(), pointwise_ops(four_poly_terms()))):
        alg = make_poly_algebra(FiniteBA(1), ts, {}, [F("p")], ops=ops)
        image, f, g = bi_stone_poly(alg)
        rng = random.Random(11)
        sample = [random_term(rng, rng.randint(1, 10)) for _ in range(100)]
        assert bistone_poly_conditions(alg, image, f, g, sample).ok


@pytest.mark.parametrize("name,text", [(n, t) for n, t in algebra_files() if "lpb" in t.split("\n", 2)[0]])
def test_bundled_lpb_files(name, text):
    af = parse_algebra_file(text)
    if af.kind == "full-lpb":
        alg = read_lpb_algebra(af)
        assert verify_full_lpb(alg).ok
        image, f, g = bi_stone(alg)
        assert bistone_conditions(alg, image, f, g).ok
    else:
        alg = read_poly_algebra(af)
        assert verify_poly_lpb(alg).ok
        image, f, g = bi_stone_poly(alg)
        assert bistone_poly_conditions(alg, image, f, g).ok
        assert isinstance(next(iter(alg.box))[0], Polynomial)


def test_minimal_algebra_interprets_constants():
    alg = minimal_lpb_algebra([F("a:(p -> p | q)")])
    assert alg.ts.I("a") == 1
    assert Const("a") in set(alg.terms)
