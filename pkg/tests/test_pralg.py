import itertools
import random

import pytest
from hypothesis import given, settings

from conftest import formulas
from lpalg.corpus import load_proof
from lpalg.pralg import (
    PrError, build_pr_algebra, canonical, element, law_report, opaque_atoms, propositional_formulas, tautology,
)
from lpalg.proofs import System
from lpalg.syntax import Dialect, parse_formula, show

F = parse_formula


def small_algebra(atoms=("p", "q"), depth=1, proofs=()):
    entries = [(phi, None) for phi in propositional_formulas(atoms, depth)]
    entries += [(p.conclusion, p) for p in proofs]
    return build_pr_algebra(entries)


def test_classes_by_equivalence():
    assert element(F("p | q")) == element(F("q | p"))
    assert element(F("~~p")) == element(F("p"))
    assert element(F("p")) != element(F("q"))
    assert element(F("x:p")) != element(F("y:p"))
    assert element(F("x:p | ~x:p")) == element(F("q -> q"))


def test_join_and_negation():
    alg = small_algebra()
    p, q = element(F("p")), element(F("q"))
    assert alg.join(p, q) == element(F("p | q"))
    assert alg.neg(p) == element(F("~p"))
    assert alg.zero == element(F("bot"))
    assert alg.one == element(F("p -> p"))
    assert alg.meet(p, q) == element(F("p & q"))


@pytest.mark.parametrize("atoms,depth,size", [((), 1, 2), (("p",), 1, 4), (("p", "q"), 1, 16)])
def test_fragment_sizes(atoms, depth, size):
    alg = small_algebra(atoms, depth)
    assert alg.size() == size
    assert law_report(alg).ok


def test_laws_three_atoms_sampled():
    """The exhaustive sweep is 256 cubed, so sample triples instead."""
    alg = small_algebra(("p", "q", "r"), 0)
    assert alg.size() == 256
    els = alg.elements
    rng = random.Random(0)
    j, m, n = alg.join, alg.meet, alg.neg
    for _ in range(2000):
        a, b, c = (rng.choice(els) for _ in range(3))
        assert j(a, m(b, c)) == m(j(a, b), j(a, c))
        assert j(a, j(b, c)) == j(j(a, b), c)
        assert n(j(a, b)) == m(n(a), n(b))
        assert j(a, n(a)) == alg.one and m(a, n(a)) == alg.zero
        assert alg.leq(a, b) == alg.leq_by_entailment(a, b)


def test_order_matches_entailment():
    alg = small_algebra()
    els = alg.elements
    for a, b in itertools.product(els, repeat=2):
        assert alg.leq(a, b) == alg.leq_by_entailment(a, b)


def test_application():
    alg = small_algebra()
    assert alg.app(element(F("p -> q")), element(F("p"))) == element(F("q"))
    assert alg.app(element(F("p -> q")), element(F("~~p"))) == element(F("q"))
    assert alg.app(element(F("p -> q")), element(F("q"))) == alg.zero
    assert alg.app(element(F("p")), element(F("p"))) == alg.zero
    assert show(alg.app(element(F("p -> q")), element(F("p"))).rep) == "q"


def test_application_depends_on_representative():
    """q | ~p and p -> q are one class, but only the second reads as an implication."""
    alg = small_algebra()
    assert element(F("q | ~p")) == element(F("p -> q"))
    assert alg.app(element(F("q | ~p")), element(F("p"))) == alg.zero


def test_bang_of_lifted_derivation():
    entry = load_proof("lift_or")
    alg = build_pr_algebra([(entry.proof.conclusion, entry.proof)], entry.cs)
    b = alg.bang(alg.table[canonical(entry.proof.conclusion)])
    assert show(b.rep) == "c*x:(p | q)"
    assert b.proof is not None and b.proof.conclusion == b.rep


def test_bang_without_derivation():
    alg = small_algebra()
    with pytest.raises(PrError):
        alg.bang(element(F("p | q")))


def test_mismatched_derivation():
    entry = load_proof("lift_or")
    with pytest.raises(PrError):
        build_pr_algebra([(F("q"), entry.proof)])


def test_recorded_derivation_is_the_representative():
    entry = load_proof("lift_or")
    alg = build_pr_algebra([(F("q | p"), None), (entry.proof.conclusion, entry.proof)], entry.cs)
    e = alg.table[canonical(F("p | q"))]
    assert e.proof is entry.proof


def test_closure_limit():
    with pytest.raises(PrError):
        build_pr_algebra([(F(a), None) for a in "pqr"], limit=100)


@given(formulas(Dialect.LPB, max_leaves=5))
@settings(max_examples=200, deadline=None)
def test_canonical_agrees_with_truth_tables(phi):
    """Diagram classes coincide with classical equivalence over opaque atoms."""
    ats = opaque_atoms(phi)
    assert (canonical(phi) == canonical(F("p -> p"))) == tautology(phi)
    if len(ats) <= 4:
        assert canonical(phi) == canonical(F(f"~~({show(phi)})"))


def test_lp_system_default():
    alg = small_algebra()
    assert alg.system is System.LP
