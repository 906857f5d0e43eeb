"""Minimal evidence models over the two-element algebra.

The justified set J(t) of a term is generated by structural recursion from the
constant specification and optional seed pairs::

    J(x)   = seeds(x)
    J(c)   = {phi : c:phi in CS} | seeds(c)
    J(s*r) = {phi : psi in J(r), (psi -> phi) in J(s)} | seeds(s*r)
    J(s+r) = J(s) | J(r) | seeds(s+r)
    J(!s)  = {s:psi : psi in J(s)} | seeds(!s)

Every set is finite when CS and the seeds are, so Box_t(phi) = [phi in J(t)]
is computable. Without seeds this is the least evidence function, and it
satisfies jT under every valuation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .proofs import ConstantSpec, EMPTY_CS, System, match_axiom
from .report import Report
from .syntax import (
    App, Bang, Bottom, Const, Dialect, Formula, Just, Not, Or, ParseError, Prop,
    Sum, Term, Var, all_subterms, as_imp, formula_key, parse_formula, parse_term,
    props, show, subformulas, subterms, uses_lpb,
)


class EvidenceError(ValueError):
    pass


class JTViolation(EvidenceError):
    def __init__(self, t: Term, phi: Formula):
        self.t, self.phi = t, phi
        super().__init__(f"jT fails: {show(phi)} is justified by {show(t)} but false")


def _sorted_formulas(fs: Iterable[Formula]) -> tuple[Formula, ...]:
    return tuple(sorted(set(fs), key=formula_key))


@dataclass(frozen=True)
class BinaryModel:
    cs: ConstantSpec = EMPTY_CS
    seeds: frozenset = frozenset()  # of (Term, Formula)
    valuation: frozenset = frozenset()  # names of true atoms
    window: frozenset | None = None  # finite fragment used for a total CS
    system: System = System.LP
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def make(cls, cs: ConstantSpec = EMPTY_CS, seeds: Iterable[tuple[Term, Formula]] = (),
             valuation: Mapping[str, bool] | Iterable[str] = (), window: Iterable[Formula] | None = None,
             system: System = System.LP) -> "BinaryModel":
        if isinstance(valuation, Mapping):
            valuation = [p for p, v in valuation.items() if v]
        return cls(cs, frozenset(seeds), frozenset(valuation),
                   None if window is None else frozenset(window), system)

    def with_valuation(self, true_atoms: Iterable[str]) -> "BinaryModel":
        return BinaryModel(self.cs, self.seeds, frozenset(true_atoms), self.window, self.system)

    def justified(self, t: Term) -> frozenset:
        return justified_set(t, self)

    def box(self, t: Term, phi: Formula) -> int:
        return int(phi in justified_set(t, self))

    def value(self, phi: Formula) -> int:
        """Truth value of phi, without the jT consistency pass."""
        if isinstance(phi, Prop):
            return int(phi.name in self.valuation)
        if isinstance(phi, Bottom):
            return 0
        if isinstance(phi, Not):
            return 1 - self.value(phi.phi)
        if isinstance(phi, Or):
            return max(self.value(phi.phi), self.value(phi.psi))
        if isinstance(phi, Just):
            return self.box(phi.t, phi.phi)
        raise EvidenceError(f"{show(phi)} is not an LP formula")

    def describe(self) -> dict:
        return {
            "valuation": {p: int(p in self.valuation) for p in sorted(self.valuation)},
            "seeds": sorted(f"{show(t)} :: {show(phi)}" for t, phi in self.seeds),
            "total": self.cs.total,
        }


def _seeds_for(t: Term, model: BinaryModel) -> set[Formula]:
    return {phi for s, phi in model.seeds if s == t}


def justified_set(t: Term, model: BinaryModel) -> frozenset:
    """J(t): the formulas that t justifies in the minimal model."""
    cache = model._cache
    hit = cache.get(t)
    if hit is not None:
        return hit
    if uses_lpb(t):
        raise EvidenceError(f"{show(t)} is not an LP term")
    out = _seeds_for(t, model)
    if isinstance(t, Var):
        pass
    elif isinstance(t, Const):
        out |= {phi for c, phi in model.cs.entries if c == t.name}
        if model.cs.total:
            if model.window is None:
                raise EvidenceError("a total constant specification needs a finite window")
            out |= {phi for phi in model.window if match_axiom(phi, model.system) is not None}
    elif isinstance(t, App):
        left, right = justified_set(t.s, model), justified_set(t.t, model)
        for f in left:
            parts = as_imp(f)
            if parts is not None and parts[0] in right:
                out.add(parts[1])
    elif isinstance(t, Sum):
        out |= justified_set(t.s, model) | justified_set(t.t, model)
    elif isinstance(t, Bang):
        out |= {Just(t.t, psi) for psi in justified_set(t.t, model)}
    else:
        raise EvidenceError(f"{t!r} is not an LP term")
    res = frozenset(out)
    cache[t] = res
    return res


def relevant_terms(phi: Formula) -> list[Term]:
    return sorted({s for s in all_subterms(phi)}, key=show)


def check_jt(phi: Formula, model: BinaryModel) -> None:
    """Raise JTViolation unless every J(t), t a subterm in phi, holds in the model."""
    for t in relevant_terms(phi):
        for psi in _sorted_formulas(justified_set(t, model)):
            if not model.value(psi):
                raise JTViolation(t, psi)


def eval_formula(phi: Formula, model: BinaryModel) -> int:
    if uses_lpb(phi):
        raise EvidenceError(f"{show(phi)} is not an LP formula")
    check_jt(phi, model)
    return model.value(phi)


def refute(phi: Formula, cs: ConstantSpec = EMPTY_CS, seeds: Iterable[tuple[Term, Formula]] = (),
           window: Iterable[Formula] | None = None, system: System = System.LP) -> BinaryModel | None:
    """First valuation (lexicographic over sorted atoms) falsifying phi in the seeded minimal model."""
    if uses_lpb(phi):
        raise EvidenceError(f"{show(phi)} is not an LP formula")
    base = BinaryModel.make(cs, seeds, (), window, system)
    atoms = set(props(phi))
    for t in relevant_terms(phi):
        for psi in justified_set(t, base):
            atoms.update(props(psi))
    atoms = sorted(atoms)
    for bits in itertools.product((0, 1), repeat=len(atoms)):
        model = base.with_valuation(a for a, b in zip(atoms, bits) if b)
        model._cache.update(base._cache)
        try:
            check_jt(phi, model)
        except JTViolation:
            continue
        if model.value(phi) == 0:
            return model
    return None


# ---------------------------------------------------------------- bounded verification

def close_formulas(universe: Iterable[Formula]) -> tuple[Formula, ...]:
    return _sorted_formulas(f for phi in universe for f in subformulas(phi))


def default_terms(formulas: Iterable[Formula]) -> tuple[Term, ...]:
    return tuple(sorted({s for phi in formulas for s in all_subterms(phi)}, key=show))


def close_terms(terms: Iterable[Term]) -> tuple[Term, ...]:
    return tuple(sorted({s for t in terms for s in subterms(t)}, key=show))


def verify_binary_algebra(model: BinaryModel, formula_universe: Iterable[Formula],
                          term_universe: Iterable[Term] | None = None) -> Report:
    """Check Al-Appl, Al-Sum, Al-j4, Al-CS and Al-jT on the declared universes."""
    fu = close_formulas(formula_universe)
    tu = close_terms(default_terms(fu) if term_universe is None else term_universe)
    fset = set(fu)
    rep = Report()
    imps = [(f, p) for f in fu if (p := as_imp(f)) is not None and p[0] in fset and p[1] in fset]
    for u in tu:
        if isinstance(u, App):
            for f, (a, b) in imps:
                rep.count("Al-Appl")
                if model.box(u.s, f) and model.box(u.t, a) and not model.box(u, b):
                    rep.fail("Al-Appl", show(u.s), show(u.t), show(a), show(b))
        elif isinstance(u, Sum):
            for phi in fu:
                rep.count("Al-Sum")
                if (model.box(u.s, phi) or model.box(u.t, phi)) and not model.box(u, phi):
                    rep.fail("Al-Sum", show(u.s), show(u.t), show(phi))
        elif isinstance(u, Bang):
            for phi in fu:
                if Just(u.t, phi) in fset:
                    rep.count("Al-j4")
                    if model.box(u.t, phi) and not model.box(u, Just(u.t, phi)):
                        rep.fail("Al-j4", show(u.t), show(phi))
    for c, phi in sorted(model.cs.entries, key=lambda e: (e[0], show(e[1]))):
        if phi in fset:
            rep.count("Al-CS")
            if not model.box(Const(c), phi):
                rep.fail("Al-CS", c, show(phi))
    if model.cs.total:
        for u in tu:
            if isinstance(u, Const):
                for phi in fu:
                    if match_axiom(phi, model.system) is not None:
                        rep.count("Al-CS")
                        if not model.box(u, phi):
                            rep.fail("Al-CS", u.name, show(phi))
    for t in tu:
        for phi in fu:
            rep.count("Al-jT")
            if model.box(t, phi) > model.value(phi):
                rep.fail("Al-jT", show(t), show(phi))
    return rep.finish()


def _mkrtychev_value(phi: Formula, evidence: Mapping[tuple[Term, Formula], int], valuation: Mapping[str, int]) -> int:
    # evaluation clauses of an (E, V) model, kept separate from BinaryModel.value
    if isinstance(phi, Prop):
        return valuation.get(phi.name, 0)
    if isinstance(phi, Bottom):
        return 0
    if isinstance(phi, Not):
        return 1 - _mkrtychev_value(phi.phi, evidence, valuation)
    if isinstance(phi, Or):
        return max(_mkrtychev_value(phi.phi, evidence, valuation),
                   _mkrtychev_value(phi.psi, evidence, valuation))
    if isinstance(phi, Just):
        return evidence.get((phi.t, phi.phi), 0)
    raise EvidenceError(f"{show(phi)} is not an LP formula")


def mkrtychev_presentation(model: BinaryModel, universe: Iterable[Formula]):
    """The (E, V) pair read off the algebra: E(t, phi) = Box_t(phi) on the universe."""
    fu = close_formulas(universe)
    evidence = {(f.t, f.phi): model.box(f.t, f.phi) for f in fu if isinstance(f, Just)}
    valuation = {p: int(p in model.valuation) for f in fu for p in props(f)}
    return evidence, valuation


def mkrtychev_roundtrip(model: BinaryModel, universe: Iterable[Formula]) -> Report:
    fu = close_formulas(universe)
    evidence, valuation = mkrtychev_presentation(model, fu)
    rep = Report()
    for phi in fu:
        rep.count("roundtrip")
        a, b = _mkrtychev_value(phi, evidence, valuation), model.value(phi)
        if a != b:
            rep.fail("roundtrip", show(phi), detail=f"V~={a}, theta~={b}")
    return rep.finish()


# ---------------------------------------------------------------- files

def parse_seeds(text: str, dialect: Dialect = Dialect.LP) -> list[tuple[Term, Formula]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "::" not in line:
            raise EvidenceError(f"line {lineno}: expected '<term> :: <formula>'")
        t, phi = line.split("::", 1)
        try:
            out.append((parse_term(t, dialect), parse_formula(phi, dialect)))
        except ParseError as e:
            raise EvidenceError(f"line {lineno}: {e}") from None
    return out


def parse_window(text: str, dialect: Dialect = Dialect.LP) -> list[Formula]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            try:
                out.append(parse_formula(line, dialect))
            except ParseError as e:
                raise EvidenceError(f"line {lineno}: {e}") from None
    return out
