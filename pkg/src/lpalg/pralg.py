"""The Boolean algebra of proofs, one element per class of provably equivalent conclusions.

The underlying logic is classical propositional logic over atoms, where
justification formulas t:psi and equations s = t are read as opaque atoms.
Classes are keyed by the canonical decision diagram of the conclusion.
Application and bang act on chosen representatives; bang needs a recorded
derivation and is computed by lifting it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import bdd
from .finitealg import BooleanAlgebra, BooleanLawError
from .internalize import ConstantOracle, lift
from .proofs import ConstantSpec, EMPTY_CS, Proof, System
from .report import Report
from .syntax import BOT, Bottom, Eq, Formula, Just, Not, Or, Prop, as_imp, formula_key, formula_size, show


class PrError(ValueError):
    pass


def _atom_key(phi: Formula) -> tuple:
    if isinstance(phi, Prop):
        return (0, phi.name)
    return (1, show(phi))


def canonical(phi: Formula) -> int:
    """Decision diagram of phi with t:psi and s = t as opaque atoms."""
    if isinstance(phi, Prop) or isinstance(phi, (Just, Eq)):
        return bdd.atom(_atom_key(phi))
    if isinstance(phi, Bottom):
        return bdd.FALSE
    if isinstance(phi, Not):
        return bdd.neg(canonical(phi.phi))
    if isinstance(phi, Or):
        return bdd.disj(canonical(phi.phi), canonical(phi.psi))
    raise TypeError(phi)


def opaque_atoms(phi: Formula) -> list[Formula]:
    if isinstance(phi, (Prop, Just, Eq)):
        return [phi]
    if isinstance(phi, Bottom):
        return []
    if isinstance(phi, Not):
        return opaque_atoms(phi.phi)
    return sorted(set(opaque_atoms(phi.phi)) | set(opaque_atoms(phi.psi)), key=show)


def truth(phi: Formula, row: Mapping[Formula, bool]) -> bool:
    """Classical value of phi; used as an oracle independent of the diagrams."""
    if isinstance(phi, (Prop, Just, Eq)):
        return row[phi]
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Not):
        return not truth(phi.phi, row)
    return truth(phi.phi, row) or truth(phi.psi, row)


def tautology(phi: Formula) -> bool:
    ats = opaque_atoms(phi)
    return all(truth(phi, dict(zip(ats, bits))) for bits in itertools.product((False, True), repeat=len(ats)))


@dataclass(frozen=True, eq=False)
class PrElement:
    node: int
    rep: Formula
    proof: Proof | None = None

    def __eq__(self, other) -> bool:
        return isinstance(other, PrElement) and other.node == self.node

    def __hash__(self) -> int:
        return hash(self.node)

    def __repr__(self) -> str:
        return f"[{show(self.rep)}]"

    @property
    def key(self) -> tuple:
        return bdd.key(self.node)


def element(phi: Formula, proof: Proof | None = None) -> PrElement:
    return PrElement(canonical(phi), phi, proof)


def _better(e: PrElement, cur: PrElement) -> bool:
    """Representative choice: recorded derivations first, then the smallest formula."""
    if (e.proof is None) != (cur.proof is None):
        return e.proof is not None
    return e.proof is None and formula_key(e.rep) < formula_key(cur.rep)


class PrAlgebra(BooleanAlgebra):
    """A finite fragment of the proof algebra, closed under its Boolean operations."""

    def __init__(self, entries: Iterable[PrElement], cs: ConstantSpec = EMPTY_CS,
                 system: System = System.LP):
        self.table: dict[int, PrElement] = {}
        for e in entries:
            cur = self.table.get(e.node)
            if cur is None or _better(e, cur):
                self.table[e.node] = e
        self.cs, self.system = cs, system

    @property
    def elements(self) -> list[PrElement]:
        return sorted(self.table.values(), key=lambda e: e.key)

    def _get(self, phi: Formula) -> PrElement:
        e = element(phi)
        return self.table.get(e.node, e)

    def _at(self, node: int, make) -> PrElement:
        e = self.table.get(node)
        return PrElement(node, make()) if e is None else e

    @property
    def zero(self) -> PrElement:
        return self._get(BOT)

    def neg(self, a: PrElement) -> PrElement:
        return self._at(bdd.neg(a.node), lambda: Not(a.rep))

    def join(self, a: PrElement, b: PrElement) -> PrElement:
        return self._at(bdd.disj(a.node, b.node), lambda: Or(a.rep, b.rep))

    def show(self, a: PrElement) -> str:
        return show(a.rep)

    def app(self, a: PrElement, b: PrElement) -> PrElement:
        """[phi2] when a's representative is phi1 -> phi2 and b is the class of phi1, else zero."""
        parts = as_imp(a.rep)
        if parts is not None and canonical(parts[0]) == b.node:
            return self._get(parts[1])
        return self.zero

    def bang(self, a: PrElement, binding: Mapping[int, str] | None = None,
             oracle: ConstantOracle | None = None) -> PrElement:
        """The class of t(x):phi for the lifted recorded derivation."""
        if a.proof is None:
            raise PrError(f"{show(a.rep)} has no recorded derivation")
        n = len(a.proof.hyps)
        if binding is None:
            binding = {0: "x"} if n == 1 else {i: f"x{i + 1}" for i in range(n)}
        oracle = ConstantOracle(self.cs) if oracle is None else oracle
        term, lifted = lift(a.proof, self.system, self.cs, binding, oracle)
        return element(Just(term, a.proof.conclusion), lifted)

    def leq_by_entailment(self, a: PrElement, b: PrElement) -> bool:
        return tautology(Or(Not(a.rep), b.rep))


def build_pr_algebra(entries: Iterable[tuple[Formula, Proof | None]], cs: ConstantSpec = EMPTY_CS,
                     system: System = System.LP, close: bool = True, limit: int = 1 << 12) -> PrAlgebra:
    """Classes of the given conclusions, optionally closed under bottom, negation and disjunction."""
    els = []
    for phi, proof in entries:
        if proof is not None and canonical(proof.conclusion) != canonical(phi):
            raise PrError(f"the derivation does not conclude {show(phi)}")
        els.append(element(phi, proof))
    alg = PrAlgebra(els, cs, system)
    if not close:
        return alg
    alg.table.setdefault(bdd.FALSE, element(BOT))
    size = {n: formula_size(e.rep) for n, e in alg.table.items()}
    todo = list(alg.table)
    while todo:
        a = alg.table[todo.pop()]
        # (node, lower bound on the size of the new representative, builder)
        cands = [(bdd.neg(a.node), size[a.node] + 1, lambda a=a: Not(a.rep))]
        cands += [(bdd.disj(a.node, b.node), max(size[a.node], size[b.node]) + 1, lambda a=a, b=b: Or(a.rep, b.rep))
                  for b in list(alg.table.values())]
        for node, low, make in cands:
            cur = alg.table.get(node)
            if cur is None:
                alg.table[node] = PrElement(node, make())
                size[node] = formula_size(alg.table[node].rep)
                todo.append(node)
                if len(alg.table) > limit:
                    raise PrError(f"closure exceeds {limit} classes")
            elif cur.proof is None and low <= size[node]:
                e = PrElement(node, make())
                if _better(e, cur):
                    alg.table[node] = e
                    size[node] = formula_size(e.rep)
    return alg


def propositional_formulas(atoms: Iterable[str], depth: int) -> list[Formula]:
    """All formulas over the atoms with bottom, negation and disjunction up to a nesting depth."""
    layer = [BOT] + [Prop(p) for p in atoms]
    seen = set(layer)
    for _ in range(depth):
        nxt = [Not(a) for a in layer] + [Or(a, b) for a in layer for b in layer]
        nxt = [f for f in nxt if f not in seen]
        seen.update(nxt)
        layer = sorted(seen, key=show)
    return sorted(seen, key=show)


def law_report(alg: PrAlgebra) -> Report:
    """Boolean laws on the fragment, and the order against classical entailment."""
    rep = Report()
    try:
        alg.validate()
        rep.count("boolean-laws", alg.size() ** 3)
    except BooleanLawError as e:
        rep.fail("boolean-laws", str(e))
    els = alg.elements
    for a in els:
        for b in els:
            rep.count("order")
            if alg.leq(a, b) != alg.leq_by_entailment(a, b):
                rep.fail("order", show(a.rep), show(b.rep))
    return rep.finish()
