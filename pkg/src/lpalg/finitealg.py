"""Finite Boolean algebras, bounded checks of LP algebra conditions, Stone maps.

Two presentations of a finite Boolean algebra are supported: ``FiniteBA``
(subsets of n atoms as n-bit masks) and ``TableBA`` (arbitrary labels with
explicit complement and join tables). Both expose the same small interface.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .proofs import ConstantSpec, EMPTY_CS, System, match_axiom
from .report import DEFAULT_BUDGET, Report, check_budget
from .syntax import (
    App, Bang, Bottom, Const, Formula, Just, Not, Or, Prop, Sum, Term, as_imp, props, show,
)


class BooleanLawError(ValueError):
    def __init__(self, law: str, witness: tuple):
        self.law, self.witness = law, witness
        super().__init__(f"{law} fails at {witness}")


class ClosureError(ValueError):
    pass


class BooleanAlgebra:
    """Interface: elements, zero, neg, join; the rest is derived."""

    elements: list
    zero: Hashable

    def neg(self, a):
        raise NotImplementedError

    def join(self, a, b):
        raise NotImplementedError

    @property
    def one(self):
        return self.neg(self.zero)

    def meet(self, a, b):
        return self.neg(self.join(self.neg(a), self.neg(b)))

    def imp(self, a, b):
        return self.join(self.neg(a), b)

    def leq(self, a, b) -> bool:
        return self.join(a, b) == b

    def size(self) -> int:
        return len(self.elements)

    def show(self, a) -> str:
        return str(a)

    def read(self, text: str):
        raise NotImplementedError

    def validate(self) -> None:
        """Raise BooleanLawError with the first violated instance, if any."""
        els = self.elements
        eset = set(els)
        if self.zero not in eset:
            raise BooleanLawError("closure", (self.zero,))
        for a in els:
            if self.neg(a) not in eset:
                raise BooleanLawError("closure", (a,))
            for b in els:
                if self.join(a, b) not in eset:
                    raise BooleanLawError("closure", (a, b))
        one, j, m, n = self.one, self.join, self.meet, self.neg
        for a, b in itertools.product(els, repeat=2):
            if j(a, b) != j(b, a):
                raise BooleanLawError("join commutativity", (a, b))
            if m(a, b) != m(b, a):
                raise BooleanLawError("meet commutativity", (a, b))
        for a, b, c in itertools.product(els, repeat=3):
            if j(a, j(b, c)) != j(j(a, b), c):
                raise BooleanLawError("join associativity", (a, b, c))
            if m(a, m(b, c)) != m(m(a, b), c):
                raise BooleanLawError("meet associativity", (a, b, c))
        for a, b, c in itertools.product(els, repeat=3):
            if j(a, m(b, c)) != m(j(a, b), j(a, c)):
                raise BooleanLawError("join distributivity", (a, b, c))
            if m(a, j(b, c)) != j(m(a, b), m(a, c)):
                raise BooleanLawError("meet distributivity", (a, b, c))
        for a in els:
            if j(a, self.zero) != a:
                raise BooleanLawError("join identity", (a,))
            if m(a, one) != a:
                raise BooleanLawError("meet identity", (a,))
        for a in els:
            if j(a, n(a)) != one:
                raise BooleanLawError("join complement", (a,))
            if m(a, n(a)) != self.zero:
                raise BooleanLawError("meet complement", (a,))


@dataclass(frozen=True)
class FiniteBA(BooleanAlgebra):
    """The powerset algebra of ``atom_count`` atoms; elements are bit masks."""

    atom_count: int

    @property
    def elements(self) -> list[int]:
        return list(range(1 << self.atom_count))

    @property
    def zero(self) -> int:
        return 0

    @property
    def full(self) -> int:
        return (1 << self.atom_count) - 1

    def neg(self, a: int) -> int:
        return self.full & ~a

    def join(self, a: int, b: int) -> int:
        return a | b

    def meet(self, a: int, b: int) -> int:
        return a & b

    def leq(self, a: int, b: int) -> bool:
        return a & ~b == 0

    def show(self, a: int) -> str:
        return hex(a)

    def read(self, text: str) -> int:
        v = int(text, 0)
        if not 0 <= v <= self.full:
            raise ValueError(f"{text} is not an element of the {self.atom_count}-atom algebra")
        return v


@dataclass(frozen=True)
class TableBA(BooleanAlgebra):
    """An abstract finite algebra given by explicit tables over labels."""

    carrier: tuple
    zero_label: Hashable
    neg_table: Mapping
    join_table: Mapping

    @property
    def elements(self) -> list:
        return list(self.carrier)

    @property
    def zero(self):
        return self.zero_label

    def neg(self, a):
        try:
            return self.neg_table[a]
        except KeyError:
            raise BooleanLawError("closure", (a,)) from None

    def join(self, a, b):
        try:
            return self.join_table[(a, b)]
        except KeyError:
            raise BooleanLawError("closure", (a, b)) from None

    def read(self, text: str):
        if text not in self.carrier:
            raise ValueError(f"{text!r} is not in the carrier")
        return text

    def __hash__(self):
        return hash((self.carrier, self.zero_label))

    @classmethod
    def from_sets(cls, labels: Mapping[str, frozenset], universe: frozenset, zero: str) -> "TableBA":
        """Build the tables of a field of sets named by ``labels``."""
        back = {v: k for k, v in labels.items()}
        neg = {k: back[universe - v] for k, v in labels.items()}
        join = {(a, b): back[labels[a] | labels[b]] for a in labels for b in labels}
        return cls(tuple(labels), zero, neg, join)


def two() -> FiniteBA:
    return FiniteBA(1)


# ---------------------------------------------------------------- Stone representation

@dataclass(frozen=True)
class IsoWitness:
    src: BooleanAlgebra
    dst: BooleanAlgebra
    mapping: Mapping

    def __call__(self, a):
        return self.mapping[a]

    def inverse(self) -> "IsoWitness":
        return IsoWitness(self.dst, self.src, {v: k for k, v in self.mapping.items()})

    def verify(self) -> Report:
        rep = Report()
        f, A, B = self.mapping, self.src, self.dst
        rep.count("bijection")
        if set(f) != set(A.elements) or sorted(map(repr, f.values())) != sorted(map(repr, B.elements)):
            rep.fail("bijection", detail="mapping is not a bijection between the carriers")
            return rep
        rep.count("zero")
        if f[A.zero] != B.zero:
            rep.fail("zero", A.show(A.zero))
        for a in A.elements:
            rep.count("neg")
            if f[A.neg(a)] != B.neg(f[a]):
                rep.fail("neg", A.show(a))
            for b in A.elements:
                rep.count("join")
                if f[A.join(a, b)] != B.join(f[a], f[b]):
                    rep.fail("join", A.show(a), A.show(b))
        return rep.finish()


def atoms_of(A: BooleanAlgebra) -> list:
    """Minimal nonzero elements, in carrier order."""
    nonzero = [a for a in A.elements if a != A.zero]
    return [a for a in nonzero if not any(b != a and A.leq(b, a) for b in nonzero)]


def stone(A: BooleanAlgebra) -> tuple[FiniteBA, IsoWitness]:
    """Map each element to the mask of atoms below it."""
    A.validate()
    ats = atoms_of(A)
    B = FiniteBA(len(ats))
    mapping = {a: sum(1 << i for i, at in enumerate(ats) if A.leq(at, a)) for a in A.elements}
    w = IsoWitness(A, B, mapping)
    rep = w.verify()
    if not rep.ok:  # only possible if validate() missed something
        raise BooleanLawError("representation", tuple(str(v) for v in rep.violations))
    return B, w


def identity_witness(A: BooleanAlgebra) -> IsoWitness:
    return IsoWitness(A, A, {a: a for a in A.elements})


# ---------------------------------------------------------------- Box tables

@dataclass(frozen=True)
class BoxTable:
    """Box_t(phi) over declared finite universes; absent entries are zero."""

    entries: Mapping  # (Term, Formula) -> element
    terms: tuple
    formulas: tuple
    zero: Hashable = 0

    def get(self, t: Term, phi: Formula):
        return self.entries.get((t, phi), self.zero)

    def items(self):
        return sorted(self.entries.items(), key=lambda kv: (show(kv[0][0]), show(kv[0][1])))


def make_box_table(entries: Mapping, formulas: Iterable[Formula], terms: Iterable[Term] | None = None,
                   zero=0) -> BoxTable:
    from .evidence import close_formulas, close_terms, default_terms
    fu = close_formulas(formulas)
    tu = close_terms(default_terms(fu) if terms is None else terms)
    return BoxTable({k: v for k, v in entries.items() if v != zero}, tu, fu, zero)


def box_table_from_model(model, formulas: Iterable[Formula], terms: Iterable[Term] | None = None) -> BoxTable:
    """Export a binary evidence model as masks over the one-atom algebra."""
    from .evidence import close_formulas, close_terms, default_terms
    fu = close_formulas(formulas)
    tu = close_terms(default_terms(fu) if terms is None else terms)
    entries = {(t, phi): 1 for t in tu for phi in fu if model.box(t, phi)}
    return BoxTable(entries, tu, fu, 0)


def transport(A: BooleanAlgebra, box: BoxTable, witness: IsoWitness) -> BoxTable:
    """Box'_t(phi) := f(Box_t(phi))."""
    if witness.src != A:
        raise ValueError("witness does not start at the given algebra")
    entries = {k: witness(v) for k, v in box.entries.items()}
    return BoxTable(entries, box.terms, box.formulas, witness(box.zero))


def transport_conditions(box: BoxTable, image: BoxTable, witness: IsoWitness) -> Report:
    """Check f(Box_t(phi)) = Box'_t(phi) on the whole declared universe."""
    rep = Report()
    for t in box.terms:
        for phi in box.formulas:
            rep.count("transport")
            if witness(box.get(t, phi)) != image.get(t, phi):
                rep.fail("transport", show(t), show(phi))
    return rep.finish()


# ---------------------------------------------------------------- full LP_CS algebras

def assignment(A: BooleanAlgebra, box: BoxTable, theta: Mapping[str, object]):
    """The extension of a valuation theta to formulas, with t:psi read from the table."""
    memo: dict = {}

    def ev(phi: Formula):
        r = memo.get(phi)
        if r is not None:
            return r
        if isinstance(phi, Prop):
            r = theta[phi.name]
        elif isinstance(phi, Bottom):
            r = A.zero
        elif isinstance(phi, Not):
            r = A.neg(ev(phi.phi))
        elif isinstance(phi, Or):
            r = A.join(ev(phi.phi), ev(phi.psi))
        elif isinstance(phi, Just):
            r = box.get(phi.t, phi.phi)
        else:
            raise ValueError(f"{show(phi)} is not an LP formula")
        memo[phi] = r
        return r
    return ev


def valuations(A: BooleanAlgebra, atoms: list[str], budget: int | None = DEFAULT_BUDGET):
    check_budget(A.size() ** len(atoms), budget, "valuation space")
    for vals in itertools.product(A.elements, repeat=len(atoms)):
        yield dict(zip(atoms, vals))


def verify_pre_lp(A: BooleanAlgebra, box: BoxTable, cs: ConstantSpec = EMPTY_CS,
                  system: System = System.LP) -> Report:
    rep = Report()
    fu, tu = box.formulas, box.terms
    fset = set(fu)
    imps = [(f, p) for f in fu if (p := as_imp(f)) is not None and p[0] in fset and p[1] in fset]
    for u in tu:
        if isinstance(u, App):
            for f, (a, b) in imps:
                rep.count("Al-Appl")
                if not A.leq(A.meet(box.get(u.s, f), box.get(u.t, a)), box.get(u, b)):
                    rep.fail("Al-Appl", show(u.s), show(u.t), show(a), show(b))
        elif isinstance(u, Sum):
            for phi in fu:
                rep.count("Al-Sum")
                if not A.leq(A.join(box.get(u.s, phi), box.get(u.t, phi)), box.get(u, phi)):
                    rep.fail("Al-Sum", show(u.s), show(u.t), show(phi))
        elif isinstance(u, Bang):
            for phi in fu:
                if Just(u.t, phi) in fset:
                    rep.count("Al-j4")
                    if not A.leq(box.get(u.t, phi), box.get(u, Just(u.t, phi))):
                        rep.fail("Al-j4", show(u.t), show(phi))
    tset = set(tu)
    for c, phi in sorted(cs.entries, key=lambda e: (e[0], show(e[1]))):
        if phi in fset and Const(c) in tset:
            rep.count("Al-CS")
            if box.get(Const(c), phi) != A.one:
                rep.fail("Al-CS", c, show(phi))
    if cs.total:
        for u in tu:
            if isinstance(u, Const):
                for phi in fu:
                    if match_axiom(phi, system) is not None:
                        rep.count("Al-CS")
                        if box.get(u, phi) != A.one:
                            rep.fail("Al-CS", u.name, show(phi))
    return rep


def verify_full_lp(A: BooleanAlgebra, box: BoxTable, cs: ConstantSpec = EMPTY_CS,
                   budget: int | None = DEFAULT_BUDGET, system: System = System.LP) -> Report:
    """Pre-algebra conditions plus Al-jT under every valuation into A."""
    rep = verify_pre_lp(A, box, cs, system)
    atoms = sorted({p for phi in box.formulas for p in props(phi)})
    # join over t of Box_t(phi) is the only thing Al-jT compares per valuation
    upper = {}
    for phi in box.formulas:
        u = A.zero
        for t in box.terms:
            u = A.join(u, box.get(t, phi))
        upper[phi] = u
    bad: dict = {}
    n = 0
    for theta in valuations(A, atoms, budget):
        ev = assignment(A, box, theta)
        n += 1
        for phi in box.formulas:
            if A.leq(upper[phi], ev(phi)):
                continue
            for t in box.terms:
                if (t, phi) not in bad and not A.leq(box.get(t, phi), ev(phi)):
                    bad[(t, phi)] = theta
    rep.count("Al-jT", n * len(box.terms) * len(box.formulas))
    for (t, phi), theta in bad.items():
        val = ", ".join(f"{p}={A.show(v)}" for p, v in sorted(theta.items()))
        rep.fail("Al-jT", show(t), show(phi), detail=f"first valuation {{{val}}}")
    return rep.finish()


# ---------------------------------------------------------------- HLP and regular algebras

def verify_hlp(A: BooleanAlgebra, ops: Mapping[Term, Mapping], regular: bool = False) -> Report:
    """Check A-Appl and A-Sum (and, unless ``regular``, A-jT and A-j4).

    ``ops`` maps each term of the universe to its operator table on A; missing
    entries of a table read as zero.
    """
    rep = Report()
    els = A.elements

    def box(t, a):
        return ops[t].get(a, A.zero)

    for u in sorted(ops, key=show):
        if isinstance(u, (App, Sum)) and (u.s not in ops or u.t not in ops):
            raise ClosureError(f"{show(u)} is in the universe but its arguments are not")
        if isinstance(u, Bang) and u.t not in ops:
            raise ClosureError(f"{show(u)} is in the universe but {show(u.t)} is not")
        if isinstance(u, App):
            for a, b in itertools.product(els, repeat=2):
                rep.count("A-Appl")
                if not A.leq(A.meet(box(u.s, A.imp(a, b)), box(u.t, a)), box(u, b)):
                    rep.fail("A-Appl", show(u.s), show(u.t), A.show(a), A.show(b))
        elif isinstance(u, Sum):
            for a in els:
                rep.count("A-Sum")
                if not A.leq(A.join(box(u.s, a), box(u.t, a)), box(u, a)):
                    rep.fail("A-Sum", show(u.s), show(u.t), A.show(a))
    if not regular:
        for t in sorted(ops, key=show):
            for a in els:
                rep.count("A-jT")
                if not A.leq(box(t, a), a):
                    rep.fail("A-jT", show(t), A.show(a))
            if Bang(t) in ops:
                for a in els:
                    rep.count("A-j4")
                    if not A.leq(box(t, a), box(Bang(t), box(t, a))):
                        rep.fail("A-j4", show(t), A.show(a))
    return rep.finish()


def transport_ops(ops: Mapping[Term, Mapping], witness: IsoWitness) -> dict:
    """Operator tables conjugated by f: Box'_t(f(a)) = f(Box_t(a))."""
    A = witness.src
    return {t: {witness(a): witness(tbl.get(a, A.zero)) for a in A.elements} for t, tbl in ops.items()}
