"""Semantics for LP^B: term structures, full and polynomial LP^B algebras.

A term structure is a finite Boolean algebra T together with tables for
application and bang and an interpretation of the proof constants. A full
LP^B algebra adds a finite Boolean algebra A of truth values and operators
Box_alpha (alpha in T) on a declared finite formula universe.

Polynomials over T are kept canonically: after the Stone map T is a powerset
of n atoms, and a Boolean polynomial acts on each atom separately, so it is
stored as one truth table per atom over its essential variables. Two
polynomials are extensionally equal exactly when these tables coincide.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping

from .evidence import close_formulas, close_terms, default_terms
from .finitealg import BooleanAlgebra, FiniteBA, IsoWitness, TableBA, stone
from .proofs import ConstantSpec, EMPTY_CS, System, match_axiom
from .report import DEFAULT_BUDGET, Report, check_budget
from .syntax import (
    App, Bang, Bottom, Const, Eq, Formula, Just, Neg, Not, Or, Prop, Sum, Term, Var, Zero,
    as_imp, formula_vars, props, show, subterms, term_vars, terms_of,
)


class LPBError(ValueError):
    pass


class UniverseError(LPBError):
    """A ':' body outside the declared formula universe."""


ZERO_NAME = "0"


# ---------------------------------------------------------------- term structures

@dataclass(frozen=True, eq=False)
class TermStructure:
    ba: BooleanAlgebra
    app: Mapping  # (alpha, beta) -> element
    bang: Mapping  # alpha -> element
    interp: Mapping = field(default_factory=dict)  # constant name -> element

    def I(self, name: str):
        if name == ZERO_NAME:
            return self.ba.zero
        try:
            return self.interp[name]
        except KeyError:
            raise LPBError(f"constant {name!r} is not interpreted") from None

    def dot(self, a, b):
        return self.app[(a, b)]

    def bang_of(self, a):
        return self.bang[a]

    @property
    def elements(self) -> list:
        return self.ba.elements

    def validate(self) -> "TermStructure":
        self.ba.validate()
        els = self.ba.elements
        eset = set(els)
        for a in els:
            if self.bang.get(a) not in eset:
                raise LPBError(f"bang table is not total at {self.ba.show(a)}")
            for b in els:
                if self.app.get((a, b)) not in eset:
                    raise LPBError(f"app table is not total at ({self.ba.show(a)}, {self.ba.show(b)})")
        if self.interp.get(ZERO_NAME, self.ba.zero) != self.ba.zero:
            raise LPBError("the interpretation must send 0 to the zero of T")
        for c, a in self.interp.items():
            if a not in eset:
                raise LPBError(f"I({c}) is not an element of T")
        return self

    def with_minted(self, names: Iterable[str]) -> "TermStructure":
        """Permissive mode: give each missing constant an unused atom of a powerset T."""
        if not isinstance(self.ba, FiniteBA):
            raise LPBError("constants can only be minted in a powerset term algebra")
        used = set(self.interp.values())
        spare = [1 << i for i in range(self.ba.atom_count) if (1 << i) not in used]
        interp = dict(self.interp)
        for c in sorted(set(names) - set(interp) - {ZERO_NAME}):
            if not spare:
                raise LPBError(f"no spare atom left for constant {c!r}")
            interp[c] = spare.pop(0)
        return TermStructure(self.ba, self.app, self.bang, interp)

    # Stone coordinates, used by the polynomial representation
    @cached_property
    def _stone(self) -> tuple[FiniteBA, IsoWitness]:
        return stone(self.ba)

    @property
    def atom_count(self) -> int:
        return self._stone[0].atom_count

    def mask(self, a) -> int:
        return self._stone[1](a)

    @cached_property
    def _unmask(self) -> dict:
        return {m: a for a, m in self._stone[1].mapping.items()}

    def unmask(self, m: int):
        return self._unmask[m]


def eval_term(t: Term, v: Mapping[str, Hashable], ts: TermStructure, strict: bool = True):
    """t^v_I: variables through v, constants through I, homomorphic elsewhere."""
    if isinstance(t, Var):
        if t.name in v:
            return v[t.name]
        if strict:
            raise LPBError(f"variable {t.name} is unbound")
        return ts.ba.zero
    if isinstance(t, Const):
        return ts.I(t.name)
    if isinstance(t, Zero):
        return ts.ba.zero
    if isinstance(t, Neg):
        return ts.ba.neg(eval_term(t.t, v, ts, strict))
    if isinstance(t, Sum):
        return ts.ba.join(eval_term(t.s, v, ts, strict), eval_term(t.t, v, ts, strict))
    if isinstance(t, App):
        return ts.dot(eval_term(t.s, v, ts, strict), eval_term(t.t, v, ts, strict))
    if isinstance(t, Bang):
        return ts.bang_of(eval_term(t.t, v, ts, strict))
    raise TypeError(t)


def term_assignments(ts: TermStructure, names: list[str], budget: int | None = DEFAULT_BUDGET):
    check_budget(ts.ba.size() ** len(names), budget, "term assignment space")
    for vals in itertools.product(ts.elements, repeat=len(names)):
        yield dict(zip(names, vals))


# ---------------------------------------------------------------- full LP^B algebras

@dataclass(frozen=True, eq=False)
class LPBAlgebra:
    A: BooleanAlgebra
    ts: TermStructure
    box: Mapping  # (alpha, Formula) -> element of A; absent means zero
    formulas: tuple
    terms: tuple = ()

    def get(self, alpha, phi: Formula):
        return self.box.get((alpha, phi), self.A.zero)

    @cached_property
    def formula_set(self) -> frozenset:
        return frozenset(self.formulas)

    def variables(self) -> list[str]:
        names = {x for phi in self.formulas for x in formula_vars(phi)}
        names |= {x for t in self.terms for x in term_vars(t)}
        return sorted(names)

    def atoms(self) -> list[str]:
        return sorted({p for phi in self.formulas for p in props(phi)})


def make_lpb_algebra(A: BooleanAlgebra, ts: TermStructure, box: Mapping, formulas: Iterable[Formula],
                     terms: Iterable[Term] | None = None) -> LPBAlgebra:
    """Close the universes under subformulas and subterms and drop zero entries."""
    fu = close_formulas(formulas)
    tu = close_terms(default_terms(fu) if terms is None else list(terms) + list(default_terms(fu)))
    entries = {k: a for k, a in box.items() if a != A.zero}
    for (alpha, phi) in entries:
        if phi not in fu:
            raise UniverseError(f"box entry for {show(phi)} lies outside the formula universe")
        if alpha not in set(ts.elements):
            raise LPBError(f"box entry index {alpha!r} is not an element of T")
    return LPBAlgebra(A, ts, entries, fu, tu)


def evaluator(alg: LPBAlgebra, theta: Mapping[str, Hashable], v: Mapping[str, Hashable]):
    """The assignment theta~_v as a memoized function on formulas."""
    A, ts = alg.A, alg.ts
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
            if phi.phi not in alg.formula_set:
                raise UniverseError(f"{show(phi.phi)} is outside the formula universe")
            r = alg.get(eval_term(phi.t, v, ts), phi.phi)
        elif isinstance(phi, Eq):
            r = A.one if eval_term(phi.s, v, ts) == eval_term(phi.t, v, ts) else A.zero
        else:
            raise TypeError(phi)
        memo[phi] = r
        return r
    return ev


def eval_formula(phi: Formula, theta: Mapping[str, Hashable], v: Mapping[str, Hashable], alg: LPBAlgebra):
    return evaluator(alg, theta, v)(phi)


def _show_map(A: BooleanAlgebra, m: Mapping) -> str:
    return ", ".join(f"{k}={A.show(a)}" for k, a in sorted(m.items()))


def _verify_pre(rep: Report, A: BooleanAlgebra, T: list, fu: tuple, get, dot, plus, one_t, interp,
                cs: ConstantSpec, theorems: Iterable[Formula], showt) -> None:
    fset = set(fu)
    imps = [(f, p) for f in fu if (p := as_imp(f)) is not None and p[0] in fset and p[1] in fset]
    for a, b in itertools.product(T, repeat=2):
        ab = dot(a, b)
        for f, (x, y) in imps:
            rep.count("Al-Appl")
            if not A.leq(A.meet(get(a, f), get(b, x)), get(ab, y)):
                rep.fail("Al-Appl", showt(a), showt(b), show(x), show(y))
        apb = plus(a, b)
        for phi in fu:
            rep.count("Al-Sum")
            if not A.leq(A.join(get(a, phi), get(b, phi)), get(apb, phi)):
                rep.fail("Al-Sum", showt(a), showt(b), show(phi))
    outside = 0
    for phi in sorted(set(theorems), key=show):
        if phi not in fset:
            outside += 1
            continue
        rep.count("Al-1")
        if get(one_t, phi) != A.one:
            rep.fail("Al-1", show(phi))
    if outside:
        rep.notes.append(f"{outside} oracle theorem(s) lie outside the formula universe")
    for c, phi in sorted(cs.entries, key=lambda e: (e[0], show(e[1]))):
        if phi not in fset:
            continue
        rep.count("Al-CS")
        alpha = interp(c)
        if alpha is None:
            rep.fail("Al-CS", c, show(phi), detail="constant is not interpreted")
        elif get(alpha, phi) != A.one:
            rep.fail("Al-CS", c, show(phi))
    if cs.total:
        for c in sorted(n for n in _interp_names(interp) if n != ZERO_NAME):
            for phi in fu:
                if match_axiom(phi, System.LPB) is not None:
                    rep.count("Al-CS")
                    if get(interp(c), phi) != A.one:
                        rep.fail("Al-CS", c, show(phi))


def _interp_names(interp) -> list[str]:
    return list(getattr(interp, "names", ()))


class _Interp:
    def __init__(self, ts: TermStructure, wrap=lambda a: a):
        self.ts, self.wrap = ts, wrap
        self.names = sorted(ts.interp)

    def __call__(self, c: str):
        try:
            return self.wrap(self.ts.I(c))
        except LPBError:
            return None


def verify_full_lpb(alg: LPBAlgebra, cs: ConstantSpec = EMPTY_CS, theorems: Iterable[Formula] = (),
                    budget: int | None = DEFAULT_BUDGET) -> Report:
    """Check Al-Appl, Al-Sum, Al-1, Al-CS, Al-j4 and Al-jT on the declared universes.

    Al-j4 is checked as stated, with alpha ranging over all of T and t over
    universe terms with t:phi in the formula universe, independently of alpha.
    Al-jT ranges over every valuation into A and every v into T.
    """
    A, ts = alg.A, alg.ts
    T = ts.elements
    rep = Report()
    _verify_pre(rep, A, T, alg.formulas, alg.get, ts.dot, ts.ba.join, ts.ba.one, _Interp(ts),
                cs, theorems, ts.ba.show)
    fset = alg.formula_set
    for a in T:
        ba = ts.bang_of(a)
        for f in alg.formulas:
            if isinstance(f, Just) and f.phi in fset:
                rep.count("Al-j4")
                if not A.leq(alg.get(a, f.phi), alg.get(ba, f)):
                    rep.fail("Al-j4", ts.ba.show(a), show(f.t), show(f.phi))
    atoms, names = alg.atoms(), alg.variables()
    check_budget(A.size() ** len(atoms) * ts.ba.size() ** len(names), budget, "Al-jT sweep")
    upper = {}
    for phi in alg.formulas:
        u = A.zero
        for a in T:
            u = A.join(u, alg.get(a, phi))
        upper[phi] = u
    bad: dict = {}
    n = 0
    for theta in itertools.product(A.elements, repeat=len(atoms)):
        th = dict(zip(atoms, theta))
        for vv in itertools.product(T, repeat=len(names)):
            v = dict(zip(names, vv))
            ev = evaluator(alg, th, v)
            n += 1
            for phi in alg.formulas:
                val = ev(phi)
                if A.leq(upper[phi], val):
                    continue
                for a in T:
                    if (a, phi) not in bad and not A.leq(alg.get(a, phi), val):
                        bad[(a, phi)] = (th, v)
    rep.count("Al-jT", n * len(T) * len(alg.formulas))
    for (a, phi), (th, v) in bad.items():
        rep.fail("Al-jT", ts.ba.show(a), show(phi),
                 detail=f"first theta {{{_show_map(A, th)}}}, v {{{_show_map(ts.ba, v)}}}")
    return rep.finish()


def validity(alg: LPBAlgebra, phi: Formula, budget: int | None = DEFAULT_BUDGET):
    """First (theta, v) with theta~_v(phi) != 1, or None when phi is true in alg."""
    atoms = sorted(set(props(phi)) | set(alg.atoms()))
    names = sorted(set(formula_vars(phi)) | set(alg.variables()))
    A, ts = alg.A, alg.ts
    check_budget(A.size() ** len(atoms) * ts.ba.size() ** len(names), budget, "validity sweep")
    for theta in itertools.product(A.elements, repeat=len(atoms)):
        th = dict(zip(atoms, theta))
        for vv in itertools.product(ts.elements, repeat=len(names)):
            v = dict(zip(names, vv))
            if evaluator(alg, th, v)(phi) != A.one:
                return th, v
    return None


# ---------------------------------------------------------------- bi-representation

def _stone_terms(ts: TermStructure) -> tuple[TermStructure, IsoWitness]:
    P, g = stone(ts.ba)
    app = {(g(a), g(b)): g(ts.dot(a, b)) for a in ts.elements for b in ts.elements}
    bang = {g(a): g(ts.bang_of(a)) for a in ts.elements}
    interp = {c: g(a) for c, a in ts.interp.items()}
    return TermStructure(P, app, bang, interp), g


def bi_stone(alg: LPBAlgebra) -> tuple[LPBAlgebra, IsoWitness, IsoWitness]:
    """The set-algebra image (B over P) and the witness pair (f, g)."""
    ts2, g = _stone_terms(alg.ts)
    B, f = stone(alg.A)
    box = {(g(a), phi): f(x) for (a, phi), x in alg.box.items()}
    return LPBAlgebra(B, ts2, box, alg.formulas, alg.terms), f, g


def bistone_conditions(alg: LPBAlgebra, image: LPBAlgebra, f: IsoWitness, g: IsoWitness) -> Report:
    """The four bi-isomorphism conditions, exhaustively, plus both witnesses."""
    rep = Report()
    rep.merge(f.verify())
    rep.merge(g.verify())
    ts, ts2 = alg.ts, image.ts
    for a in ts.elements:
        for phi in alg.formulas:
            rep.count("box")
            if f(alg.get(a, phi)) != image.get(g(a), phi):
                rep.fail("box", ts.ba.show(a), show(phi))
    for c in sorted(set(ts.interp) | {ZERO_NAME}):
        rep.count("interp")
        if g(ts.I(c)) != ts2.I(c):
            rep.fail("interp", c)
    for a in ts.elements:
        rep.count("bang")
        if g(ts.bang_of(a)) != ts2.bang_of(g(a)):
            rep.fail("bang", ts.ba.show(a))
        for b in ts.elements:
            rep.count("app")
            if g(ts.dot(a, b)) != ts2.dot(g(a), g(b)):
                rep.fail("app", ts.ba.show(a), ts.ba.show(b))
    return rep.finish()


def pull_back(image: LPBAlgebra, f: IsoWitness, g: IsoWitness, like: LPBAlgebra) -> LPBAlgebra:
    """Invert a bi-Stone image along (f, g), onto the carriers of ``like``."""
    fi, gi = f.inverse(), g.inverse()
    box = {(gi(a), phi): fi(x) for (a, phi), x in image.box.items()}
    return LPBAlgebra(like.A, like.ts, box, image.formulas, image.terms)


# ---------------------------------------------------------------- polynomials

@dataclass(frozen=True, order=True)
class Polynomial:
    """A Boolean polynomial over T: per T-atom truth tables over essential variables.

    Bit j of ``tables[i]`` is the value at atom i when variable ``vars[m]``
    takes bit m of j at that atom.
    """

    vars: tuple[str, ...]
    tables: tuple[int, ...]

    @property
    def is_constant(self) -> bool:
        return not self.vars

    def show(self) -> str:
        body = ";".join(hex(t) for t in self.tables)
        return f"poly[{','.join(self.vars)}]({body})"


def read_poly(text: str, ts: TermStructure) -> Polynomial:
    import re
    m = re.fullmatch(r"\s*poly\[([^\]]*)\]\(([^)]*)\)\s*", text)
    if m is None:
        raise LPBError(f"cannot read polynomial {text!r}")
    names = tuple(x.strip() for x in m.group(1).split(",") if x.strip())
    tabs = tuple(int(x, 0) for x in m.group(2).split(";") if x.strip())
    if len(tabs) != ts.atom_count or any(t >> (1 << len(names)) for t in tabs):
        raise LPBError(f"polynomial {text!r} does not fit the term algebra")
    return _reduce(names, tabs)


def _expand(p: Polynomial, names: tuple[str, ...]) -> tuple[int, ...]:
    if p.vars == names:
        return p.tables
    pos = [names.index(x) for x in p.vars]
    out = []
    for tab in p.tables:
        t = 0
        for j in range(1 << len(names)):
            old = 0
            for m, q in enumerate(pos):
                old |= ((j >> q) & 1) << m
            t |= ((tab >> old) & 1) << j
        out.append(t)
    return tuple(out)


def _reduce(names: tuple[str, ...], tables: tuple[int, ...]) -> Polynomial:
    names, tables = tuple(names), tuple(tables)
    m = 0
    while m < len(names):
        k = len(names)
        essential = False
        for tab in tables:
            for j in range(1 << k):
                if not (j >> m) & 1 and ((tab >> j) & 1) != ((tab >> (j | 1 << m)) & 1):
                    essential = True
                    break
            if essential:
                break
        if essential:
            m += 1
            continue
        new = []
        for tab in tables:
            t, i = 0, 0
            for j in range(1 << k):
                if not (j >> m) & 1:
                    t |= ((tab >> j) & 1) << i
                    i += 1
            new.append(t)
        names, tables = names[:m] + names[m + 1:], tuple(new)
    return Polynomial(names, tables)


def pconst(ts: TermStructure, a) -> Polynomial:
    m = ts.mask(a)
    return Polynomial((), tuple((m >> i) & 1 for i in range(ts.atom_count)))


def pvar(ts: TermStructure, x: str) -> Polynomial:
    return Polynomial((x,), (2,) * ts.atom_count)


def pneg(p: Polynomial) -> Polynomial:
    full = (1 << (1 << len(p.vars))) - 1
    return Polynomial(p.vars, tuple(full & ~t for t in p.tables))


def pjoin(p: Polynomial, q: Polynomial) -> Polynomial:
    names = tuple(sorted(set(p.vars) | set(q.vars)))
    return _reduce(names, tuple(a | b for a, b in zip(_expand(p, names), _expand(q, names))))


def pmeet(p: Polynomial, q: Polynomial) -> Polynomial:
    return pneg(pjoin(pneg(p), pneg(q)))


def peval(p: Polynomial, v: Mapping[str, Hashable], ts: TermStructure):
    """v(p): substitute v and read the result in T."""
    masks = [ts.mask(v[x]) for x in p.vars]
    out = 0
    for i, tab in enumerate(p.tables):
        j = 0
        for m, mk in enumerate(masks):
            j |= ((mk >> i) & 1) << m
        out |= ((tab >> j) & 1) << i
    return ts.unmask(out)


def const_value(p: Polynomial, ts: TermStructure):
    if not p.is_constant:
        raise LPBError(f"{p.show()} is not constant")
    return peval(p, {}, ts)


def poly_from_function(fn: Callable[[Mapping], Hashable], names: Iterable[str], ts: TermStructure,
                       budget: int | None = DEFAULT_BUDGET) -> Polynomial:
    """The polynomial computing fn on T, verified by a full sweep.

    Raises LPBError when fn is not a Boolean polynomial function (it does not
    act atom by atom). Over the two-element T every function qualifies.
    """
    names = tuple(sorted(set(names)))
    n, k = ts.atom_count, len(names)
    full = (1 << n) - 1
    tables = []
    for i in range(n):
        tab = 0
        for j in range(1 << k):
            v = {x: ts.unmask(full if (j >> m) & 1 else 0) for m, x in enumerate(names)}
            tab |= ((ts.mask(fn(v)) >> i) & 1) << j
        tables.append(tab)
    p = _reduce(names, tuple(tables))
    for v in term_assignments(ts, list(names), budget):
        if peval(p, v, ts) != fn(v):
            raise LPBError("the function is not a Boolean polynomial over this term algebra")
    return p


def poly_equal(f: Polynomial, g: Polynomial, ts: TermStructure, budget: int | None = DEFAULT_BUDGET) -> bool:
    """Extensional equality: v(f) = v(g) for every v into T (full sweep)."""
    names = sorted(set(f.vars) | set(g.vars))
    return all(peval(f, v, ts) == peval(g, v, ts) for v in term_assignments(ts, names, budget))


@dataclass(frozen=True, eq=False)
class PolyOps:
    """Extensions of application and bang from T to T[Var]."""

    app: Callable[[Polynomial, Polynomial], Polynomial]
    bang: Callable[[Polynomial], Polynomial]
    kind: str = "custom"


def default_ops(ts: TermStructure) -> PolyOps:
    """On constants use the tables of T; otherwise return the left argument."""

    def app(a: Polynomial, b: Polynomial) -> Polynomial:
        if a.is_constant and b.is_constant:
            return pconst(ts, ts.dot(const_value(a, ts), const_value(b, ts)))
        return a

    def bang(a: Polynomial) -> Polynomial:
        if a.is_constant:
            return pconst(ts, ts.bang_of(const_value(a, ts)))
        return a

    return PolyOps(app, bang, "default")


def pointwise_ops(ts: TermStructure, budget: int | None = DEFAULT_BUDGET) -> PolyOps:
    """Apply the tables of T under every assignment; needs every such map to be a polynomial."""

    def app(a: Polynomial, b: Polynomial) -> Polynomial:
        return poly_from_function(lambda v: ts.dot(peval(a, v, ts), peval(b, v, ts)),
                                  set(a.vars) | set(b.vars), ts, budget)

    def bang(a: Polynomial) -> Polynomial:
        return poly_from_function(lambda v: ts.bang_of(peval(a, v, ts)), a.vars, ts, budget)

    return PolyOps(app, bang, "pointwise")


def extend_ops(ts: TermStructure, app: Callable | None = None, bang: Callable | None = None,
               kind: str | None = None) -> PolyOps:
    """The default extensions, or caller-supplied ones checked to agree with T."""
    base = default_ops(ts)
    if kind == "pointwise":
        base = pointwise_ops(ts)
    ops = PolyOps(app or base.app, bang or base.bang,
                  base.kind if app is None and bang is None else "custom")
    for a in ts.elements:
        pa = pconst(ts, a)
        if ops.bang(pa) != pconst(ts, ts.bang_of(a)):
            raise LPBError(f"bang extension disagrees with T at {ts.ba.show(a)}")
        for b in ts.elements:
            if ops.app(pa, pconst(ts, b)) != pconst(ts, ts.dot(a, b)):
                raise LPBError(f"app extension disagrees with T at ({ts.ba.show(a)}, {ts.ba.show(b)})")
    return ops


def interp_poly(t: Term, ts: TermStructure, ops: PolyOps | None = None) -> Polynomial:
    """I~(t): variables stay variables, constants go through I, operations through ops."""
    ops = default_ops(ts) if ops is None else ops
    memo: dict = {}

    def go(u: Term) -> Polynomial:
        r = memo.get(u)
        if r is not None:
            return r
        if isinstance(u, Var):
            r = pvar(ts, u.name)
        elif isinstance(u, Const):
            r = pconst(ts, ts.I(u.name))
        elif isinstance(u, Zero):
            r = pconst(ts, ts.ba.zero)
        elif isinstance(u, Neg):
            r = pneg(go(u.t))
        elif isinstance(u, Sum):
            r = pjoin(go(u.s), go(u.t))
        elif isinstance(u, App):
            r = ops.app(go(u.s), go(u.t))
        elif isinstance(u, Bang):
            r = ops.bang(go(u.t))
        else:
            raise TypeError(u)
        memo[u] = r
        return r
    return go(t)


# ---------------------------------------------------------------- polynomial LP^B algebras

@dataclass(frozen=True, eq=False)
class PolyLPBAlgebra:
    A: BooleanAlgebra
    ts: TermStructure
    ops: PolyOps
    box: Mapping  # (Polynomial, Formula) -> element of A; absent means zero
    formulas: tuple
    terms: tuple = ()
    conflicts: tuple = ()  # (term or key, other, formula) pairs keyed to one class with different values

    def get(self, p: Polynomial, phi: Formula):
        return self.box.get((p, phi), self.A.zero)

    @cached_property
    def formula_set(self) -> frozenset:
        return frozenset(self.formulas)

    def interp(self, t: Term) -> Polynomial:
        return interp_poly(t, self.ts, self.ops)

    def atoms(self) -> list[str]:
        return sorted({p for phi in self.formulas for p in props(phi)})

    def classes(self) -> list[Polynomial]:
        """Constants of T, the classes of universe terms and every keyed class."""
        out = {pconst(self.ts, a) for a in self.ts.elements}
        out |= {self.interp(t) for t in self.terms}
        out |= {p for p, _ in self.box}
        return sorted(out)


def make_poly_algebra(A: BooleanAlgebra, ts: TermStructure, entries: Mapping, formulas: Iterable[Formula],
                      terms: Iterable[Term] | None = None, ops: PolyOps | None = None) -> PolyLPBAlgebra:
    """Entries may be keyed by terms (read through I~) or by polynomials."""
    ops = default_ops(ts) if ops is None else ops
    fu = close_formulas(formulas)
    tu = close_terms(default_terms(fu) if terms is None else list(terms) + list(default_terms(fu)))
    box: dict = {}
    source: dict = {}
    conflicts = []
    for (key, phi), a in sorted(entries.items(), key=lambda kv: (_key_text(kv[0][0]), show(kv[0][1]))):
        if phi not in fu:
            raise UniverseError(f"box entry for {show(phi)} lies outside the formula universe")
        p = interp_poly(key, ts, ops) if not isinstance(key, Polynomial) else key
        if (p, phi) in box and box[(p, phi)] != a:
            conflicts.append((source[(p, phi)], _key_text(key), show(phi)))
            continue
        box[(p, phi)] = a
        source[(p, phi)] = _key_text(key)
    box = {k: a for k, a in box.items() if a != A.zero}
    return PolyLPBAlgebra(A, ts, ops, box, fu, tu, tuple(conflicts))


def _key_text(key) -> str:
    return key.show() if isinstance(key, Polynomial) else show(key)


def poly_evaluator(alg: PolyLPBAlgebra, theta: Mapping[str, Hashable]):
    A = alg.A
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
            if phi.phi not in alg.formula_set:
                raise UniverseError(f"{show(phi.phi)} is outside the formula universe")
            r = alg.get(alg.interp(phi.t), phi.phi)
        elif isinstance(phi, Eq):
            r = A.one if alg.interp(phi.s) == alg.interp(phi.t) else A.zero
        else:
            raise TypeError(phi)
        memo[phi] = r
        return r
    return ev


def verify_poly_lpb(alg: PolyLPBAlgebra, cs: ConstantSpec = EMPTY_CS, theorems: Iterable[Formula] = (),
                    budget: int | None = DEFAULT_BUDGET) -> Report:
    """Polynomial versions of the conditions over the reachable classes.

    alpha and beta range over the constants of T, the classes of the universe
    terms and the keyed classes; Al-j4 is checked in its polynomial form for
    universe terms t with t:phi in the formula universe.
    """
    A, ts = alg.A, alg.ts
    rep = Report()
    for a, b, phi in alg.conflicts:
        rep.count("well-defined")
        rep.fail("well-defined", a, b, phi, detail="equal polynomials keyed with different values")
    P = alg.classes()
    _verify_pre(rep, A, P, alg.formulas, alg.get, alg.ops.app, pjoin, pconst(ts, ts.ba.one),
                _Interp(ts, lambda a: pconst(ts, a)), cs, theorems, lambda p: p.show())
    fset = alg.formula_set
    for f in alg.formulas:
        if isinstance(f, Just) and f.phi in fset:
            p = alg.interp(f.t)
            rep.count("Al-j4")
            if not A.leq(alg.get(p, f.phi), alg.get(alg.ops.bang(p), f)):
                rep.fail("Al-j4", show(f.t), show(f.phi))
    atoms = alg.atoms()
    check_budget(A.size() ** len(atoms), budget, "Al-jT sweep")
    bad: dict = {}
    n = 0
    for theta in itertools.product(A.elements, repeat=len(atoms)):
        th = dict(zip(atoms, theta))
        ev = poly_evaluator(alg, th)
        n += 1
        for phi in alg.formulas:
            val = ev(phi)
            for p in P:
                if (p, phi) not in bad and not A.leq(alg.get(p, phi), val):
                    bad[(p, phi)] = th
    rep.count("Al-jT", n * len(P) * len(alg.formulas))
    for (p, phi), th in bad.items():
        rep.fail("Al-jT", p.show(), show(phi), detail=f"first theta {{{_show_map(A, th)}}}")
    return rep.finish()


def bi_stone_poly(alg: PolyLPBAlgebra) -> tuple[PolyLPBAlgebra, IsoWitness, Callable]:
    """Set-algebra image of a polynomial algebra, with f and the polynomial map g.

    The internal coordinates of a polynomial are already Stone coordinates,
    so g acts on a polynomial by keeping its tables and moving it to the
    powerset term structure (g(x) = x on variables).
    """
    ts2, g_el = _stone_terms(alg.ts)
    B, f = stone(alg.A)
    if ts2.atom_count != alg.ts.atom_count:
        raise LPBError("Stone image has a different atom count")

    def g(p: Polynomial) -> Polynomial:
        return Polynomial(p.vars, p.tables)

    if alg.ops.kind == "default":
        ops2 = default_ops(ts2)
    elif alg.ops.kind == "pointwise":
        ops2 = pointwise_ops(ts2)
    else:
        ops2 = PolyOps(lambda a, b: g(alg.ops.app(a, b)), lambda a: g(alg.ops.bang(a)), "custom")
    box = {(g(p), phi): f(x) for (p, phi), x in alg.box.items()}
    image = PolyLPBAlgebra(B, ts2, ops2, box, alg.formulas, alg.terms, alg.conflicts)
    return image, f, g


def bistone_poly_conditions(alg: PolyLPBAlgebra, image: PolyLPBAlgebra, f: IsoWitness, g: Callable,
                            extra_terms: Iterable[Term] = ()) -> Report:
    """Bi-isomorphism conditions on the reachable classes, and I~'(t) = g(I~(t))."""
    rep = Report()
    rep.merge(f.verify())
    ts, ts2 = alg.ts, image.ts
    g_el = _stone_terms(ts)[1]
    rep.merge(g_el.verify())
    P = alg.classes()
    for a in ts.elements:
        rep.count("coefficients")
        if g(pconst(ts, a)) != pconst(ts2, g_el(a)):
            rep.fail("coefficients", ts.ba.show(a))
    for p in P:
        for phi in alg.formulas:
            rep.count("box")
            if f(alg.get(p, phi)) != image.get(g(p), phi):
                rep.fail("box", p.show(), show(phi))
    for c in sorted(set(ts.interp) | {ZERO_NAME}):
        rep.count("interp")
        if g(pconst(ts, ts.I(c))) != pconst(ts2, ts2.I(c)):
            rep.fail("interp", c)
    for p in P:
        rep.count("bang")
        if g(alg.ops.bang(p)) != image.ops.bang(g(p)):
            rep.fail("bang", p.show())
        for q in P:
            rep.count("app")
            if g(alg.ops.app(p, q)) != image.ops.app(g(p), g(q)):
                rep.fail("app", p.show(), q.show())
    for t in list(alg.terms) + list(extra_terms):
        rep.count("interp-terms")
        if image.interp(t) != g(alg.interp(t)):
            rep.fail("interp-terms", show(t))
    return rep.finish()


# ---------------------------------------------------------------- constructions

def two_terms(app: Mapping | None = None, bang: Mapping | None = None, interp: Mapping | None = None) -> TermStructure:
    """The two-element term structure; by default app is meet and bang the identity."""
    ba = FiniteBA(1)
    app = {(a, b): a & b for a in (0, 1) for b in (0, 1)} if app is None else app
    bang = {0: 0, 1: 1} if bang is None else bang
    return TermStructure(ba, app, bang, dict(interp or {}))


def minimal_lpb_algebra(universe: Iterable[Formula], cs: ConstantSpec = EMPTY_CS,
                        ts: TermStructure | None = None) -> LPBAlgebra:
    """Binary algebra with Box_alpha(phi) = [phi in S] for every alpha.

    S starts from the CS formulas and the axiom instances of the universe and
    is closed under modus ponens and under phi |- t:phi for every universe
    formula t:phi (the second closure is what Al-j4 and Al-jT demand jointly
    when bang is the identity). By default T is the two-element structure with
    meet as application, identity as bang and every constant sent to 1.
    Whether the result is a full algebra is for verify_full_lpb to say.
    """
    cs_formulas = [phi for _, phi in cs.entries]
    fu = close_formulas(list(universe) + cs_formulas)
    if ts is None:
        names = sorted({c for phi in fu for t in terms_of(phi) for c in _consts(t)} | {c for c, _ in cs.entries})
        ts = two_terms(interp={c: 1 for c in names})
    fset = set(fu)
    s = {phi for phi in cs_formulas if phi in fset}
    s |= {phi for phi in fu if match_axiom(phi, System.LPB) is not None}
    changed = True
    while changed:
        changed = False
        for f in fu:
            if f in s:
                continue
            if isinstance(f, Just) and f.phi in s:
                s.add(f)
                changed = True
                continue
            for g in fu:
                ab = as_imp(g)
                if g in s and ab is not None and ab[1] == f and ab[0] in s:
                    s.add(f)
                    changed = True
                    break
    box = {(a, phi): 1 for a in ts.elements for phi in s}
    return LPBAlgebra(FiniteBA(1), ts, box, fu, close_terms(default_terms(fu)))


def _consts(t: Term) -> set[str]:
    return {u.name for u in subterms(t) if isinstance(u, Const)}


def _relabel(ba: FiniteBA, rng: random.Random, prefix: str) -> TableBA:
    labels = [f"{prefix}{i}" for i in range(1 << ba.atom_count)]
    perm = list(range(1 << ba.atom_count))
    rng.shuffle(perm)
    name = {m: labels[perm[m]] for m in ba.elements}
    neg = {name[m]: name[ba.neg(m)] for m in ba.elements}
    join = {(name[a], name[b]): name[a | b] for a in ba.elements for b in ba.elements}
    carrier = tuple(sorted(name.values()))
    return TableBA(carrier, name[0], neg, join)


_RANDOM_FORMULAS = (
    "p -> p", "p | ~p", "x = x", "x + y = y + x", "x:(p -> p)", "(x + a):(p -> p)",
    "!x:(x:(p -> p))", "a:(p -> p)", "(a*x):(p -> p)", "x:p -> p", "1:(p -> p)", "x:p",
    "(x+a):p", "~(x:p) | x:p", "!a:(a:(p -> p))", "q -> q",
)


def random_full_lpb(rng: random.Random, max_t_atoms: int = 3, max_a_atoms: int = 3, max_formulas: int = 12,
                    tries: int = 200, budget: int | None = DEFAULT_BUDGET) -> LPBAlgebra:
    """A random full LP^B algebra with a nonzero box, checked by verify_full_lpb.

    T and A are powersets of at most 3 atoms presented with shuffled labels.
    The box starts from a few random bumps, is closed upward under Al-Appl,
    Al-Sum and Al-j4 and under the jT demand that Box_{!alpha}(t:phi) bound
    every Box_{t^v}(phi); candidates that still fail are discarded.
    """
    from .syntax import parse_formula
    for _ in range(tries):
        tn, an = rng.randint(1, max_t_atoms), rng.randint(1, max_a_atoms)
        tb = _relabel(FiniteBA(tn), rng, "t")
        ab = _relabel(FiniteBA(an), rng, "a")
        T = tb.elements
        app = {(a, b): rng.choice(T) for a in T for b in T}
        bang = {a: rng.choice(T) for a in T}
        ts = TermStructure(tb, app, bang, {"a": rng.choice(T)})
        picks = rng.sample(_RANDOM_FORMULAS, rng.randint(3, 6))
        fu = close_formulas(parse_formula(s) for s in picks)
        if len(fu) > max_formulas:
            continue
        fu = close_formulas(list(fu) + [parse_formula("p -> p")])
        if len(fu) > max_formulas:
            continue
        taut = [phi for phi in fu if phi in {parse_formula(s) for s in ("p -> p", "q -> q", "p | ~p", "x = x")}]
        if not taut:
            continue
        box: dict = {}
        for _ in range(rng.randint(1, 3)):
            box[(rng.choice(T), rng.choice(taut))] = rng.choice(ab.elements)
        alg = _close_box(make_lpb_algebra(ab, ts, box, fu))
        if all(x == ab.zero for x in alg.box.values()):
            continue
        if verify_full_lpb(alg, budget=budget).ok:
            return alg
    raise LPBError("no full algebra found within the number of tries")


def _close_box(alg: LPBAlgebra, rounds: int = 50) -> LPBAlgebra:
    A, ts = alg.A, alg.ts
    T = ts.elements
    box = dict(alg.box)
    fset = alg.formula_set
    names = alg.variables()

    def get(a, phi):
        return box.get((a, phi), A.zero)

    def raise_to(a, phi, x) -> bool:
        cur = get(a, phi)
        new = A.join(cur, x)
        if new != cur:
            box[(a, phi)] = new
            return True
        return False

    imps = [(f, p) for f in alg.formulas if (p := as_imp(f)) is not None and p[0] in fset and p[1] in fset]
    assigns = list(term_assignments(ts, names, None))
    for _ in range(rounds):
        changed = False
        for a, b in itertools.product(T, repeat=2):
            for f, (x, y) in imps:
                changed |= raise_to(ts.dot(a, b), y, A.meet(get(a, f), get(b, x)))
            for phi in alg.formulas:
                changed |= raise_to(ts.ba.join(a, b), phi, A.join(get(a, phi), get(b, phi)))
        for f in alg.formulas:
            if isinstance(f, Just) and f.phi in fset:
                for a in T:
                    changed |= raise_to(ts.bang_of(a), f, get(a, f.phi))
                hi = A.zero
                for a in T:
                    hi = A.join(hi, get(a, f))
                for v in assigns:
                    changed |= raise_to(eval_term(f.t, v, ts), f.phi, hi)
        if not changed:
            break
    return LPBAlgebra(A, ts, {k: x for k, x in box.items() if x != A.zero}, alg.formulas, alg.terms)

