"""Terms and formulas of LP and LP^B: AST, parser, printer, traversal helpers.

Derived connectives are expanded at parse time, so the AST only holds the
primitive nodes::

    phi -> psi   ==  ~phi | psi
    phi & psi    ==  ~(~phi | ~psi)
    phi <-> psi  ==  (phi -> psi) & (psi -> phi)
    top          ==  ~bot
    1            ==  -0
    s . t        ==  -(-s + -t)

The printer folds these patterns back, so ``parse(show(n)) == n`` always holds.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


class Dialect(enum.Enum):
    LP = "lp"
    LPB = "lpb"


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Neg:
    t: "Term"


@dataclass(frozen=True)
class Sum:
    s: "Term"
    t: "Term"


@dataclass(frozen=True)
class App:
    s: "Term"
    t: "Term"


@dataclass(frozen=True)
class Bang:
    t: "Term"


Term = Union[Var, Const, Zero, Neg, Sum, App, Bang]
TERM_TYPES = (Var, Const, Zero, Neg, Sum, App, Bang)

ZERO = Zero()
ONE = Neg(ZERO)


def meet(s: Term, t: Term) -> Term:
    return Neg(Sum(Neg(s), Neg(t)))


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Not:
    phi: "Formula"


@dataclass(frozen=True)
class Or:
    phi: "Formula"
    psi: "Formula"


@dataclass(frozen=True)
class Just:
    t: Term
    phi: "Formula"


@dataclass(frozen=True)
class Eq:
    s: Term
    t: Term


Formula = Union[Prop, Bottom, Not, Or, Just, Eq]
FORMULA_TYPES = (Prop, Bottom, Not, Or, Just, Eq)

BOT = Bottom()
TOP = Not(BOT)


def imp(phi: Formula, psi: Formula) -> Formula:
    return Or(Not(phi), psi)


def conj(phi: Formula, psi: Formula) -> Formula:
    return Not(Or(Not(phi), Not(psi)))


def iff(phi: Formula, psi: Formula) -> Formula:
    return conj(imp(phi, psi), imp(psi, phi))


def as_imp(phi: Formula) -> tuple[Formula, Formula] | None:
    """Split ``a -> b`` into ``(a, b)``; None if phi is not an implication."""
    if isinstance(phi, Or) and isinstance(phi.phi, Not):
        return phi.phi.phi, phi.psi
    return None


def as_conj(phi: Formula) -> tuple[Formula, Formula] | None:
    if (isinstance(phi, Not) and isinstance(phi.phi, Or)
            and isinstance(phi.phi.phi, Not) and isinstance(phi.phi.psi, Not)):
        return phi.phi.phi.phi, phi.phi.psi.phi
    return None


def as_iff(phi: Formula) -> tuple[Formula, Formula] | None:
    c = as_conj(phi)
    if c is None:
        return None
    left, right = as_imp(c[0]), as_imp(c[1])
    if left is None or right is None:
        return None
    if left[0] == right[1] and left[1] == right[0]:
        return left
    return None


def as_meet(t: Term) -> tuple[Term, Term] | None:
    if (isinstance(t, Neg) and isinstance(t.t, Sum)
            and isinstance(t.t.s, Neg) and isinstance(t.t.t, Neg)):
        return t.t.s.t, t.t.t.t
    return None


# ---------------------------------------------------------------- lexing

VAR_NAME = re.compile(r"[xyz][0-9]*\Z")

_UNICODE = {
    "¬": "~", "∨": "|", "∧": "&", "→": "->", "↔": "<->", "⊥": "bot",
    "⊤": "top", "≈": "=", "·": "*", "⊙": ".", "−": "-",
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[~&|():=*.+!\-])
  | (?P<num>[01](?![A-Za-z0-9_']))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


class ParseError(ValueError):
    """Syntax error; ``pos`` is a character offset into the input."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class DialectError(ParseError):
    """An LP^B-only construct (0, -, 1, '.', '=') used under the LP dialect."""


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'op', 'num', 'ident', 'eof'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    for u, a in _UNICODE.items():
        # pad so aliases like '⊥' never glue onto neighbouring identifiers
        text = text.replace(u, f" {a} " if a.isalpha() else a)
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


# ---------------------------------------------------------------- parsing

class _Parser:
    def __init__(self, text: str, dialect: Dialect):
        self.text = text
        self.dialect = dialect
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "num") and self.tok.text in texts

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def fail(self, msg: str):
        got = self.tok.text or "end of input"
        raise ParseError(f"{msg}, got {got!r}", self.tok.pos, self.text)

    def lpb_only(self, tok: _Tok, what: str):
        if self.dialect is not Dialect.LPB:
            raise DialectError(f"{what} is not part of the LP dialect", tok.pos, self.text)

    def finish(self):
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input")

    # terms: + < . < * < prefix
    def term(self) -> Term:
        left = self.meet_term()
        while self.at("+"):
            self.i += 1
            left = Sum(left, self.meet_term())
        return left

    def meet_term(self) -> Term:
        left = self.app_term()
        while self.at("."):
            self.lpb_only(self.tok, "'.'")
            self.i += 1
            left = meet(left, self.app_term())
        return left

    def app_term(self) -> Term:
        left = self.prefix_term()
        while self.at("*"):
            self.i += 1
            left = App(left, self.prefix_term())
        return left

    def prefix_term(self) -> Term:
        tok = self.tok
        if self.at("!"):
            self.i += 1
            return Bang(self.prefix_term())
        if self.at("-"):
            self.lpb_only(tok, "'-'")
            self.i += 1
            return Neg(self.prefix_term())
        return self.primary_term()

    def primary_term(self) -> Term:
        tok = self.tok
        if self.at("("):
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "num":
            self.lpb_only(tok, repr(tok.text))
            self.i += 1
            return ZERO if tok.text == "0" else ONE
        if tok.kind == "ident" and tok.text not in ("bot", "top"):
            self.i += 1
            return Var(tok.text) if VAR_NAME.match(tok.text) else Const(tok.text)
        self.fail("expected a term")

    # formulas: <-> < -> < | < & < ~ < unit
    def formula(self) -> Formula:
        left = self.imp_formula()
        while self.at("<->"):
            self.i += 1
            left = iff(left, self.imp_formula())
        return left

    def imp_formula(self) -> Formula:
        left = self.or_formula()
        if self.at("->"):
            self.i += 1
            return imp(left, self.imp_formula())
        return left

    def or_formula(self) -> Formula:
        left = self.and_formula()
        while self.at("|"):
            self.i += 1
            left = Or(left, self.and_formula())
        return left

    def and_formula(self) -> Formula:
        left = self.not_formula()
        while self.at("&"):
            self.i += 1
            left = conj(left, self.not_formula())
        return left

    def not_formula(self) -> Formula:
        if self.at("~"):
            self.i += 1
            return Not(self.not_formula())
        return self.unit()

    def unit(self) -> Formula:
        # a term followed by ':' or '=' starts a justification or an equation;
        # anything else is re-read as a propositional unit
        start = self.i
        try:
            t = self.term()
        except DialectError:
            raise
        except ParseError:
            t = None
        if t is not None and self.at(":"):
            self.i += 1
            return Just(t, self.unit())
        if t is not None and self.at("="):
            self.lpb_only(self.tok, "'='")
            self.i += 1
            return Eq(t, self.term())
        self.i = start
        tok = self.tok
        if self.at("("):
            self.i += 1
            phi = self.formula()
            self.expect(")")
            return phi
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "bot":
                return BOT
            if tok.text == "top":
                return TOP
            return Prop(tok.text)
        self.fail("expected a formula")


def parse_term(text: str, dialect: Dialect = Dialect.LPB) -> Term:
    p = _Parser(text, dialect)
    t = p.term()
    p.finish()
    return t


def parse_formula(text: str, dialect: Dialect = Dialect.LPB) -> Formula:
    p = _Parser(text, dialect)
    phi = p.formula()
    p.finish()
    return phi


# ---------------------------------------------------------------- printing

def _show_term(t: Term, prec: int) -> str:
    # precedence: 1 '+', 2 '.', 3 '*', 4 prefix, 5 atom
    m = as_meet(t)
    if isinstance(t, Var) or isinstance(t, Const):
        s, p = t.name, 5
    elif isinstance(t, Zero):
        s, p = "0", 5
    elif t == ONE:
        s, p = "1", 5
    elif m is not None:
        s, p = f"{_show_term(m[0], 2)} . {_show_term(m[1], 3)}", 2
    elif isinstance(t, Neg):
        s, p = "-" + _show_term(t.t, 4), 4
    elif isinstance(t, Bang):
        s, p = "!" + _show_term(t.t, 4), 4
    elif isinstance(t, Sum):
        s, p = f"{_show_term(t.s, 1)} + {_show_term(t.t, 2)}", 1
    elif isinstance(t, App):
        # both operands of '*' are bracketed when compound, as in (a*b)*c
        s, p = f"{_show_term(t.s, 4)}*{_show_term(t.t, 4)}", 3
    else:
        raise TypeError(f"not a term: {t!r}")
    return f"({s})" if p < prec else s


def _show_formula(phi: Formula, prec: int) -> str:
    # precedence: 1 '<->', 2 '->', 3 '|', 4 '&', 5 '~', 6 unit
    if isinstance(phi, Prop):
        s, p = phi.name, 6
    elif isinstance(phi, Bottom):
        s, p = "bot", 6
    elif phi == TOP:
        s, p = "top", 6
    elif isinstance(phi, Just):
        s, p = f"{_show_term(phi.t, 3)}:{_show_formula(phi.phi, 6)}", 6
    elif isinstance(phi, Eq):
        s, p = f"{_show_term(phi.s, 0)} = {_show_term(phi.t, 0)}", 6
    elif (b := as_iff(phi)) is not None:
        s, p = f"{_show_formula(b[0], 1)} <-> {_show_formula(b[1], 2)}", 1
    elif (c := as_conj(phi)) is not None:
        s, p = f"{_show_formula(c[0], 4)} & {_show_formula(c[1], 5)}", 4
    elif isinstance(phi, Not):
        s, p = "~" + _show_formula(phi.phi, 5), 5
    elif (i := as_imp(phi)) is not None:
        s, p = f"{_show_formula(i[0], 3)} -> {_show_formula(i[1], 2)}", 2
    elif isinstance(phi, Or):
        s, p = f"{_show_formula(phi.phi, 3)} | {_show_formula(phi.psi, 4)}", 3
    else:
        raise TypeError(f"not a formula: {phi!r}")
    return f"({s})" if p < prec else s


def show(node: Term | Formula) -> str:
    """Render a term or formula in the ASCII surface syntax."""
    if isinstance(node, TERM_TYPES):
        return _show_term(node, 0)
    return _show_formula(node, 0)


# ---------------------------------------------------------------- traversal

def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, (Neg, Bang)):
        yield from subterms(t.t)
    elif isinstance(t, (Sum, App)):
        yield from subterms(t.s)
        yield from subterms(t.t)


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, Not):
        yield from subformulas(phi.phi)
    elif isinstance(phi, Or):
        yield from subformulas(phi.phi)
        yield from subformulas(phi.psi)
    elif isinstance(phi, Just):
        yield from subformulas(phi.phi)


def terms_of(phi: Formula) -> Iterator[Term]:
    """Top-level terms occurring in phi (under ':' or '=')."""
    for sub in subformulas(phi):
        if isinstance(sub, Just):
            yield sub.t
        elif isinstance(sub, Eq):
            yield sub.s
            yield sub.t


def all_subterms(phi: Formula) -> Iterator[Term]:
    for t in terms_of(phi):
        yield from subterms(t)


def props(phi: Formula) -> list[str]:
    """Propositional atoms of phi, including those under ':', sorted."""
    return sorted({f.name for f in subformulas(phi) if isinstance(f, Prop)})


def term_vars(t: Term) -> list[str]:
    return sorted({s.name for s in subterms(t) if isinstance(s, Var)})


def formula_vars(phi: Formula) -> list[str]:
    return sorted({s.name for s in all_subterms(phi) if isinstance(s, Var)})


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def formula_size(phi: Formula) -> int:
    n = 0
    for sub in subformulas(phi):
        n += 1
        if isinstance(sub, Just):
            n += term_size(sub.t)
        elif isinstance(sub, Eq):
            n += term_size(sub.s) + term_size(sub.t)
    return n


def uses_lpb(node: Term | Formula) -> bool:
    if isinstance(node, TERM_TYPES):
        return any(isinstance(s, (Zero, Neg)) for s in subterms(node))
    if any(isinstance(f, Eq) for f in subformulas(node)):
        return True
    return any(uses_lpb(t) for t in terms_of(node))


def in_dialect(node: Term | Formula, dialect: Dialect) -> bool:
    return dialect is Dialect.LPB or not uses_lpb(node)


def formula_key(phi: Formula) -> tuple[int, str]:
    """Deterministic ordering key: size first, then printed form."""
    return formula_size(phi), show(phi)


def closure_universe(seeds: Iterable[Formula], depth: int = 0) -> tuple[Formula, ...]:
    """Subformula closure of ``seeds``, wrapped ``depth`` times in ``t:_``.

    Each round adds ``t:psi`` for every subterm ``t`` occurring in the seeds
    and every ``psi`` already collected.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    seeds = list(seeds)
    out: set[Formula] = set()
    for phi in seeds:
        out.update(subformulas(phi))
    terms = {t for phi in seeds for t in all_subterms(phi)}
    for _ in range(depth):
        out |= {Just(t, psi) for t in terms for psi in out}
    return tuple(sorted(out, key=formula_key))
