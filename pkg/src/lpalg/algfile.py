"""Sectioned text files describing finite algebras.

A section starts with ``name:`` (optionally followed by a value on the same
line) and runs until the next section. Recognised sections::

    kind:        full-lp | hlp | regular | binary | full-lpb | poly-lpb
    atoms: n     the formula algebra is the powerset of n atoms (hex masks)
    carrier:     labels of an abstract formula algebra, with zero:, neg:, join:
    terms:       term universe, one per line
    formulas:    formula universe, one per line
    box:         "<index> | <formula> | <value>"
    cs:          "<constant> : <formula>" lines, or "total"
    ops:         HLP operator tables, "<term> | <a> -> <b>"
    termatoms: n or termcarrier: with termzero:, termneg:, termjoin:
    app:         "<a> <b> -> <c>"
    bang:        "<a> -> <b>"
    interp:      "<constant> -> <a>"
    extension:   default | pointwise
    theorems:    formulas used for the Al-1 condition

Box indices are terms for full-lp/binary, elements of T for full-lpb, and
terms or printed polynomials for poly-lpb.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .finitealg import BooleanAlgebra, BoxTable, FiniteBA, TableBA, make_box_table
from .lpbalg import (
    LPBAlgebra, PolyLPBAlgebra, TermStructure, extend_ops, make_lpb_algebra, make_poly_algebra, read_poly,
)
from .proofs import ConstantSpec, FormatError, System, parse_cs
from .syntax import Dialect, ParseError, Term, parse_formula, parse_term, show

KINDS = ("full-lp", "hlp", "regular", "binary", "full-lpb", "poly-lpb")
SECTIONS = {
    "kind", "atoms", "carrier", "zero", "neg", "join", "terms", "formulas", "box", "cs", "ops",
    "termatoms", "termcarrier", "termzero", "termneg", "termjoin", "app", "bang", "interp",
    "extension", "theorems",
}
_HEADER = re.compile(r"^([a-z]+):\s*(.*)$")


class AlgebraFileError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class AlgebraFile:
    kind: str
    sections: dict = field(default_factory=dict)  # name -> list of (lineno, text)

    @property
    def lpb(self) -> bool:
        return self.kind in ("full-lpb", "poly-lpb")

    @property
    def dialect(self) -> Dialect:
        return Dialect.LPB if self.lpb else Dialect.LP

    def lines(self, name: str) -> list[tuple[int, str]]:
        return self.sections.get(name, [])

    def value(self, name: str) -> tuple[int, str] | None:
        items = self.lines(name)
        return items[0] if items else None


def parse_algebra_file(text: str) -> AlgebraFile:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m and m.group(1) in SECTIONS:
            current = m.group(1)
            if current in sections:
                raise AlgebraFileError(f"section {current!r} appears twice", lineno)
            sections[current] = []
            if m.group(2).strip():
                sections[current].append((lineno, m.group(2).strip()))
            continue
        if current is None:
            raise AlgebraFileError(f"text before the first section: {line!r}", lineno)
        sections[current].append((lineno, line))
    kind = sections.get("kind")
    if not kind:
        raise AlgebraFileError("missing 'kind:'")
    if kind[0][1] not in KINDS:
        raise AlgebraFileError(f"unknown kind {kind[0][1]!r}", kind[0][0])
    return AlgebraFile(kind[0][1], sections)


# ---------------------------------------------------------------- readers

def _ba(af: AlgebraFile, prefix: str) -> BooleanAlgebra:
    atoms = af.value(prefix + "atoms")
    carrier = af.lines(prefix + "carrier")
    if atoms and carrier:
        raise AlgebraFileError(f"give either {prefix}atoms or {prefix}carrier", atoms[0])
    if atoms:
        try:
            n = int(atoms[1])
        except ValueError:
            raise AlgebraFileError(f"bad atom count {atoms[1]!r}", atoms[0]) from None
        if not 0 <= n <= 16:
            raise AlgebraFileError("atom count out of range", atoms[0])
        return FiniteBA(n)
    if not carrier:
        raise AlgebraFileError(f"missing {prefix}atoms or {prefix}carrier")
    labels = tuple(x for _, line in carrier for x in line.split())
    if len(set(labels)) != len(labels):
        raise AlgebraFileError("repeated carrier label", carrier[0][0])
    zero = af.value(prefix + "zero")
    if zero is None or zero[1] not in labels:
        raise AlgebraFileError(f"{prefix}zero must name a carrier element")
    neg, join = {}, {}
    for lineno, line in af.lines(prefix + "neg"):
        a, b = _arrow(line, 1, lineno)
        neg[a[0]] = b
    for lineno, line in af.lines(prefix + "join"):
        a, b = _arrow(line, 2, lineno)
        join[tuple(a)] = b
    return TableBA(labels, zero[1], neg, join)


def _arrow(line: str, n: int, lineno: int) -> tuple[list[str], str]:
    if "->" not in line:
        raise AlgebraFileError(f"expected '... -> ...' in {line!r}", lineno)
    lhs, rhs = line.split("->", 1)
    args = lhs.split()
    if len(args) != n or len(rhs.split()) != 1:
        raise AlgebraFileError(f"expected {n} argument(s) and one result in {line!r}", lineno)
    return args, rhs.strip()


def _elem(B: BooleanAlgebra, text: str, lineno: int):
    try:
        return B.read(text.strip())
    except ValueError as e:
        raise AlgebraFileError(str(e), lineno) from None


def _formulas(af: AlgebraFile, name: str) -> list:
    out = []
    for lineno, line in af.lines(name):
        try:
            out.append(parse_formula(line, af.dialect))
        except ParseError as e:
            raise AlgebraFileError(str(e), lineno) from None
    return out


def _terms(af: AlgebraFile) -> list[Term] | None:
    if "terms" not in af.sections:
        return None
    out = []
    for lineno, line in af.lines("terms"):
        try:
            out.append(parse_term(line, af.dialect))
        except ParseError as e:
            raise AlgebraFileError(str(e), lineno) from None
    return out


def read_cs(af: AlgebraFile, validate: bool = True) -> ConstantSpec:
    text = "\n".join(line for _, line in af.lines("cs"))
    try:
        return parse_cs(text, System.LPB if af.lpb else System.LP, validate)
    except FormatError as e:
        first = af.lines("cs")[0][0] if af.lines("cs") else 0
        raise AlgebraFileError(str(e), first) from None


def read_theorems(af: AlgebraFile) -> list:
    return _formulas(af, "theorems")


def formula_algebra(af: AlgebraFile) -> BooleanAlgebra:
    A = _ba(af, "")
    if isinstance(A, TableBA):  # powerset algebras are Boolean by construction
        A.validate()
    return A


def _box_rows(af: AlgebraFile):
    for lineno, line in af.lines("box"):
        # formulas may contain '|', so split at the first and the last bar
        if line.count("|") < 2:
            raise AlgebraFileError("box lines read '<index> | <formula> | <value>'", lineno)
        idx, rest = line.split("|", 1)
        body, val = rest.rsplit("|", 1)
        parts = [idx.strip(), body.strip(), val.strip()]
        try:
            phi = parse_formula(parts[1], af.dialect)
        except ParseError as e:
            raise AlgebraFileError(str(e), lineno) from None
        yield lineno, parts[0], phi, parts[2]


def read_box_table(af: AlgebraFile) -> tuple[BooleanAlgebra, BoxTable]:
    if af.kind not in ("full-lp", "binary"):
        raise AlgebraFileError(f"kind {af.kind} has no box table")
    A = formula_algebra(af)
    entries = {}
    for lineno, idx, phi, val in _box_rows(af):
        try:
            t = parse_term(idx, af.dialect)
        except ParseError as e:
            raise AlgebraFileError(str(e), lineno) from None
        entries[(t, phi)] = _elem(A, val, lineno)
    formulas = _formulas(af, "formulas") + [phi for _, phi in entries]
    terms = _terms(af)
    if terms is not None:
        terms = terms + [t for t, _ in entries]
    return A, make_box_table(entries, formulas, terms, A.zero)


def read_hlp_ops(af: AlgebraFile) -> tuple[BooleanAlgebra, dict]:
    if af.kind not in ("hlp", "regular"):
        raise AlgebraFileError(f"kind {af.kind} has no operator tables")
    A = formula_algebra(af)
    ops: dict = {t: {} for t in (_terms(af) or [])}
    for lineno, line in af.lines("ops"):
        if "|" not in line:
            raise AlgebraFileError("ops lines read '<term> | <a> -> <b>'", lineno)
        ts, rest = line.split("|", 1)
        try:
            t = parse_term(ts, af.dialect)
        except ParseError as e:
            raise AlgebraFileError(str(e), lineno) from None
        a, b = _arrow(rest, 1, lineno)
        ops.setdefault(t, {})[_elem(A, a[0], lineno)] = _elem(A, b, lineno)
    return A, ops


def term_structure(af: AlgebraFile) -> TermStructure:
    T = _ba(af, "term")
    app, bang, interp = {}, {}, {}
    for lineno, line in af.lines("app"):
        a, b = _arrow(line, 2, lineno)
        app[(_elem(T, a[0], lineno), _elem(T, a[1], lineno))] = _elem(T, b, lineno)
    for lineno, line in af.lines("bang"):
        a, b = _arrow(line, 1, lineno)
        bang[_elem(T, a[0], lineno)] = _elem(T, b, lineno)
    for lineno, line in af.lines("interp"):
        a, b = _arrow(line, 1, lineno)
        interp[a[0]] = _elem(T, b, lineno)
    ts = TermStructure(T, app, bang, interp)
    try:
        return ts.validate()
    except ValueError as e:
        raise AlgebraFileError(str(e)) from None


def read_lpb_algebra(af: AlgebraFile) -> LPBAlgebra:
    if af.kind != "full-lpb":
        raise AlgebraFileError(f"kind {af.kind} is not full-lpb")
    A = formula_algebra(af)
    ts = term_structure(af)
    box = {}
    for lineno, idx, phi, val in _box_rows(af):
        box[(_elem(ts.ba, idx, lineno), phi)] = _elem(A, val, lineno)
    formulas = _formulas(af, "formulas") + [phi for _, phi in box]
    try:
        return make_lpb_algebra(A, ts, box, formulas, _terms(af))
    except ValueError as e:
        raise AlgebraFileError(str(e)) from None


def read_poly_algebra(af: AlgebraFile) -> PolyLPBAlgebra:
    if af.kind != "poly-lpb":
        raise AlgebraFileError(f"kind {af.kind} is not poly-lpb")
    A = formula_algebra(af)
    ts = term_structure(af)
    ext = af.value("extension")
    kind = "default" if ext is None else ext[1]
    if kind not in ("default", "pointwise"):
        raise AlgebraFileError(f"unknown extension {kind!r}", ext[0])
    try:
        ops = extend_ops(ts, kind=kind)
    except ValueError as e:
        raise AlgebraFileError(str(e)) from None
    entries = {}
    for lineno, idx, phi, val in _box_rows(af):
        try:
            key = read_poly(idx, ts) if idx.startswith("poly[") else parse_term(idx, af.dialect)
        except ValueError as e:
            raise AlgebraFileError(str(e), lineno) from None
        entries[(key, phi)] = _elem(A, val, lineno)
    formulas = _formulas(af, "formulas") + [phi for _, phi in entries]
    try:
        return make_poly_algebra(A, ts, entries, formulas, _terms(af), ops)
    except ValueError as e:
        raise AlgebraFileError(str(e)) from None


# ---------------------------------------------------------------- writers

def _ba_lines(B: BooleanAlgebra, prefix: str) -> list[str]:
    if isinstance(B, FiniteBA):
        return [f"{prefix}atoms: {B.atom_count}"]
    out = [f"{prefix}carrier: {' '.join(B.show(a) for a in B.elements)}", f"{prefix}zero: {B.show(B.zero)}",
           f"{prefix}neg:"]
    out += [f"  {B.show(a)} -> {B.show(B.neg(a))}" for a in B.elements]
    out.append(f"{prefix}join:")
    out += [f"  {B.show(a)} {B.show(b)} -> {B.show(B.join(a, b))}" for a in B.elements for b in B.elements]
    return out


def _cs_lines(cs: ConstantSpec | None) -> list[str]:
    if cs is None or (not cs.entries and not cs.total):
        return []
    out = ["cs:"] + (["  total"] if cs.total else [])
    return out + [f"  {c} : {show(phi)}" for c, phi in sorted(cs.entries, key=lambda e: (e[0], show(e[1])))]


def format_box_table(A: BooleanAlgebra, box: BoxTable, kind: str = "full-lp", cs: ConstantSpec | None = None) -> str:
    lines = [f"kind: {kind}"] + _ba_lines(A, "")
    lines += ["terms:"] + [f"  {show(t)}" for t in box.terms]
    lines += ["formulas:"] + [f"  {show(phi)}" for phi in box.formulas]
    lines += ["box:"] + [f"  {show(t)} | {show(phi)} | {A.show(v)}" for (t, phi), v in box.items()]
    return "\n".join(lines + _cs_lines(cs)) + "\n"


def _ts_lines(ts: TermStructure) -> list[str]:
    B = ts.ba
    lines = _ba_lines(B, "term")
    lines += ["app:"] + [f"  {B.show(a)} {B.show(b)} -> {B.show(ts.dot(a, b))}" for a in B.elements for b in B.elements]
    lines += ["bang:"] + [f"  {B.show(a)} -> {B.show(ts.bang_of(a))}" for a in B.elements]
    if ts.interp:
        lines += ["interp:"] + [f"  {c} -> {B.show(a)}" for c, a in sorted(ts.interp.items())]
    return lines


def format_lpb_algebra(alg: LPBAlgebra, cs: ConstantSpec | None = None, theorems=()) -> str:
    A, T = alg.A, alg.ts.ba
    lines = ["kind: full-lpb"] + _ba_lines(A, "") + _ts_lines(alg.ts)
    lines += ["terms:"] + [f"  {show(t)}" for t in alg.terms]
    lines += ["formulas:"] + [f"  {show(phi)}" for phi in alg.formulas]
    rows = sorted(((T.show(a), show(phi), A.show(v)) for (a, phi), v in alg.box.items()))
    lines += ["box:"] + [f"  {a} | {phi} | {v}" for a, phi, v in rows]
    if theorems:
        lines += ["theorems:"] + [f"  {show(phi)}" for phi in sorted(set(theorems), key=show)]
    return "\n".join(lines + _cs_lines(cs)) + "\n"


def format_poly_algebra(alg: PolyLPBAlgebra, cs: ConstantSpec | None = None, theorems=()) -> str:
    A = alg.A
    lines = ["kind: poly-lpb"] + _ba_lines(A, "") + _ts_lines(alg.ts)
    if alg.ops.kind in ("default", "pointwise"):
        lines.append(f"extension: {alg.ops.kind}")
    lines += ["terms:"] + [f"  {show(t)}" for t in alg.terms]
    lines += ["formulas:"] + [f"  {show(phi)}" for phi in alg.formulas]
    rows = sorted((p.show(), show(phi), A.show(v)) for (p, phi), v in alg.box.items())
    lines += ["box:"] + [f"  {p} | {phi} | {v}" for p, phi, v in rows]
    if theorems:
        lines += ["theorems:"] + [f"  {show(phi)}" for phi in sorted(set(theorems), key=show)]
    return "\n".join(lines + _cs_lines(cs)) + "\n"


def format_hlp_ops(A: BooleanAlgebra, ops: dict, kind: str = "hlp") -> str:
    lines = [f"kind: {kind}"] + _ba_lines(A, "")
    lines += ["terms:"] + [f"  {show(t)}" for t in sorted(ops, key=show)]
    lines.append("ops:")
    for t in sorted(ops, key=show):
        for a in A.elements:
            b = ops[t].get(a, A.zero)
            if b != A.zero:
                lines.append(f"  {show(t)} | {A.show(a)} -> {A.show(b)}")
    return "\n".join(lines) + "\n"
