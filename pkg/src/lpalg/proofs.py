"""Hilbert derivations for LP, HLP (LP plus JReg) and LP^B, and their checker.

Step references are 0-based in the API and 1-based in the text format.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Union

from .syntax import (
    BOT, ONE, ZERO, App, Bang, Const, Dialect, Eq, Formula, Just, Neg, Not, Or, Prop,
    ParseError, Sum, Term, Var, VAR_NAME, as_conj, as_iff, as_imp, conj, imp,
    in_dialect, meet, parse_formula, parse_term, show, all_subterms,
)


class System(enum.Enum):
    LP = "lp"
    HLP = "hlp"
    LPB = "lpb"

    @property
    def dialect(self) -> Dialect:
        return Dialect.LPB if self is System.LPB else Dialect.LP


# ---------------------------------------------------------------- schemes

@dataclass(frozen=True)
class MetaF:
    name: str


@dataclass(frozen=True)
class MetaT:
    name: str


_F, _G, _H = MetaF("phi"), MetaF("psi"), MetaF("chi")
_S, _T, _U = MetaT("s"), MetaT("t"), MetaT("u")

LP_SCHEMES: dict[str, Formula] = {
    "PL1": imp(_F, Or(_F, _G)),
    "PL2": imp(Or(_F, _G), Or(_G, _F)),
    "PL3": imp(Or(_F, _F), _F),
    "PL4": imp(imp(_F, _G), imp(Or(_H, _F), Or(_H, _G))),
    "PL5": imp(BOT, _F),
    "Appl": imp(Just(_S, imp(_F, _G)), imp(Just(_T, _F), Just(App(_S, _T), _G))),
    "Sum": imp(Or(Just(_S, _F), Just(_T, _F)), Just(Sum(_S, _T), _F)),
    "jT": imp(Just(_T, _F), _F),
    "j4": imp(Just(_T, _F), Just(Bang(_T), Just(_T, _F))),
}

# the unprimed id is the '+' column, the "d" id its dual in the meet column
LPB_SCHEMES: dict[str, Formula] = {
    "B1": Eq(Sum(_S, _T), Sum(_T, _S)),
    "B1d": Eq(meet(_S, _T), meet(_T, _S)),
    "B2": Eq(Sum(_S, Sum(_T, _U)), Sum(Sum(_S, _T), _U)),
    "B2d": Eq(meet(_S, meet(_T, _U)), meet(meet(_S, _T), _U)),
    "B3": Eq(Sum(_S, ZERO), _S),
    "B3d": Eq(meet(_S, ONE), _S),
    "B4": Eq(Sum(_S, Neg(_S)), ONE),
    "B4d": Eq(meet(_S, Neg(_S)), ZERO),
    "B5": Eq(Sum(_S, meet(_T, _U)), meet(Sum(_S, _T), Sum(_S, _U))),
    "B5d": Eq(meet(_S, Sum(_T, _U)), Sum(meet(_S, _T), meet(_S, _U))),
    "Eq1": Eq(_T, _T),
}

SCHEME_IDS: tuple[str, ...] = tuple(LP_SCHEMES) + tuple(LPB_SCHEMES) + ("Eq2",)


def _match(pat, node, sub: dict) -> bool:
    if isinstance(pat, (MetaF, MetaT)):
        bound = sub.get(pat.name)
        if bound is None:
            sub[pat.name] = node
            return True
        return bound == node
    if type(pat) is not type(node):
        return False
    for name in pat.__dataclass_fields__:
        if not _match(getattr(pat, name), getattr(node, name), sub):
            return False
    return True


def match_scheme(phi: Formula, scheme: str) -> dict | None:
    """Substitution making ``phi`` an instance of ``scheme``, or None."""
    if scheme == "Eq2":
        return match_eq2(phi)
    pat = LP_SCHEMES.get(scheme) or LPB_SCHEMES.get(scheme)
    if pat is None:
        raise KeyError(f"unknown scheme {scheme!r}")
    sub: dict = {}
    return sub if _match(pat, phi, sub) else None


def _holes(a, b, s: Term, t: Term, n: list[int]) -> bool:
    # a and b agree except where a has s and b has t
    if a == b:
        return True
    if a == s and b == t:
        n[0] += 1
        return True
    if type(a) is not type(b) or not hasattr(a, "__dataclass_fields__"):
        return False
    return all(_holes(getattr(a, f), getattr(b, f), s, t, n) for f in a.__dataclass_fields__)


def _fill(a, b, s: Term, t: Term, x: Var):
    if a == b:
        return a
    if a == s and b == t:
        return x
    return type(a)(*(_fill(getattr(a, f), getattr(b, f), s, t, x) for f in a.__dataclass_fields__))


def match_eq2(phi: Formula) -> dict | None:
    """Match ``s = t & A -> B`` where B is A with some occurrences of s replaced by t."""
    parts = as_imp(phi)
    if parts is None:
        return None
    c = as_conj(parts[0])
    if c is None or not isinstance(c[0], Eq):
        return None
    s, t = c[0].s, c[0].t
    a, b = c[1], parts[1]
    n = [0]
    if not _holes(a, b, s, t, n):
        return None
    used = {v.name for f in (a, b) for v in all_subterms(f) if isinstance(v, Var)}
    i = 0
    while f"z{i}" in used:
        i += 1
    x = Var(f"z{i}")
    return {"s": s, "t": t, "phi": _fill(a, b, s, t, x), "x": x, "holes": n[0]}


def match_axiom(phi: Formula, system: System = System.LP) -> tuple[str, dict] | None:
    """First scheme (in SCHEME_IDS order) of ``system`` that phi instantiates."""
    ids = list(LP_SCHEMES)
    if system is System.LPB:
        ids += list(LPB_SCHEMES) + ["Eq2"]
    for sid in ids:
        sub = match_scheme(phi, sid)
        if sub is not None:
            return sid, sub
    return None


def schemes_for(system: System) -> tuple[str, ...]:
    if system is System.LPB:
        return SCHEME_IDS
    return tuple(LP_SCHEMES)


# ---------------------------------------------------------------- constant specifications

def is_tautology(phi: Formula) -> bool:
    """Classical validity, with t:psi and s = t read as opaque atoms."""
    atoms: list = []

    def collect(f):
        if isinstance(f, (Prop, Just, Eq)):
            if f not in atoms:
                atoms.append(f)
        elif isinstance(f, Not):
            collect(f.phi)
        elif isinstance(f, Or):
            collect(f.phi)
            collect(f.psi)

    def value(f, row) -> bool:
        if isinstance(f, (Prop, Just, Eq)):
            return row[f]
        if isinstance(f, Not):
            return not value(f.phi, row)
        if isinstance(f, Or):
            return value(f.phi, row) or value(f.psi, row)
        return False

    collect(phi)
    return all(value(phi, dict(zip(atoms, bits)))
               for bits in itertools.product((False, True), repeat=len(atoms)))


class CSError(ValueError):
    pass


@dataclass(frozen=True)
class ConstantSpec:
    entries: frozenset = frozenset()  # of (constant name, Formula)
    total: bool = False

    @classmethod
    def of(cls, pairs: Iterable[tuple[str, Formula]] = (), total: bool = False) -> "ConstantSpec":
        return cls(frozenset(pairs), total)

    def validate(self, system: System) -> "ConstantSpec":
        for c, phi in sorted(self.entries, key=lambda e: (e[0], show(e[1]))):
            if VAR_NAME.match(c):
                raise CSError(f"{c!r} is a proof variable, not a constant")
            if not in_dialect(phi, system.dialect):
                raise CSError(f"entry {c}:{show(phi)} is outside the {system.value} language")
            if match_axiom(phi, system) is None and not is_tautology(phi):
                raise CSError(f"entry {c}:({show(phi)}) is neither an axiom instance nor a tautology")
        return self

    def union(self, pairs: Iterable[tuple[str, Formula]]) -> "ConstantSpec":
        return ConstantSpec(self.entries | frozenset(pairs), self.total)

    def formulas(self, c: str) -> list[Formula]:
        return sorted((phi for d, phi in self.entries if d == c), key=show)

    def constants_for(self, phi: Formula) -> list[str]:
        return sorted(c for c, psi in self.entries if psi == phi)

    def as_formulas(self) -> list[Formula]:
        return [Just(Const(c), phi) for c, phi in sorted(self.entries, key=lambda e: (e[0], show(e[1])))]


EMPTY_CS = ConstantSpec()


def cs_member(c: str, phi: Formula, cs: ConstantSpec, system: System = System.LP) -> bool:
    if (c, phi) in cs.entries:
        return True
    return cs.total and not VAR_NAME.match(c) and match_axiom(phi, system) is not None


# ---------------------------------------------------------------- proofs

@dataclass(frozen=True)
class Axiom:
    scheme: str


@dataclass(frozen=True)
class CSMember:
    pass


@dataclass(frozen=True)
class Hyp:
    index: int


@dataclass(frozen=True)
class MP:
    i: int  # premise
    j: int  # implication


@dataclass(frozen=True)
class JReg:
    i: int
    t: Term


@dataclass(frozen=True)
class Int:
    i: int


@dataclass(frozen=True)
class AppRule:
    """Derived rule: from r:(a -> b) and s:a infer (r*s):b (Appl plus two MP)."""

    i: int  # s:a
    j: int  # r:(a -> b)


Justification = Union[Axiom, CSMember, Hyp, MP, JReg, Int, AppRule]


@dataclass(frozen=True)
class Step:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Proof:
    steps: tuple[Step, ...]
    hyps: tuple[Formula, ...] = ()
    system: System = System.LP

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, *steps: Step) -> "Proof":
        return Proof(self.steps + tuple(steps), self.hyps, self.system)


@dataclass(frozen=True)
class StepRecord:
    index: int
    rule: str
    scheme: str | None = None
    subst: tuple = ()  # sorted (name, printed node) pairs
    refs: tuple[int, ...] = ()


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    first_failure: tuple[int, str] | None = None
    per_step: tuple[StepRecord, ...] = ()
    flags: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "first_failure": None if self.first_failure is None
            else {"step": self.first_failure[0] + 1, "reason": self.first_failure[1]},
            "steps": [
                {"step": r.index + 1, "rule": r.rule, "scheme": r.scheme,
                 "subst": dict(r.subst), "refs": [k + 1 for k in r.refs]}
                for r in self.per_step
            ],
            "flags": list(self.flags),
        }


def _printable(sub: dict) -> tuple:
    return tuple(sorted((k, show(v) if not isinstance(v, int) else str(v)) for k, v in sub.items()))


class _StepFailure(Exception):
    pass


def _check_step(k: int, step: Step, formulas: list[Formula], system: System,
                cs: ConstantSpec, hyps: tuple[Formula, ...]) -> StepRecord:
    phi, j = step.formula, step.just

    def ref(i: int) -> Formula:
        if not isinstance(i, int) or not 0 <= i < k:
            raise _StepFailure(f"reference {i + 1 if isinstance(i, int) else i!r} does not point to an earlier step")
        return formulas[i]

    if isinstance(j, Axiom):
        if j.scheme not in schemes_for(system):
            raise _StepFailure(f"scheme {j.scheme} is not available in {system.value}")
        sub = match_scheme(phi, j.scheme)
        if sub is None:
            raise _StepFailure(f"not an instance of {j.scheme}")
        return StepRecord(k, "axiom", j.scheme, _printable(sub))
    if isinstance(j, CSMember):
        if not (isinstance(phi, Just) and isinstance(phi.t, Const)):
            raise _StepFailure("CS step must have the form c:psi")
        if not cs_member(phi.t.name, phi.phi, cs, system):
            raise _StepFailure(f"{show(phi)} is not in the constant specification")
        return StepRecord(k, "cs", None, (("c", phi.t.name), ("psi", show(phi.phi))))
    if isinstance(j, Hyp):
        if not isinstance(j.index, int) or not 0 <= j.index < len(hyps):
            raise _StepFailure(f"no hypothesis {j.index + 1 if isinstance(j.index, int) else j.index!r}")
        if hyps[j.index] != phi:
            raise _StepFailure(f"formula differs from hypothesis {j.index + 1}")
        return StepRecord(k, "hyp", None, (), (j.index,))
    if isinstance(j, MP):
        a, b = ref(j.i), ref(j.j)
        if b == imp(a, phi):
            return StepRecord(k, "mp", None, (), (j.i, j.j))
        if a == imp(b, phi):
            return StepRecord(k, "mp", None, (), (j.j, j.i))
        raise _StepFailure(f"steps {j.i + 1} and {j.j + 1} do not yield this formula by MP")
    if isinstance(j, AppRule):
        a, b = ref(j.i), ref(j.j)
        for (r, s), (ri, si) in (((b, a), (j.j, j.i)), ((a, b), (j.i, j.j))):
            if isinstance(r, Just) and isinstance(s, Just):
                parts = as_imp(r.phi)
                if parts is not None and parts[0] == s.phi and phi == Just(App(r.t, s.t), parts[1]):
                    return StepRecord(k, "app", None, (), (si, ri))
        raise _StepFailure(f"steps {j.i + 1} and {j.j + 1} do not yield this formula by application")
    if isinstance(j, JReg):
        if system is not System.HLP:
            raise _StepFailure("JReg is only available in hlp")
        parts = as_iff(ref(j.i))
        if parts is None:
            raise _StepFailure(f"step {j.i + 1} is not a biconditional")
        if phi != iff_of(Just(j.t, parts[0]), Just(j.t, parts[1])):
            raise _StepFailure("formula is not t:psi <-> t:chi for the premise")
        return StepRecord(k, "jreg", None, (("t", show(j.t)),), (j.i,))
    if isinstance(j, Int):
        if system is not System.LPB:
            raise _StepFailure("Int is only available in lpb")
        if hyps:
            raise _StepFailure("Int may only be used in proofs without hypotheses")
        if phi != Just(ONE, ref(j.i)):
            raise _StepFailure(f"formula is not 1:(step {j.i + 1})")
        return StepRecord(k, "int", None, (), (j.i,))
    raise _StepFailure(f"unknown justification {j!r}")


def iff_of(a: Formula, b: Formula) -> Formula:
    return conj(imp(a, b), imp(b, a))


def check_proof(proof: Proof, system: System | None = None, cs: ConstantSpec = EMPTY_CS,
                hypotheses: Iterable[Formula] | None = None) -> CheckReport:
    """Check every step; the report carries the first failure, if any."""
    system = proof.system if system is None else system
    hyps = proof.hyps if hypotheses is None else tuple(hypotheses)
    records: list[StepRecord] = []
    formulas = [s.formula for s in proof.steps]
    flags = []
    failure = None
    if not proof.steps:
        failure = (0, "empty proof")
    for h, phi in enumerate(hyps):
        if failure is None and not in_dialect(phi, system.dialect):
            failure = (0, f"hypothesis {h + 1} is outside the {system.value} language")
    for k, step in enumerate(proof.steps):
        if failure is not None:
            break
        if not in_dialect(step.formula, system.dialect):
            failure = (k, f"formula is outside the {system.value} language")
            break
        try:
            records.append(_check_step(k, step, formulas, system, cs, hyps))
        except _StepFailure as e:
            failure = (k, str(e))
    if any(r.rule == "jreg" for r in records) and (cs.entries or cs.total):
        flags.append("jreg used with a non-empty constant specification")
    return CheckReport(failure is None, failure, tuple(records), tuple(flags))


# ---------------------------------------------------------------- text formats

class FormatError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


_STEP = re.compile(r"^(\d+)\.\s*(.*?)\s*;\s*(.*)$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_just(text: str, dialect: Dialect, lineno: int) -> Justification:
    words = text.split()
    if not words:
        raise FormatError("missing justification", lineno)
    kind, args = words[0].lower(), words[1:]

    def nums(n: int) -> list[int]:
        if len(args) < n or not all(a.isdigit() for a in args[:n]):
            raise FormatError(f"'{kind}' needs {n} step number(s)", lineno)
        return [int(a) - 1 for a in args[:n]]

    if kind == "axiom" and len(args) == 1:
        if args[0] not in SCHEME_IDS:
            raise FormatError(f"unknown scheme {args[0]!r}", lineno)
        return Axiom(args[0])
    if kind == "cs" and not args:
        return CSMember()
    if kind == "hyp" and len(args) == 1:
        return Hyp(nums(1)[0])
    if kind == "mp" and len(args) == 2:
        return MP(*nums(2))
    if kind == "app" and len(args) == 2:
        return AppRule(*nums(2))
    if kind == "int" and len(args) == 1:
        return Int(nums(1)[0])
    if kind == "jreg" and len(args) >= 2:
        i = nums(1)[0]
        try:
            return JReg(i, parse_term(" ".join(args[1:]), dialect))
        except ParseError as e:
            raise FormatError(str(e), lineno) from None
    raise FormatError(f"bad justification {text!r}", lineno)


def parse_proof(text: str, system: System | None = None) -> Proof:
    sysname = None
    hyps: list[Formula] = []
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        low = line.lower()
        if low.startswith("system:"):
            name = line.split(":", 1)[1].strip().lower()
            try:
                sysname = System(name)
            except ValueError:
                raise FormatError(f"unknown system {name!r}", lineno) from None
            continue
        sysv = system or sysname or System.LP
        if low.startswith("hyp:"):
            if steps:
                raise FormatError("hypotheses must precede the steps", lineno)
            try:
                hyps.append(parse_formula(line[4:], sysv.dialect))
            except ParseError as e:
                raise FormatError(str(e), lineno) from None
            continue
        m = _STEP.match(line)
        if m is None:
            raise FormatError(f"cannot read {line!r}", lineno)
        if int(m.group(1)) != len(steps) + 1:
            raise FormatError(f"expected step {len(steps) + 1}, found {m.group(1)}", lineno)
        try:
            phi = parse_formula(m.group(2), sysv.dialect)
        except ParseError as e:
            raise FormatError(str(e), lineno) from None
        steps.append(Step(phi, _parse_just(m.group(3), sysv.dialect, lineno)))
    return Proof(tuple(steps), tuple(hyps), system or sysname or System.LP)


def show_just(j: Justification) -> str:
    if isinstance(j, Axiom):
        return f"axiom {j.scheme}"
    if isinstance(j, CSMember):
        return "cs"
    if isinstance(j, Hyp):
        return f"hyp {j.index + 1}"
    if isinstance(j, MP):
        return f"mp {j.i + 1} {j.j + 1}"
    if isinstance(j, AppRule):
        return f"app {j.i + 1} {j.j + 1}"
    if isinstance(j, JReg):
        return f"jreg {j.i + 1} {show(j.t)}"
    if isinstance(j, Int):
        return f"int {j.i + 1}"
    raise TypeError(j)


def format_proof(proof: Proof) -> str:
    lines = [f"system: {proof.system.value}"]
    lines += [f"hyp: {show(h)}" for h in proof.hyps]
    lines += [f"{k}. {show(s.formula)} ; {show_just(s.just)}" for k, s in enumerate(proof.steps, 1)]
    return "\n".join(lines) + "\n"


_CS_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(.+)$")


def parse_cs(text: str, system: System = System.LP, validate: bool = True) -> ConstantSpec:
    total = False
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if line.lower() == "total":
            total = True
            continue
        m = _CS_LINE.match(line)
        if m is None:
            raise FormatError(f"cannot read {line!r}", lineno)
        try:
            pairs.append((m.group(1), parse_formula(m.group(2), system.dialect)))
        except ParseError as e:
            raise FormatError(str(e), lineno) from None
    cs = ConstantSpec.of(pairs, total)
    if validate:
        try:
            cs.validate(system)
        except CSError as e:
            raise FormatError(str(e), 0) from None
    return cs


def format_cs(cs: ConstantSpec) -> str:
    lines = ["total"] if cs.total else []
    lines += [f"{c} : {show(phi)}" for c, phi in sorted(cs.entries, key=lambda e: (e[0], show(e[1])))]
    return "\n".join(lines) + "\n"
