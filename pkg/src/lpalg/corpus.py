"""The bundled corpus of derivations, non-theorems and finite algebras, and soundness sweeps."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources
from typing import Iterator

from .evidence import BinaryModel, close_formulas, eval_formula, parse_seeds, refute
from .lpbalg import (
    LPBAlgebra, TermStructure, minimal_lpb_algebra, two_terms, validity, verify_full_lpb,
)
from .proofs import ConstantSpec, EMPTY_CS, Proof, System, check_proof, parse_cs, parse_proof
from .report import Report
from .syntax import (
    Const, Formula, all_subterms, conj, imp, parse_formula, props, show, subformulas, subterms,
)


@dataclass(frozen=True)
class Entry:
    name: str
    proof: Proof
    cs: ConstantSpec

    @property
    def formula(self) -> Formula:
        """The conclusion, under the conjunction of the hypotheses if there are any."""
        concl = self.proof.conclusion
        if not self.proof.hyps:
            return concl
        h = self.proof.hyps[0]
        for g in self.proof.hyps[1:]:
            h = conj(h, g)
        return imp(h, concl)


@dataclass(frozen=True)
class NonTheorem:
    system: System
    cs_name: str | None
    cs: ConstantSpec
    formula: Formula
    seeds: tuple = ()  # (Term, Formula) evidence pairs for the binary model


def data_dir():
    return resources.files("lpalg") / "data"


def read_data(*parts: str) -> str:
    node = data_dir()
    for p in parts:
        node = node / p
    return node.read_text()


def load_cs(name: str, system: System = System.LP) -> ConstantSpec:
    return parse_cs(read_data("corpus", name), system)


def load_proof(name: str) -> Entry:
    proof = parse_proof(read_data("corpus", name + ".proof"))
    cs_node = data_dir() / "corpus" / (name + ".cs")
    cs = parse_cs(cs_node.read_text(), proof.system) if cs_node.is_file() else EMPTY_CS
    return Entry(name, proof, cs)


def corpus() -> list[Entry]:
    names = sorted(p.name[:-6] for p in (data_dir() / "corpus").iterdir() if p.name.endswith(".proof"))
    return [load_proof(n) for n in names]


def nontheorems() -> list[NonTheorem]:
    out = []
    for raw in read_data("corpus", "nontheorems.txt").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [x.strip() for x in line.split("|", 2)]
        sysname, csname, rest = parts
        seeds: tuple = ()
        if "||" in rest:  # optional evidence seeds after '||'
            rest, seed_text = (x.strip() for x in rest.split("||", 1))
            seeds = tuple(parse_seeds(seed_text.replace(";", "\n"), System(sysname).dialect))
        system = System(sysname)
        cs = EMPTY_CS if csname == "-" else load_cs(csname, system)
        out.append(NonTheorem(system, None if csname == "-" else csname, cs,
                              parse_formula(rest, system.dialect), seeds))
    return out


def algebra_files() -> Iterator[tuple[str, str]]:
    for p in sorted((data_dir() / "algebras").iterdir(), key=lambda p: p.name):
        if p.name.endswith(".alg"):
            yield p.name, p.read_text()


# ---------------------------------------------------------------- soundness

def lp_holds(phi: Formula, cs: ConstantSpec = EMPTY_CS, system: System = System.LP) -> bool:
    """phi is 1 in the minimal binary model under every valuation of its atoms."""
    atoms = sorted(props(phi))
    model = BinaryModel.make(cs, system=system)
    for bits in itertools.product((0, 1), repeat=len(atoms)):
        m = model.with_valuation(a for a, b in zip(atoms, bits) if b)
        if eval_formula(phi, m) != 1:
            return False
    return True


def lpb_model(phi: Formula, cs: ConstantSpec = EMPTY_CS, extra=()) -> LPBAlgebra:
    return minimal_lpb_algebra(list(subformulas(phi)) + list(extra), cs)


def lpb_holds(phi: Formula, cs: ConstantSpec = EMPTY_CS, extra=()) -> tuple[bool, Report]:
    """phi is true in the minimal binary LP^B algebra of its universe, which must itself be full."""
    alg = lpb_model(phi, cs, extra)
    rep = verify_full_lpb(alg, cs)
    return rep.ok and validity(alg, phi) is None, rep


def check_entry(e: Entry) -> tuple[bool, str]:
    rep = check_proof(e.proof, cs=e.cs)
    if not rep.ok:
        k, why = rep.first_failure
        return False, f"step {k + 1}: {why}"
    phi = e.formula
    if e.proof.system is System.LPB:
        ok, vrep = lpb_holds(phi, e.cs, [s.formula for s in e.proof.steps])
        return ok, "" if ok else str(vrep)
    ok = lp_holds(phi, e.cs, e.proof.system)
    return ok, "" if ok else f"{show(phi)} fails in the minimal model"


def refute_nontheorem(n: NonTheorem):
    """A countermodel description, or None when none is found."""
    if n.system is System.LPB:
        for ts in two_element_structures(n.formula, n.cs):
            alg = minimal_lpb_algebra(subformulas(n.formula), n.cs, ts)
            if verify_full_lpb(alg, n.cs).ok:
                hit = validity(alg, n.formula)
                if hit is not None:
                    return alg, hit
        return None
    return refute(n.formula, n.cs, n.seeds, system=n.system)


def two_element_structures(phi: Formula, cs: ConstantSpec = EMPTY_CS) -> Iterator[TermStructure]:
    """Every term structure on the two-element algebra interpreting the constants in sight."""
    names = sorted({u.name for t in all_subterms(phi) for u in subterms(t) if isinstance(u, Const)}
                   | {c for c, _ in cs.entries})
    for app in itertools.product((0, 1), repeat=4):
        for bang in itertools.product((0, 1), repeat=2):
            for vals in itertools.product((1, 0), repeat=len(names)):
                yield two_terms({(a, b): app[2 * a + b] for a in (0, 1) for b in (0, 1)},
                                {0: bang[0], 1: bang[1]}, dict(zip(names, vals)))


def universe_of(e: Entry) -> tuple[Formula, ...]:
    return close_formulas(s.formula for s in e.proof.steps)
