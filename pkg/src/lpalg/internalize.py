"""Turning checked derivations into proof terms (internalization and lifting)."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping

from .proofs import (
    AppRule, Axiom, CSMember, ConstantSpec, EMPTY_CS, Hyp, Int, JReg, MP, Proof,
    Step, System, check_proof,
)
from .syntax import ONE, App, Bang, Const, Formula, Just, Term, Var, VAR_NAME, imp, show


class InternalizeError(ValueError):
    pass


def minted_name(phi: Formula) -> str:
    """Stable constant name for an axiom instance."""
    return "k_" + hashlib.sha1(show(phi).encode()).hexdigest()[:10]


@dataclass
class ConstantOracle:
    """Chooses a proof constant for each axiom instance.

    Constants already paired with the instance in ``cs`` win (smallest name
    first); ``fixed`` overrides both. Otherwise a name is minted from a hash
    of the printed instance, unless ``strict`` forbids extending a finite CS.
    Every choice is recorded.
    """

    cs: ConstantSpec = EMPTY_CS
    strict: bool = False
    fixed: Mapping[Formula, str] = field(default_factory=dict)
    recorded: dict = field(default_factory=dict)

    def constant_for(self, phi: Formula) -> str:
        name = self.fixed.get(phi)
        if name is None:
            known = self.cs.constants_for(phi)
            if known:
                name = known[0]
            elif self.strict and not self.cs.total:
                raise InternalizeError(f"no constant for axiom instance {show(phi)} in the constant specification")
            else:
                name = minted_name(phi)
        self.recorded[phi] = name
        return name

    def pairs(self) -> list[tuple[str, Formula]]:
        return sorted(((c, phi) for phi, c in self.recorded.items()), key=lambda e: (e[0], show(e[1])))

    def extended_cs(self) -> ConstantSpec:
        return self.cs.union(self.pairs())


class _Compiler:
    def __init__(self, proof: Proof, system: System, refs: list[tuple[int, ...]],
                 oracle: ConstantOracle, binding: Mapping[int, str], compact: bool):
        self.src = proof
        self.system = system
        self.refs = refs
        self.oracle = oracle
        self.binding = binding
        self.compact = compact
        self.out: list[Step] = []
        self.done: dict[int, tuple[Term, int]] = {}  # source step -> (term, output index of t:phi)
        self.copied: dict[int, int] = {}  # source step -> output index of the copied step

    def emit(self, phi: Formula, just) -> int:
        self.out.append(Step(phi, just))
        return len(self.out) - 1

    def apply(self, r: Term, ri: int, s: Term, si: int, premise: Formula, concl: Formula) -> int:
        # from r:(premise -> concl) at ri and s:premise at si derive (r*s):concl
        if self.compact:
            return self.emit(Just(App(r, s), concl), AppRule(si, ri))
        inner = imp(Just(s, premise), Just(App(r, s), concl))
        ax = self.emit(imp(Just(r, imp(premise, concl)), inner), Axiom("Appl"))
        mid = self.emit(inner, MP(ri, ax))
        return self.emit(Just(App(r, s), concl), MP(si, mid))

    def copy(self, k: int) -> int:
        # replay a source step verbatim (needed under Int)
        if k in self.copied:
            return self.copied[k]
        step = self.src.steps[k]
        j = step.just
        if isinstance(j, (MP, AppRule)):
            j = type(j)(self.copy(j.i), self.copy(j.j))
        elif isinstance(j, Int):
            j = Int(self.copy(j.i))
        elif isinstance(j, JReg):
            j = JReg(self.copy(j.i), j.t)
        self.copied[k] = self.emit(step.formula, j)
        return self.copied[k]

    def compile(self, k: int) -> tuple[Term, int]:
        if k in self.done:
            return self.done[k]
        step = self.src.steps[k]
        phi, j = step.formula, step.just
        if isinstance(j, Axiom):
            c = Const(self.oracle.constant_for(phi))
            res = c, self.emit(Just(c, phi), CSMember())
        elif isinstance(j, CSMember):
            c = phi.t
            i = self.emit(phi, CSMember())
            bang = Just(Bang(c), phi)
            ax = self.emit(imp(phi, bang), Axiom("j4"))
            res = Bang(c), self.emit(bang, MP(i, ax))
        elif isinstance(j, Hyp):
            if j.index not in self.binding:
                raise InternalizeError(f"hypothesis {j.index + 1} has no variable binding")
            x = Var(self.binding[j.index])
            res = x, self.emit(Just(x, phi), Hyp(j.index))
        elif isinstance(j, MP):
            pi, ii = self.refs[k]
            r, ri = self.compile(ii)
            s, si = self.compile(pi)
            res = App(r, s), self.apply(r, ri, s, si, self.src.steps[pi].formula, phi)
        elif isinstance(j, AppRule):
            # (r*s):b from r:(a -> b) and s:a is itself an Appl instance plus two MP
            si_src, ri_src = self.refs[k]
            s_step, r_step = self.src.steps[si_src].formula, self.src.steps[ri_src].formula
            inner = imp(s_step, phi)
            appl = imp(r_step, inner)
            c = Const(self.oracle.constant_for(appl))
            ci = self.emit(Just(c, appl), CSMember())
            r, ri = self.compile(ri_src)
            s, si = self.compile(si_src)
            t1 = App(c, r)
            i1 = self.apply(c, ci, r, ri, r_step, inner)
            res = App(t1, s), self.apply(t1, i1, s, si, s_step, phi)
        elif isinstance(j, Int):
            base = self.copy(j.i)
            i = self.emit(phi, Int(base))
            bang = Just(Bang(ONE), phi)
            ax = self.emit(imp(phi, bang), Axiom("j4"))
            res = Bang(ONE), self.emit(bang, MP(i, ax))
        elif isinstance(j, JReg):
            raise InternalizeError(f"step {k + 1}: JReg steps cannot be internalized")
        else:
            raise InternalizeError(f"step {k + 1}: unknown justification")
        self.done[k] = res
        return res


def lift(proof: Proof, system: System | None = None, cs: ConstantSpec | None = None,
         binding: Mapping[int, str] | None = None, oracle: ConstantOracle | None = None,
         compact: bool = True) -> tuple[Term, Proof]:
    """Term t(x) and a derivation of t(x):phi from x_i:psi_i.

    With ``compact`` the MP cases use the derived ``app`` rule, one step each;
    otherwise each is spelled out as an Appl instance and two MP steps.
    """
    system = proof.system if system is None else system
    oracle = ConstantOracle(cs or EMPTY_CS) if oracle is None else oracle
    cs = oracle.cs if cs is None else cs
    binding = dict(binding or {})
    if set(binding) != set(range(len(proof.hyps))):
        raise InternalizeError("the binding must cover exactly the hypotheses")
    names = list(binding.values())
    if len(set(names)) != len(names) or not all(VAR_NAME.match(n) for n in names):
        raise InternalizeError("binding names must be distinct proof variables")
    report = check_proof(proof, system, cs, proof.hyps)
    if not report.ok:
        k, why = report.first_failure
        raise InternalizeError(f"input proof does not check: step {k + 1}: {why}")
    refs = [r.refs for r in report.per_step]
    comp = _Compiler(proof, system, refs, oracle, binding, compact)
    term, _ = comp.compile(len(proof.steps) - 1)
    hyps = tuple(Just(Var(binding[i]), h) for i, h in enumerate(proof.hyps))
    return term, Proof(tuple(comp.out), hyps, system)


def internalize(proof: Proof, system: System | None = None, cs: ConstantSpec | None = None,
                oracle: ConstantOracle | None = None, compact: bool = True) -> tuple[Term, Proof]:
    if proof.hyps:
        raise InternalizeError("internalize needs a proof without hypotheses; use lift")
    return lift(proof, system, cs, {}, oracle, compact)


def universal_internalize(phi: Formula, witness: Proof, cs: ConstantSpec = EMPTY_CS) -> Proof:
    """Append an Int step to a hypothesis-free LP^B proof of phi."""
    if witness.hyps:
        raise InternalizeError("the witness must not use hypotheses")
    if not witness.steps or witness.conclusion != phi:
        raise InternalizeError("the witness does not conclude the formula")
    report = check_proof(witness, System.LPB, cs, ())
    if not report.ok:
        k, why = report.first_failure
        raise InternalizeError(f"invalid witness: step {k + 1}: {why}")
    return Proof(witness.steps + (Step(Just(ONE, phi), Int(len(witness.steps) - 1)),), (), System.LPB)
