"""Command-line driver: ``lpalg <command> ...``.

Exit status 0 means ok, valid or equal; 1 means refuted, unequal or a
violation was found; 2 means a usage or input error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import algfile, corpus
from .evidence import (
    BinaryModel, JTViolation, check_jt, parse_seeds, parse_window, refute, verify_binary_algebra,
)
from .finitealg import stone, transport, transport_conditions, transport_ops, verify_full_lp, verify_hlp
from .internalize import ConstantOracle, internalize, lift
from .lpbalg import (
    bi_stone, bi_stone_poly, bistone_conditions, bistone_poly_conditions, minimal_lpb_algebra,
    random_full_lpb, validity, verify_full_lpb, verify_poly_lpb,
)
from .pralg import build_pr_algebra, element, law_report, propositional_formulas
from .proofs import ConstantSpec, EMPTY_CS, System, check_proof, format_proof, parse_cs, parse_proof
from .report import DEFAULT_BUDGET, BudgetError, Report
from .syntax import ParseError, Term, closure_universe, parse_formula, parse_term, props, show, subformulas, uses_lpb
from .termbool import ResourceError, brute_force_equal, canonicalize, term_equal

OK, FAIL, ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- helpers

def _read(path: str) -> str:
    """Read a file, falling back to the bundled corpus for bare names."""
    p = Path(path)
    if p.is_file():
        return p.read_text()
    for sub in ("corpus", "algebras"):
        node = corpus.data_dir() / sub / path
        if node.is_file():
            return node.read_text()
    raise UsageError(f"no such file: {path}")


def _system(args, default: System = System.LP) -> System:
    return System(args.system) if getattr(args, "system", None) else default


def _cs(args, system: System) -> ConstantSpec:
    cs = parse_cs(_read(args.cs), system) if getattr(args, "cs", None) else EMPTY_CS
    if getattr(args, "total", False):
        cs = ConstantSpec(cs.entries, True)
    return cs


def _window(args, system: System):
    if not getattr(args, "window", None):
        return None
    return parse_window(_read(args.window), system.dialect)


def _seeds(args, system: System) -> list:
    return parse_seeds(_read(args.seed), system.dialect) if getattr(args, "seed", None) else []


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        print(text)


def _status(ok: bool) -> int:
    return OK if ok else FAIL


# ---------------------------------------------------------------- commands

def cmd_parse(args) -> int:
    system = _system(args, System.LPB)
    node = parse_term(args.text, system.dialect) if args.term else parse_formula(args.text, system.dialect)
    out = show(node)
    _emit(args, {"input": args.text, "printed": out, "kind": "term" if args.term else "formula"}, out)
    return OK


def cmd_check(args) -> int:
    proof = parse_proof(_read(args.file), System(args.system) if args.system else None)
    cs = _cs(args, proof.system)
    rep = check_proof(proof, cs=cs)
    lines = []
    for r in rep.per_step:
        what = r.rule + (f" {r.scheme}" if r.scheme else "")
        refs = " ".join(str(k + 1) for k in r.refs)
        lines.append(f"{r.index + 1}. {show(proof.steps[r.index].formula)} ; {what}" + (f" [{refs}]" if refs else ""))
    if rep.ok:
        lines.append(f"ok: {len(proof.steps)} step(s), conclusion {show(proof.conclusion)}")
    else:
        k, why = rep.first_failure
        lines.append(f"FAIL at step {k + 1}: {why}")
    lines += [f"note: {f}" for f in rep.flags]
    _emit(args, rep.to_json(), "\n".join(lines))
    return _status(rep.ok)


def _lift_output(args, term: Term, out, oracle: ConstantOracle, system: System) -> int:
    cs = oracle.extended_cs()
    recheck = check_proof(out, system, cs)
    minted = [(c, phi) for c, phi in oracle.pairs() if c not in {e[0] for e in oracle.cs.entries}]
    data = {
        "term": show(term),
        "conclusion": show(out.conclusion),
        "proof": format_proof(out),
        "minted": [f"{c} : {show(phi)}" for c, phi in minted],
        "recheck": recheck.ok,
    }
    text = f"term: {show(term)}\n{format_proof(out).rstrip()}"
    if minted:
        text += "\n# constants added to the specification\n" + "\n".join(data["minted"])
    text += f"\n# re-check: {'ok' if recheck.ok else 'FAIL'}"
    _emit(args, data, text)
    return _status(recheck.ok)


def cmd_internalize(args) -> int:
    proof = parse_proof(_read(args.file))
    cs = _cs(args, proof.system)
    oracle = ConstantOracle(cs, strict=args.strict)
    term, out = internalize(proof, proof.system, cs, oracle, compact=not args.expand)
    return _lift_output(args, term, out, oracle, proof.system)


def cmd_lift(args) -> int:
    proof = parse_proof(_read(args.file))
    cs = _cs(args, proof.system)
    n = len(proof.hyps)
    if args.names:
        names = [x.strip() for x in args.names.split(",")]
    else:
        names = ["x"] if n == 1 else [f"x{i + 1}" for i in range(n)]
    if len(names) != n:
        raise UsageError(f"the proof has {n} hypothesis(es) but {len(names)} name(s) were given")
    oracle = ConstantOracle(cs, strict=args.strict)
    term, out = lift(proof, proof.system, cs, dict(enumerate(names)), oracle, compact=not args.expand)
    return _lift_output(args, term, out, oracle, proof.system)


def cmd_termeq(args) -> int:
    s, t = parse_term(args.s), parse_term(args.t)
    eq = term_equal(s, t)
    data = {"s": show(s), "t": show(t), "equal": eq,
            "canonical": [repr(canonicalize(s).key), repr(canonicalize(t).key)]}
    if args.brute:
        data["brute_force"] = brute_force_equal(s, t)
    text = ("equal" if eq else "not equal") + (f" (brute force: {data['brute_force']})" if args.brute else "")
    _emit(args, data, text)
    return _status(eq)


def _valuations(atoms: list[str], fixed: str | None):
    if fixed is not None:
        true = {x.strip() for x in fixed.split(",") if x.strip()}
        yield true
        return
    for bits in range(1 << len(atoms)):
        yield {a for i, a in enumerate(atoms) if bits >> (len(atoms) - 1 - i) & 1}


def cmd_eval(args) -> int:
    system = _system(args)
    phi = parse_formula(args.formula, system.dialect)
    if uses_lpb(phi):
        raise UsageError("eval works on LP formulas; use refute --system lpb for LP^B")
    cs = _cs(args, system)
    base = BinaryModel.make(cs, _seeds(args, system), (), _window(args, system), system)
    atoms = sorted(props(phi))
    rows, lines = [], []
    for true in _valuations(atoms, args.true):
        m = base.with_valuation(true)
        val = {a: int(a in true) for a in atoms}
        try:
            check_jt(phi, m)
        except JTViolation as e:
            rows.append({"valuation": val, "value": None, "error": str(e)})
            lines.append(f"{_show_val(val)}: jT violated ({e})")
            continue
        v = m.value(phi)
        rows.append({"valuation": val, "value": v})
        lines.append(f"{_show_val(val)}: {v}")
    rep = verify_binary_algebra(base, closure_universe([phi], args.depth))
    data = {"formula": show(phi), "rows": rows, "binary_algebra": rep.to_json()}
    lines.append(f"binary algebra on the depth-{args.depth} universe: {rep}")
    _emit(args, data, "\n".join(lines))
    return _status(all(r["value"] == 1 for r in rows))


def _show_val(val: dict) -> str:
    return "{" + ", ".join(f"{a}={v}" for a, v in val.items()) + "}"


def cmd_refute(args) -> int:
    system = _system(args)
    phi = parse_formula(args.formula, system.dialect)
    cs = _cs(args, system)
    if system is System.LPB:
        return _refute_lpb(args, phi, cs)
    model = refute(phi, cs, _seeds(args, system), _window(args, system), system)
    if model is None:
        _emit(args, {"formula": show(phi), "refuted": False},
              "no countermodel in the seeded minimal model (this does not prove theoremhood)")
        return OK
    desc = model.describe()
    atoms = sorted(props(phi))
    desc["valuation"] = {a: int(a in model.valuation) for a in atoms}
    desc["evidence"] = {show(f): model.box(f.t, f.phi) for f in subformulas(phi) if hasattr(f, "t")}
    text = [f"countermodel for {show(phi)}", f"valuation {_show_val(desc['valuation'])}"]
    text += [f"E({k}) = {v}" for k, v in sorted(desc["evidence"].items())]
    text += [f"seed {s}" for s in desc["seeds"]]
    _emit(args, {"formula": show(phi), "refuted": True, "model": desc}, "\n".join(text))
    return FAIL


def _refute_lpb(args, phi, cs) -> int:
    for ts in corpus.two_element_structures(phi, cs):
        alg = minimal_lpb_algebra(subformulas(phi), cs, ts)
        if not verify_full_lpb(alg, cs, budget=args.budget).ok:
            continue
        hit = validity(alg, phi, args.budget)
        if hit is None:
            continue
        theta, v = hit
        T = ts.ba
        desc = {
            "theta": {p: alg.A.show(a) for p, a in sorted(theta.items())},
            "v": {x: T.show(a) for x, a in sorted(v.items())},
            "app": {f"{a} {b}": ts.dot(a, b) for a in T.elements for b in T.elements},
            "bang": {str(a): ts.bang_of(a) for a in T.elements},
            "interp": dict(sorted(ts.interp.items())),
        }
        text = [f"countermodel for {show(phi)} over the two-element algebras",
                f"theta {desc['theta']}", f"v {desc['v']}", f"app {desc['app']}", f"bang {desc['bang']}",
                f"interp {desc['interp']}"]
        _emit(args, {"formula": show(phi), "refuted": True, "model": desc}, "\n".join(text))
        return FAIL
    _emit(args, {"formula": show(phi), "refuted": False},
          "no countermodel among the two-element term structures (this does not prove theoremhood)")
    return OK


# ---------------------------------------------------------------- algebra subcommands

def _load_alg(args):
    af = algfile.parse_algebra_file(_read(args.file))
    cs = algfile.read_cs(af)
    if getattr(args, "cs", None):
        cs = cs.union(_cs(args, System.LPB if af.lpb else System.LP).entries)
    return af, cs


def _verify(af, cs, budget) -> Report:
    if af.kind in ("full-lp", "binary"):
        A, box = algfile.read_box_table(af)
        return verify_full_lp(A, box, cs, budget)
    if af.kind in ("hlp", "regular"):
        A, ops = algfile.read_hlp_ops(af)
        return verify_hlp(A, ops, af.kind == "regular")
    theorems = algfile.read_theorems(af)
    if af.kind == "full-lpb":
        return verify_full_lpb(algfile.read_lpb_algebra(af), cs, theorems, budget)
    return verify_poly_lpb(algfile.read_poly_algebra(af), cs, theorems, budget)


def _report_out(args, rep: Report, extra: dict | None = None, text: str = "") -> int:
    data = rep.to_json()
    data.update(extra or {})
    _emit(args, data, (text + "\n" if text else "") + str(rep))
    return _status(rep.ok)


def cmd_algebra_verify(args) -> int:
    af, cs = _load_alg(args)
    return _report_out(args, _verify(af, cs, args.budget), {"kind": af.kind})


def _stone_image(af, cs, budget):
    """(image file text, report of the image and the iso conditions)."""
    rep = Report()
    if af.kind in ("full-lp", "binary"):
        A, box = algfile.read_box_table(af)
        B, w = stone(A)
        img = transport(A, box, w)
        rep.merge(w.verify()).merge(transport_conditions(box, img, w)).merge(verify_full_lp(B, img, cs, budget))
        return algfile.format_box_table(B, img, af.kind, cs), rep.finish()
    if af.kind in ("hlp", "regular"):
        A, ops = algfile.read_hlp_ops(af)
        B, w = stone(A)
        img = transport_ops(ops, w)
        rep.merge(w.verify()).merge(verify_hlp(B, img, af.kind == "regular"))
        return algfile.format_hlp_ops(B, img, af.kind), rep.finish()
    theorems = algfile.read_theorems(af)
    if af.kind == "full-lpb":
        alg = algfile.read_lpb_algebra(af)
        img, f, g = bi_stone(alg)
        rep.merge(bistone_conditions(alg, img, f, g)).merge(verify_full_lpb(img, cs, theorems, budget))
        return algfile.format_lpb_algebra(img, cs, theorems), rep.finish()
    alg = algfile.read_poly_algebra(af)
    img, f, g = bi_stone_poly(alg)
    rep.merge(bistone_poly_conditions(alg, img, f, g)).merge(verify_poly_lpb(img, cs, theorems, budget))
    return algfile.format_poly_algebra(img, cs, theorems), rep.finish()


def cmd_algebra_stone(args) -> int:
    """Print the set-algebra image as an algebra file."""
    af, cs = _load_alg(args)
    if af.lpb:
        raise UsageError("use 'algebra bistone' for LP^B algebras")
    text, rep = _stone_image(af, cs, args.budget)
    if args.json:
        return _report_out(args, rep, {"image": text})
    sys.stdout.write(text)
    return _status(rep.ok)


def cmd_algebra_bistone(args) -> int:
    af, cs = _load_alg(args)
    if not af.lpb:
        raise UsageError("use 'algebra stone' for LP algebras")
    text, rep = _stone_image(af, cs, args.budget)
    if args.json:
        return _report_out(args, rep, {"image": text})
    sys.stdout.write(text)
    return _status(rep.ok)


def cmd_algebra_transport(args) -> int:
    """Verify the source, its representation and the isomorphism conditions."""
    af, cs = _load_alg(args)
    src = _verify(af, cs, args.budget)
    _, img = _stone_image(af, cs, args.budget)
    rep = Report().merge(src).merge(img).finish()
    return _report_out(args, rep, {"kind": af.kind, "source_ok": src.ok, "image_ok": img.ok})


def cmd_algebra_random(args) -> int:
    """Randomized full LP^B algebras checked through bi_stone."""
    rng = random.Random(args.seed_rng)
    rep = Report()
    rows = []
    for i in range(args.count):
        alg = random_full_lpb(rng, budget=args.budget)
        img, f, g = bi_stone(alg)
        r = Report().merge(bistone_conditions(alg, img, f, g)).merge(verify_full_lpb(img, budget=args.budget))
        rows.append({"index": i, "A": alg.A.size(), "T": alg.ts.ba.size(), "formulas": len(alg.formulas),
                     "ok": r.ok})
        rep.merge(r)
    rep.finish()
    text = "\n".join(f"#{r['index']}: |A|={r['A']} |T|={r['T']} formulas={r['formulas']} "
                     f"{'ok' if r['ok'] else 'FAIL'}" for r in rows)
    return _report_out(args, rep, {"algebras": rows}, text)


# ---------------------------------------------------------------- proof algebra

def cmd_pralg(args) -> int:
    atoms = [a.strip() for a in args.atoms.split(",") if a.strip()]
    system = _system(args)
    cs = _cs(args, system)
    entries = [(phi, None) for phi in propositional_formulas(atoms, args.depth)]
    proofs = [parse_proof(_read(p)) for p in args.proof or []]
    entries += [(p.conclusion, p) for p in proofs]
    alg = build_pr_algebra(entries, cs, system)
    rep = law_report(alg)
    data = {"classes": alg.size(), "report": rep.to_json(), "bang": [], "app": []}
    lines = [f"{alg.size()} classes", str(rep)]
    for p in proofs:
        b = alg.bang(element(p.conclusion, p))
        data["bang"].append({"conclusion": show(p.conclusion), "result": show(b.rep)})
        lines.append(f"!_Pr [{show(p.conclusion)}] = [{show(b.rep)}]")
    for pair in args.app or []:
        a, b = (parse_formula(x, system.dialect) for x in pair)
        r = alg.app(element(a), element(b))
        data["app"].append({"left": show(a), "right": show(b), "result": show(r.rep)})
        lines.append(f"[{show(a)}] ._Pr [{show(b)}] = [{show(r.rep)}]")
    _emit(args, data, "\n".join(lines))
    return _status(rep.ok)


# ---------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpalg", description="Justification logic and its algebraic semantics.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cs=True):
        sp.add_argument("--json", action="store_true", help="structured output")
        sp.add_argument("--system", choices=[s.value for s in System])
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap for exhaustive sweeps")
        if cs:
            sp.add_argument("--cs", help="constant specification file")
            sp.add_argument("--total", action="store_true", help="use the total constant specification")

    sp = sub.add_parser("parse", help="parse and pretty-print a formula or term")
    sp.add_argument("text")
    sp.add_argument("--term", action="store_true")
    common(sp, cs=False)
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("check", help="check a proof file")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(fn=cmd_check)

    for name, fn in (("internalize", cmd_internalize), ("lift", cmd_lift)):
        sp = sub.add_parser(name, help=f"{name} a proof file into a proof term")
        sp.add_argument("file")
        sp.add_argument("--strict", action="store_true", help="never mint constants outside the CS")
        sp.add_argument("--expand", action="store_true", help="spell out application steps")
        if name == "lift":
            sp.add_argument("--names", help="comma-separated proof variables for the hypotheses")
        common(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("termeq", help="decide equality of two LP^B terms")
    sp.add_argument("s")
    sp.add_argument("t")
    sp.add_argument("--brute", action="store_true", help="also run the brute-force oracle")
    common(sp, cs=False)
    sp.set_defaults(fn=cmd_termeq)

    for name, fn in (("eval", cmd_eval), ("refute", cmd_refute)):
        sp = sub.add_parser(name, help=f"{name} a formula in the minimal evidence model")
        sp.add_argument("formula")
        sp.add_argument("--seed", help="file of '<term> :: <formula>' evidence pairs")
        sp.add_argument("--window", help="file of formulas bounding a total CS")
        if name == "eval":
            sp.add_argument("--true", help="comma-separated true atoms (default: all valuations)")
            sp.add_argument("--depth", type=int, default=0, help="universe depth for the algebra check")
        common(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("algebra", help="finite algebra files")
    asub = sp.add_subparsers(dest="action", required=True)
    for name, fn in (("verify", cmd_algebra_verify), ("stone", cmd_algebra_stone),
                     ("bistone", cmd_algebra_bistone), ("transport", cmd_algebra_transport)):
        ap = asub.add_parser(name)
        ap.add_argument("file")
        common(ap)
        ap.set_defaults(fn=fn)
    ap = asub.add_parser("random", help="random full LP^B algebras through bi_stone")
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed-rng", type=int, default=0)
    common(ap, cs=False)
    ap.set_defaults(fn=cmd_algebra_random)

    sp = sub.add_parser("pralg", help="the proof algebra over propositional formulas")
    sp.add_argument("--atoms", default="p,q")
    sp.add_argument("--depth", type=int, default=1, help="formula nesting depth before closure")
    sp.add_argument("--proof", action="append", help="proof file whose class gets a bang (repeatable)")
    sp.add_argument("--app", nargs=2, action="append", metavar=("LEFT", "RIGHT"), help="apply two classes")
    common(sp)
    sp.set_defaults(fn=cmd_pralg)
    return p


# ParseError and the module errors are ValueErrors
INPUT_ERRORS = (UsageError, ParseError, ValueError, BudgetError, ResourceError, OSError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ERROR if e.code else OK
    try:
        return args.fn(args)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
