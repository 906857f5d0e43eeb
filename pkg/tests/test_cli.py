import json

import pytest

from lpalg.cli import main
from lpalg.corpus import data_dir


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "x:p -> p")
    assert code == 0 and "x:p -> p" in out
    code, out, _ = run(capsys, "parse", "--term", "x + -x")
    assert code == 0


def test_parse_error(capsys):
    code, _, err = run(capsys, "parse", "x:(p ->")
    assert code == 2 and err.startswith("error:")


def test_usage_error(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "check")[0] == 2


def test_check(capsys):
    code, out, _ = run(capsys, "check", "pp_chain.proof", "--cs", "pp_chain.cs")
    assert code == 0


def test_check_missing_file(capsys):
    code, _, err = run(capsys, "check", "/nonexistent/file.proof")
    assert code == 2 and "error" in err


def test_check_rejects_bad_proof(capsys, tmp_path):
    f = tmp_path / "bad.proof"
    f.write_text("system: lp\n1. p -> q ; axiom PL1\n")
    assert run(capsys, "check", str(f))[0] == 1


def test_internalize(capsys):
    code, out, _ = run(capsys, "internalize", "pp_chain.proof", "--cs", "pp_chain.cs", "--json")
    assert code == 0
    data = json.loads(out)
    assert "(a*b)*c" in json.dumps(data)


def test_lift(capsys):
    code, out, _ = run(capsys, "lift", "lift_or.proof", "--cs", "lift_or.cs")
    assert code == 0 and "c*x:(p | q)" in out


def test_termeq(capsys):
    assert run(capsys, "termeq", "x + y", "y + x")[0] == 0
    assert run(capsys, "termeq", "x * y", "y * x")[0] == 1
    assert run(capsys, "termeq", "--brute", "-(x + y)", "-x + -y")[0] == 1


def test_eval_and_refute(capsys, tmp_path):
    assert run(capsys, "eval", "x:p -> p", "--system", "lp")[0] == 0
    assert run(capsys, "refute", "x:p -> p")[0] == 0
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("x :: p\n")
    code, out, _ = run(capsys, "refute", "x:p -> y:p", "--seed", str(seeds))
    assert code == 1 and "countermodel" in out
    assert run(capsys, "refute", "x = y", "--system", "lpb")[0] == 1


def test_algebra_subcommands(capsys):
    for name in ("minimal_binary.alg", "four.alg", "meet.alg", "random7.alg", "poly.alg"):
        assert run(capsys, "algebra", "verify", name)[0] == 0, name
        assert run(capsys, "algebra", "transport", name)[0] == 0, name
    assert run(capsys, "algebra", "bistone", "random7.alg")[0] == 0
    code, out, _ = run(capsys, "algebra", "stone", "four.alg")
    assert code == 0 and "kind:" in out
    assert run(capsys, "algebra", "random", "--count", "2")[0] == 0


def test_algebra_failure(capsys, tmp_path):
    """The join operators are regular but break the HLP reflection condition."""
    f = tmp_path / "join_hlp.alg"
    f.write_text((data_dir() / "algebras" / "join.alg").read_text().replace("kind: regular", "kind: hlp"))
    code, out, _ = run(capsys, "algebra", "verify", str(f))
    assert code == 1 and "violation" in out


def test_pralg(capsys):
    code, out, _ = run(capsys, "pralg", "--atoms", "p,q", "--proof", "lift_or.proof", "--cs", "lift_or.cs",
                       "--app", "p -> q", "p")
    assert code == 0
    assert "[c*x:(p | q)]" in out and "= [q]" in out


def test_json_is_deterministic(capsys):
    outs = [run(capsys, "algebra", "verify", "four.alg", "--json")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    json.loads(outs[0])


def test_budget_exceeded(capsys):
    assert run(capsys, "algebra", "verify", "random7.alg", "--budget", "1")[0] == 2


@pytest.mark.parametrize("name", ["pp_chain.proof", "minimal_binary.alg"])
def test_bundled_names_resolve(name):
    kind = "algebras" if name.endswith(".alg") else "corpus"
    assert (data_dir() / kind / name).is_file()
