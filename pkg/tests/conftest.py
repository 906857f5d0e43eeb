import random
import sys

from hypothesis import strategies as st

from lpalg.syntax import (
    BOT, ZERO, App, Bang, Const, Dialect, Eq, Just, Neg, Not, Or, Prop, Sum, Var, term_size,
)

LP_LEAVES = [Var("x"), Var("y"), Const("a"), Const("b")]
LPB_LEAVES = LP_LEAVES + [ZERO]


def terms(dialect: Dialect = Dialect.LPB, max_leaves: int = 6):
    leaves = st.sampled_from(LPB_LEAVES if dialect is Dialect.LPB else LP_LEAVES)

    def extend(children):
        ops = [st.builds(Sum, children, children), st.builds(App, children, children), st.builds(Bang, children)]
        if dialect is Dialect.LPB:
            ops.append(st.builds(Neg, children))
        return st.one_of(*ops)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def formulas(dialect: Dialect = Dialect.LPB, max_leaves: int = 6):
    t = terms(dialect, 3)
    leaves = st.one_of(st.sampled_from([Prop("p"), Prop("q"), BOT]),
                       *( [st.builds(Eq, t, t)] if dialect is Dialect.LPB else []))

    def extend(children):
        return st.one_of(st.builds(Not, children), st.builds(Or, children, children),
                         st.builds(Just, t, children))

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def random_term(rng: random.Random, size: int, leaves=LPB_LEAVES, ops="+-*!"):
    """A random term with at most ``size`` nodes."""
    if size <= 1:
        return rng.choice(leaves)
    op = rng.choice(ops)
    if op in "-!" or size == 2:
        op = op if op in "-!" else rng.choice([o for o in ops if o in "-!"] or ["!"])
        sub = random_term(rng, size - 1, leaves, ops)
        return Neg(sub) if op == "-" else Bang(sub)
    k = rng.randint(1, size - 2)
    s, t = random_term(rng, k, leaves, ops), random_term(rng, size - 1 - k, leaves, ops)
    return Sum(s, t) if op == "+" else App(s, t)


def enumerate_terms(max_size: int, leaves=LPB_LEAVES):
    """Every term with at most ``max_size`` nodes, bucketed by size."""
    by_size = {1: list(leaves)}
    for n in range(2, max_size + 1):
        out = [Neg(t) for t in by_size[n - 1]] + [Bang(t) for t in by_size[n - 1]]
        for k in range(1, n - 1):
            for s in by_size[k]:
                for t in by_size[n - 1 - k]:
                    out += [Sum(s, t), App(s, t)]
        by_size[n] = out
    assert all(term_size(t) == n for n, ts in by_size.items() for t in ts)
    return by_size


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, when that module ran."""
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
