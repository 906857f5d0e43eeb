"""Deciding equality of LP^B proof terms.

Terms modulo the Boolean-algebra identities for ``+``, ``-`` and ``0``, with
application and bang treated as uninterpreted (but congruent) operators. A
term canonicalizes to a decision diagram whose atoms are variables,
constants, and application/bang nodes over already-canonical arguments.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import bdd
from .syntax import App, Bang, Const, Neg, Sum, Term, Var, Zero

BRUTE_FORCE_CAP = 20


class ResourceError(RuntimeError):
    """Raised when an exhaustive procedure would exceed its configured cap."""


@dataclass(frozen=True)
class CanonicalTerm:
    """A Boolean function over structurally ordered term atoms."""

    node: int

    @property
    def key(self) -> tuple:
        return bdd.key(self.node)

    def atoms(self) -> list[tuple]:
        return bdd.support(self.node)

    @property
    def is_zero(self) -> bool:
        return self.node == bdd.FALSE

    @property
    def is_one(self) -> bool:
        return self.node == bdd.TRUE


@lru_cache(maxsize=None)
def _canon(t: Term) -> int:
    if isinstance(t, Zero):
        return bdd.FALSE
    if isinstance(t, Var):
        return bdd.atom((0, t.name))
    if isinstance(t, Const):
        return bdd.atom((1, t.name))
    if isinstance(t, Neg):
        return bdd.neg(_canon(t.t))
    if isinstance(t, Sum):
        return bdd.disj(_canon(t.s), _canon(t.t))
    if isinstance(t, App):
        return bdd.atom((2, bdd.key(_canon(t.s)), bdd.key(_canon(t.t))))
    if isinstance(t, Bang):
        return bdd.atom((3, bdd.key(_canon(t.t))))
    raise TypeError(f"not a term: {t!r}")


def canonicalize(t: Term) -> CanonicalTerm:
    return CanonicalTerm(_canon(t))


def term_equal(s: Term, t: Term) -> bool:
    return _canon(s) == _canon(t)


def term_leq(s: Term, t: Term) -> bool:
    return term_equal(Sum(s, t), t)


# ---------------------------------------------------------------- oracle

def _skeleton_atoms(t: Term, out: list[Term]) -> None:
    if isinstance(t, Zero):
        return
    if isinstance(t, Neg):
        _skeleton_atoms(t.t, out)
    elif isinstance(t, Sum):
        _skeleton_atoms(t.s, out)
        _skeleton_atoms(t.t, out)
    else:
        out.append(t)


@lru_cache(maxsize=None)
def _same_atom(a: Term, b: Term) -> bool:
    if isinstance(a, (Var, Const)) or isinstance(b, (Var, Const)):
        return a == b
    if isinstance(a, App) and isinstance(b, App):
        return brute_force_equal(a.s, b.s) and brute_force_equal(a.t, b.t)
    if isinstance(a, Bang) and isinstance(b, Bang):
        return brute_force_equal(a.t, b.t)
    return False


def _table(t: Term, index: dict[Term, int], reps: list[Term], k: int) -> int:
    # truth table of the Boolean skeleton as a 2^k-bit integer
    full = (1 << (1 << k)) - 1
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Neg):
        return full ^ _table(t.t, index, reps, k)
    if isinstance(t, Sum):
        return _table(t.s, index, reps, k) | _table(t.t, index, reps, k)
    return _atom_mask(index[t], k)


@lru_cache(maxsize=None)
def _atom_mask(i: int, k: int) -> int:
    # rows (assignments) whose bit i is set
    width = 1 << (i + 1)
    m = ((1 << (1 << i)) - 1) << (1 << i)
    while width < 1 << k:
        m |= m << width
        width *= 2
    return m


def brute_force_equal(s: Term, t: Term, cap: int = BRUTE_FORCE_CAP) -> bool:
    """Compare two terms by evaluating over all 0/1 assignments to their atoms.

    Atoms are the maximal non-Boolean subterms; two atoms are identified when
    they have the same head and pairwise oracle-equal arguments.
    """
    found: list[Term] = []
    _skeleton_atoms(s, found)
    _skeleton_atoms(t, found)
    reps: list[Term] = []
    index: dict[Term, int] = {}
    for a in found:
        if a in index:
            continue
        for i, r in enumerate(reps):
            if _same_atom(a, r):
                index[a] = i
                break
        else:
            index[a] = len(reps)
            reps.append(a)
    k = len(reps)
    if k > cap:
        raise ResourceError(f"{k} distinct atoms exceeds the cap of {cap}")
    return _table(s, index, reps, k) == _table(t, index, reps, k)
