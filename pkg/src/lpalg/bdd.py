"""Reduced ordered decision diagrams over structurally ordered atoms.

Nodes are hash-consed integers (0 = false, 1 = true), so two functions are
equal iff their ids are equal. Atoms are identified by comparable key tuples;
the variable order is the natural order of those keys, which keeps canonical
forms independent of construction order and stable across runs.
"""
from __future__ import annotations

import threading
from typing import Hashable, Iterable, Mapping

FALSE = 0
TRUE = 1

_lock = threading.RLock()
# node id -> (atom key, high child, low child); ids 0/1 are the leaves
_nodes: list[tuple | None] = [None, None]
_unique: dict[tuple, int] = {}
_neg_memo: dict[int, int] = {}
_or_memo: dict[tuple[int, int], int] = {}
_key_memo: dict[int, tuple] = {0: (0,), 1: (1,)}


def _mk(atom: tuple, hi: int, lo: int) -> int:
    if hi == lo:
        return hi
    k = (atom, hi, lo)
    with _lock:
        node = _unique.get(k)
        if node is None:
            node = len(_nodes)
            _nodes.append(k)
            _unique[k] = node
    return node


def atom(key: tuple) -> int:
    """The function that is true exactly when atom ``key`` is true."""
    return _mk(key, TRUE, FALSE)


def top(f: int) -> tuple | None:
    n = _nodes[f]
    return None if n is None else n[0]


def _cofactors(f: int, a: tuple) -> tuple[int, int]:
    n = _nodes[f]
    if n is not None and n[0] == a:
        return n[1], n[2]
    return f, f


def neg(f: int) -> int:
    if f <= 1:
        return 1 - f
    r = _neg_memo.get(f)
    if r is None:
        a, hi, lo = _nodes[f]
        r = _mk(a, neg(hi), neg(lo))
        _neg_memo[f] = r
    return r


def disj(f: int, g: int) -> int:
    if f == TRUE or g == TRUE:
        return TRUE
    if f == FALSE or f == g:
        return g
    if g == FALSE:
        return f
    if f > g:
        f, g = g, f
    r = _or_memo.get((f, g))
    if r is None:
        tf, tg = top(f), top(g)
        a = tf if tg is None or (tf is not None and tf <= tg) else tg
        f1, f0 = _cofactors(f, a)
        g1, g0 = _cofactors(g, a)
        r = _mk(a, disj(f1, g1), disj(f0, g0))
        _or_memo[(f, g)] = r
    return r


def conj(f: int, g: int) -> int:
    return neg(disj(neg(f), neg(g)))


def implies(f: int, g: int) -> int:
    return disj(neg(f), g)


def key(f: int) -> tuple:
    """Structural key of a function; equal keys iff equal functions."""
    k = _key_memo.get(f)
    if k is None:
        a, hi, lo = _nodes[f]
        k = (2, a, key(hi), key(lo))
        _key_memo[f] = k
    return k


def support(f: int) -> list[tuple]:
    """Atom keys the function depends on, in diagram order."""
    seen: set[int] = set()
    out: set[tuple] = set()
    stack = [f]
    while stack:
        n = stack.pop()
        if n <= 1 or n in seen:
            continue
        seen.add(n)
        a, hi, lo = _nodes[n]
        out.add(a)
        stack += [hi, lo]
    return sorted(out)


def evaluate(f: int, assignment: Mapping[Hashable, bool]) -> bool:
    while f > 1:
        a, hi, lo = _nodes[f]
        f = hi if assignment[a] else lo
    return f == TRUE


def satisfying(f: int, atoms: Iterable[tuple]) -> list[tuple[bool, ...]]:
    """All assignments over ``atoms`` (in the given order) satisfying f."""
    atoms = list(atoms)
    out = []
    for bits in range(1 << len(atoms)):
        row = tuple(bool(bits >> (len(atoms) - 1 - i) & 1) for i in range(len(atoms)))
        if evaluate(f, dict(zip(atoms, row))):
            out.append(row)
    return out
