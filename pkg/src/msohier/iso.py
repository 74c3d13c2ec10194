"""Isomorphism checks and canonical forms for small structures.

Colour refinement plus individualisation; intended for desk-scale inputs
(tens of elements), where the branching stays tiny.
"""

from __future__ import annotations

from typing import Optional

from .errors import BudgetError
from .structures import RelationalStructure

_key_cache: dict[RelationalStructure, tuple] = {}


def _refine(n: int, colours: list[int], rel_tuples: list[tuple[str, list[tuple[int, ...]]]]):
    """Iterated colour refinement; returns stable colours as small ints."""
    while True:
        sigs: list[tuple] = [(colours[x],) for x in range(n)]
        occ: list[list[tuple]] = [[] for _ in range(n)]
        for si, (_, tuples) in enumerate(rel_tuples):
            for t in tuples:
                coloured = tuple(colours[c] for c in t)
                for pos, x in enumerate(t):
                    occ[x].append((si, pos, coloured))
        new = []
        for x in range(n):
            new.append((sigs[x], tuple(sorted(occ[x]))))
        table: dict[tuple, int] = {}
        fresh = []
        for s in sorted(set(new)):
            table[s] = len(table)
        for x in range(n):
            fresh.append(table[new[x]])
        if fresh == colours:
            return colours
        colours = fresh


def canonical_key(A: RelationalStructure) -> tuple:
    """A hashable value equal for exactly the isomorphic structures
    (over the same signature)."""
    cached = _key_cache.get(A)
    if cached is not None:
        return cached
    n = len(A.domain)
    rel_tuples = [
        (name, sorted(tuple(A.index[x] for x in t) for t in tuples))
        for name, tuples in A.relations
    ]
    const_of = {A.index[v]: name for name, v in A.constants}
    init = []
    interned: dict[tuple, int] = {}
    for x in range(n):
        raw = (const_of.get(x, ""),)
        init.append(interned.setdefault(raw, len(interned)))

    best: list[Optional[tuple]] = [None]
    budget = [200_000]

    def encode(order: list[int]) -> tuple:
        pos = [0] * n
        for p, x in enumerate(order):
            pos[x] = p
        body = []
        for name, tuples in rel_tuples:
            body.append((name, tuple(sorted(tuple(pos[c] for c in t) for t in tuples))))
        consts = tuple(sorted((name, pos[A.index[v]]) for name, v in A.constants))
        return (n, tuple(body), consts)

    def search(colours: list[int]) -> None:
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetError("canonical form search budget exhausted")
        colours = _refine(n, colours, rel_tuples)
        classes: dict[int, list[int]] = {}
        for x in range(n):
            classes.setdefault(colours[x], []).append(x)
        split = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                split = classes[c]
                break
        if split is None:
            order = sorted(range(n), key=lambda x: colours[x])
            enc = encode(order)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        fresh = max(colours, default=0) + 1
        for x in split:
            branched = list(colours)
            branched[x] = fresh
            search(branched)

    if n == 0:
        key = encode([])
    else:
        search(init)
        key = best[0]  # type: ignore[assignment]
    sig_part = (tuple(A.signature.relations), tuple(A.signature.constants))
    full = (sig_part, key)
    _key_cache[A] = full
    return full


def isomorphic(A: RelationalStructure, B: RelationalStructure) -> bool:
    if A.signature.relations != B.signature.relations:
        return False
    if len(A.domain) != len(B.domain):
        return False
    for (name, ta), (_, tb) in zip(A.relations, B.relations):
        if len(ta) != len(tb):
            return False
    return canonical_key(A) == canonical_key(B)


def canonical_set(structures) -> frozenset:
    """Canonical keys of an iterable of structures, as a set."""
    return frozenset(canonical_key(s) for s in structures)
