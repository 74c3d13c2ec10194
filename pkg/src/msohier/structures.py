"""Finite relational structures and their incidence encoding.

A structure is a finite ordered domain of string identifiers together with a
named family of relations.  The incidence encoding replaces every relation
tuple by a fresh element carrying a label predicate and position relations,
which turns arbitrary structures into 1-sparse binary ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BudgetError, MalformedError

Tuple_ = tuple[str, ...]


@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities, plus optional constant symbols."""

    relations: tuple[tuple[str, int], ...]
    constants: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise MalformedError(f"duplicate relation symbol in signature: {names}")
        if len(set(self.constants)) != len(self.constants):
            raise MalformedError(f"duplicate constant symbol: {self.constants}")
        for name, arity in self.relations:
            if arity < 1:
                raise MalformedError(f"relation {name!r} has arity {arity} < 1")

    @cached_property
    def arities(self) -> dict[str, int]:
        return dict(self.relations)

    def arity(self, symbol: str) -> int:
        try:
            return self.arities[symbol]
        except KeyError:
            raise MalformedError(f"unknown relation symbol {symbol!r}") from None

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    @property
    def max_arity(self) -> int:
        return max((ar for _, ar in self.relations), default=0)

    def merge(self, other: "Signature") -> "Signature":
        """Union of two signatures; shared symbols must agree on arity."""
        rels = dict(self.relations)
        for name, ar in other.relations:
            if name in rels and rels[name] != ar:
                raise MalformedError(
                    f"symbol {name!r} has conflicting arities {rels[name]} and {ar}"
                )
            rels[name] = ar
        shared = set(self.constants) & set(other.constants)
        if shared:
            raise MalformedError(f"constant symbols clash in union: {sorted(shared)}")
        return Signature(
            tuple(sorted(rels.items())), tuple(self.constants) + tuple(other.constants)
        )


def signature(*relations: tuple[str, int], constants: Sequence[str] = ()) -> Signature:
    return Signature(tuple(relations), tuple(constants))


GRAPH_SIGNATURE = signature(("edg", 2))


@dataclass(frozen=True)
class RelationalStructure:
    """Immutable finite structure; the domain is kept in sorted order."""

    signature: Signature
    domain: tuple[str, ...]
    relations: tuple[tuple[str, frozenset[Tuple_]], ...]
    constants: tuple[tuple[str, str], ...] = ()

    @staticmethod
    def make(
        sig: Signature,
        domain: Iterable[str],
        relations: Mapping[str, Iterable[Sequence[str]]] | None = None,
        constants: Mapping[str, str] | None = None,
    ) -> "RelationalStructure":
        dom = tuple(sorted(set(domain)))
        dom_set = set(dom)
        relations = relations or {}
        fixed: list[tuple[str, frozenset[Tuple_]]] = []
        for name, _ in sorted(sig.relations):
            ar = sig.arity(name)
            tuples = set()
            for t in relations.get(name, ()):  # type: ignore[union-attr]
                t = tuple(t)
                if len(t) != ar:
                    raise MalformedError(
                        f"tuple {t} has length {len(t)}, relation {name!r} has arity {ar}"
                    )
                for x in t:
                    if x not in dom_set:
                        raise MalformedError(f"tuple element {x!r} not in domain")
                tuples.add(t)
            fixed.append((name, frozenset(tuples)))
        extra = set(relations) - set(sig.symbols)
        if extra:
            raise MalformedError(f"relations not in signature: {sorted(extra)}")
        consts: list[tuple[str, str]] = []
        for name in sig.constants:
            if constants is None or name not in constants:
                raise MalformedError(f"missing interpretation for constant {name!r}")
            value = constants[name]
            if value not in dom_set:
                raise MalformedError(f"constant {name!r} = {value!r} not in domain")
            consts.append((name, value))
        return RelationalStructure(sig, dom, tuple(fixed), tuple(consts))

    @cached_property
    def relation_map(self) -> dict[str, frozenset[Tuple_]]:
        return dict(self.relations)

    def rel(self, symbol: str) -> frozenset[Tuple_]:
        try:
            return self.relation_map[symbol]
        except KeyError:
            raise MalformedError(f"unknown relation symbol {symbol!r}") from None

    @cached_property
    def constant_map(self) -> dict[str, str]:
        return dict(self.constants)

    @cached_property
    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.domain)}

    def __len__(self) -> int:
        return len(self.domain)

    def with_relations(
        self, extra: Mapping[str, Iterable[Sequence[str]]], extra_sig: Signature
    ) -> "RelationalStructure":
        """Expansion by additional relations (symbols must be fresh)."""
        merged = self.signature.merge(extra_sig)
        rels: dict[str, Iterable[Sequence[str]]] = {
            name: tuples for name, tuples in self.relations
        }
        for name in extra_sig.symbols:
            if name in self.relation_map:
                raise MalformedError(f"expansion symbol {name!r} already present")
            rels[name] = extra.get(name, ())
        return RelationalStructure.make(merged, self.domain, rels, self.constant_map)


def incidence_signature(base: Signature) -> Signature:
    """Signature of the incidence encoding: one label per symbol plus one
    binary position relation per tuple coordinate up to the maximal arity."""
    rels = [(f"P_{name}", 1) for name, _ in base.relations]
    rels += [(f"in_{i}", 2) for i in range(base.max_arity)]
    return Signature(tuple(sorted(rels)))


@dataclass(frozen=True)
class IncidenceStructure:
    """A relational structure over an incidence signature, split into the
    element part and the tuple part.

    ``tuple_of`` maps each tuple-part element to the (symbol, tuple) pair it
    stands for; ``base_signature`` records the arities of the encoded symbols.
    """

    structure: RelationalStructure
    base_signature: Signature
    a_part: tuple[str, ...]
    e_part: tuple[str, ...]
    tuple_of: tuple[tuple[str, tuple[str, Tuple_]], ...] = ()

    @cached_property
    def tuple_map(self) -> dict[str, tuple[str, Tuple_]]:
        return dict(self.tuple_of)

    @property
    def domain(self) -> tuple[str, ...]:
        return self.structure.domain

    def __len__(self) -> int:
        return len(self.structure.domain)


def _fresh_edge_name(symbol: str, t: Tuple_, taken: set[str]) -> str:
    name = f"{symbol}({','.join(t)})"
    while name in taken:
        name += "'"
    return name


def to_incidence(A: RelationalStructure) -> IncidenceStructure:
    """Incidence encoding: one fresh element per relation tuple occurrence."""
    sig_in = incidence_signature(A.signature)
    taken = set(A.domain)
    e_names: list[str] = []
    tuple_of: list[tuple[str, tuple[str, Tuple_]]] = []
    labels: dict[str, list[Tuple_]] = {f"P_{name}": [] for name in A.signature.symbols}
    in_rels: dict[str, list[Tuple_]] = {f"in_{i}": [] for i in range(A.signature.max_arity)}
    for symbol in A.signature.symbols:
        for t in sorted(A.rel(symbol)):
            e = _fresh_edge_name(symbol, t, taken)
            taken.add(e)
            e_names.append(e)
            tuple_of.append((e, (symbol, t)))
            labels[f"P_{symbol}"].append((e,))
            for i, x in enumerate(t):
                in_rels[f"in_{i}"].append((x, e))
    rels: dict[str, list[Tuple_]] = {}
    rels.update(labels)
    rels.update(in_rels)
    structure = RelationalStructure.make(sig_in, A.domain + tuple(e_names), rels)
    return IncidenceStructure(
        structure, A.signature, A.domain, tuple(sorted(e_names)), tuple(tuple_of)
    )


def incidence_parts(
    structure: RelationalStructure, base: Signature
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Split a raw structure over an incidence signature into parts.

    Elements carrying a label predicate form the tuple part; everything else
    is the element part.  Raises on elements with several labels.
    """
    label_syms = [f"P_{name}" for name in base.symbols]
    labelled: dict[str, str] = {}
    for symbol in label_syms:
        if symbol not in structure.relation_map:
            raise MalformedError(f"incidence structure lacks label relation {symbol!r}")
        for (e,) in structure.rel(symbol):
            if e in labelled:
                raise MalformedError(f"element {e!r} carries two labels")
            labelled[e] = symbol
    e_part = tuple(sorted(labelled))
    a_part = tuple(x for x in structure.domain if x not in labelled)
    return a_part, e_part


def as_incidence(
    structure: RelationalStructure, base: Signature
) -> IncidenceStructure:
    """Wrap a raw structure (e.g. parsed from JSON) as an incidence structure."""
    a_part, e_part = incidence_parts(structure, base)
    tuple_of = []
    for e in e_part:
        symbol, t = _decode_tuple(structure, base, e)
        tuple_of.append((e, (symbol, t)))
    return IncidenceStructure(structure, base, a_part, e_part, tuple(tuple_of))


def _decode_tuple(
    structure: RelationalStructure, base: Signature, e: str
) -> tuple[str, Tuple_]:
    symbol = None
    for name in base.symbols:
        if (e,) in structure.rel(f"P_{name}"):
            symbol = name
            break
    assert symbol is not None
    ar = base.arity(symbol)
    components: list[str] = []
    for i in range(ar):
        rel_name = f"in_{i}"
        if rel_name not in structure.relation_map:
            raise MalformedError(
                f"tuple element {e!r}: missing position relation {rel_name!r}"
            )
        hits = [a for (a, e2) in structure.rel(rel_name) if e2 == e]
        if not hits:
            raise MalformedError(f"tuple element {e!r} lacks position {i}")
        if len(hits) > 1:
            raise MalformedError(f"tuple element {e!r} has several position-{i} entries")
        components.append(hits[0])
    # no positions beyond the declared arity
    for i in range(ar, structure.signature.max_arity):
        rel_name = f"in_{i}"
        if rel_name in structure.relation_map and any(
            e2 == e for (_, e2) in structure.rel(rel_name)
        ):
            raise MalformedError(f"tuple element {e!r} has position {i} >= arity {ar}")
    return symbol, tuple(components)


def from_incidence(I: IncidenceStructure) -> RelationalStructure:
    """Decode an incidence structure back to the structure it encodes."""
    rels: dict[str, list[Tuple_]] = {name: [] for name in I.base_signature.symbols}
    for e in I.e_part:
        symbol, t = _decode_tuple(I.structure, I.base_signature, e)
        rels[symbol].append(t)
    return RelationalStructure.make(I.base_signature, I.a_part, rels)


def infer_incidence_base(structure: RelationalStructure) -> Signature:
    """Reconstruct the base signature encoded by a raw incidence-signature
    structure, reading each symbol's arity off the realised positions.

    Symbols whose label relation is empty get arity 1 by default.
    """
    labels = [n for n in structure.signature.symbols if n.startswith("P_")]
    positions = [n for n in structure.signature.symbols if n.startswith("in_")]
    if len(labels) + len(positions) != len(structure.signature.symbols):
        raise MalformedError("signature is not an incidence signature")
    for n in labels:
        if structure.signature.arity(n) != 1:
            raise MalformedError(f"label relation {n!r} is not unary")
    pos_of: dict[str, int] = {}
    for n in positions:
        if structure.signature.arity(n) != 2:
            raise MalformedError(f"position relation {n!r} is not binary")
        try:
            i = int(n[3:])
        except ValueError:
            raise MalformedError(f"bad position relation name {n!r}") from None
        for _, e in structure.rel(n):
            pos_of[e] = max(pos_of.get(e, 0), i)
    arities = {}
    for n in labels:
        best = 0
        for (e,) in structure.rel(n):
            best = max(best, pos_of.get(e, 0))
        arities[n[2:]] = best + 1
    return Signature(tuple(sorted(arities.items())))


def disjoint_union(
    A: RelationalStructure, B: RelationalStructure
) -> RelationalStructure:
    """Tagged disjoint union; relations are unions of retagged tuples."""
    sig = A.signature.merge(B.signature)
    domain = [f"0:{x}" for x in A.domain] + [f"1:{x}" for x in B.domain]
    rels: dict[str, list[Tuple_]] = {name: [] for name in sig.symbols}
    for tag, S in (("0", A), ("1", B)):
        for name, tuples in S.relations:
            rels[name].extend(tuple(f"{tag}:{x}" for x in t) for t in tuples)
    consts = {name: f"0:{v}" for name, v in A.constants}
    consts.update({name: f"1:{v}" for name, v in B.constants})
    return RelationalStructure.make(sig, domain, rels, consts)


def is_k_sparse(
    A: RelationalStructure, k: int, budget: int = 20
) -> tuple[bool, Optional[tuple[frozenset[str], str]]]:
    """Exhaustively check that every subset X of the domain contains at most
    k*|X| tuples of each relation.  Returns (answer, witness or None)."""
    n = len(A.domain)
    if n > budget:
        raise BudgetError(f"domain size {n} exceeds sparsity budget {budget}")
    masks_by_symbol: list[tuple[str, list[int]]] = []
    for name, tuples in A.relations:
        masks = []
        for t in tuples:
            m = 0
            for x in t:
                m |= 1 << A.index[x]
            masks.append(m)
        masks_by_symbol.append((name, masks))
    for X in range(1 << n):
        size_k = k * X.bit_count()
        for name, masks in masks_by_symbol:
            inside = 0
            for m in masks:
                if m & ~X == 0:
                    inside += 1
                    if inside > size_k:
                        witness = frozenset(
                            A.domain[i] for i in range(n) if X >> i & 1
                        )
                        return False, (witness, name)
    return True, None


def gaifman(A: RelationalStructure) -> "Graph":
    """Gaifman graph: distinct elements co-occurring in some tuple."""
    from .graphs import Graph

    edges = set()
    for _, tuples in A.relations:
        for t in tuples:
            for x, y in itertools.combinations(set(t), 2):
                edges.add((min(x, y), max(x, y)))
    return Graph(vertices=A.domain, edges=frozenset(edges))


def example_structure() -> RelationalStructure:
    """Five elements, one ternary relation with three tuples; the running
    worked example for the incidence encoding and partition refinements."""
    return RelationalStructure.make(
        signature(("R", 3)),
        ["a", "b", "c", "d", "e"],
        {"R": [("a", "b", "c"), ("a", "b", "d"), ("a", "b", "e")]},
    )
