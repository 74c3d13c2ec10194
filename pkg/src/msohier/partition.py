"""Hierarchical partition refinements of incidence structures.

A partition refinement splits the domain of an incidence structure along a
tree of blocks, pairing every block with an equivalence relation that must
respect external connections.  Its width (the largest number of classes
realised in one block) bounds the treewidth of the encoded structure up to a
factor depending on the arity, which is what :func:`to_tree_decomposition`
makes concrete.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Optional, Sequence

from .decomposition import TreeDecomposition, check
from .errors import MalformedError, ScopeError
from .logic import modulus_bound, mtype, rank
from .structures import (
    IncidenceStructure,
    RelationalStructure,
    Signature,
    as_incidence,
    from_incidence,
    infer_incidence_base,
)
from .trees import ColouredTree, TreeDomain, Vertex, vertex_from_str, vertex_to_str

Links = dict[str, frozenset[tuple[int, str]]]


@dataclass(frozen=True)
class PartitionRefinement:
    """A block tree with per-block equivalences over an incidence structure.

    ``blocks`` assigns every tree vertex its block; ``classes`` lists each
    block's equivalence classes.  Construction is permissive — use
    :func:`validate_refinement` to check the axioms, so that tests can build
    deliberately broken instances.
    """

    structure: IncidenceStructure
    tree: TreeDomain
    blocks: tuple[tuple[Vertex, frozenset[str]], ...]
    classes: tuple[tuple[Vertex, tuple[frozenset[str], ...]], ...]

    @staticmethod
    def make(
        structure: IncidenceStructure,
        tree: TreeDomain,
        blocks: Mapping[Vertex, frozenset[str]],
        classes: Mapping[Vertex, Sequence[frozenset[str]]],
    ) -> "PartitionRefinement":
        for v in blocks:
            if v not in tree:
                raise MalformedError(f"block at {vertex_to_str(v)} outside the tree")
        for v in classes:
            if v not in tree:
                raise MalformedError(f"classes at {vertex_to_str(v)} outside the tree")
        block_rows = tuple(
            (v, frozenset(blocks.get(v, frozenset()))) for v in tree.sorted_vertices
        )
        class_rows = tuple(
            (v, _sorted_classes(classes.get(v, ()))) for v in tree.sorted_vertices
        )
        return PartitionRefinement(structure, tree, block_rows, class_rows)

    @cached_property
    def block_map(self) -> dict[Vertex, frozenset[str]]:
        return dict(self.blocks)

    @cached_property
    def class_map(self) -> dict[Vertex, tuple[frozenset[str], ...]]:
        return dict(self.classes)

    def block(self, v: Vertex) -> frozenset[str]:
        return self.block_map[v]

    def node_classes(self, v: Vertex) -> tuple[frozenset[str], ...]:
        return self.class_map[v]

    @cached_property
    def width(self) -> int:
        """Largest number of classes realised in one block."""
        return max((len(cs) for _, cs in self.classes), default=0)

    @cached_property
    def leaf_map(self) -> dict[str, Vertex]:
        """Element -> the leaf whose block is exactly that element."""
        out: dict[str, Vertex] = {}
        for v in self.tree.leaves():
            block = self.block_map[v]
            if len(block) == 1:
                (x,) = block
                out[x] = v
        return out


def _sorted_classes(classes: Sequence[frozenset[str]]) -> tuple[frozenset[str], ...]:
    return tuple(sorted((frozenset(c) for c in classes), key=sorted))


@dataclass(frozen=True)
class RefinementReport:
    valid: bool
    width: int
    violations: tuple[str, ...]


def incidence_links(I: IncidenceStructure) -> tuple[Links, Links]:
    """Position links of an incidence structure, indexed from both sides.

    Returns ``(by_element, by_tuple)`` where ``by_element[a]`` collects the
    pairs ``(position, tuple-element)`` with ``(a, e)`` in that position
    relation, and ``by_tuple[e]`` the mirror image.
    """
    by_a: dict[str, set[tuple[int, str]]] = {x: set() for x in I.domain}
    by_e: dict[str, set[tuple[int, str]]] = {x: set() for x in I.domain}
    for name in I.structure.signature.symbols:
        if not name.startswith("in_"):
            continue
        i = int(name[3:])
        for a, e in I.structure.rel(name):
            by_a[a].add((i, e))
            by_e[e].add((i, a))
    return (
        {x: frozenset(s) for x, s in by_a.items()},
        {x: frozenset(s) for x, s in by_e.items()},
    )


def validate_refinement(pi: PartitionRefinement) -> RefinementReport:
    """Check the refinement axioms; report all violations found.

    The checks, in order: classes partition their block, the root block is
    the whole domain, children's blocks partition their parent's, leaf
    blocks are singletons, equivalences coarsen upward, and equivalent
    elements agree on all connections external to their child blocks (which
    in particular forbids classes mixing the element and tuple sorts).
    """
    I = pi.structure
    dom = frozenset(I.domain)
    a_part = frozenset(I.a_part)
    e_part = frozenset(I.e_part)
    by_a, by_e = incidence_links(I)
    violations: list[str] = []

    if () not in pi.tree:
        return RefinementReport(False, pi.width, ("refinement tree is empty",))

    for v in pi.tree.sorted_vertices:
        name = vertex_to_str(v)
        block = pi.block_map[v]
        stray = block - dom
        if stray:
            violations.append(f"{name}: block contains foreign elements {sorted(stray)}")
        seen: set[str] = set()
        for cls in pi.class_map[v]:
            if not cls:
                violations.append(f"{name}: empty class")
            if cls & seen:
                violations.append(f"{name}: classes overlap on {sorted(cls & seen)}")
            seen |= cls
        if seen != block:
            violations.append(f"{name}: classes do not partition the block")

    if pi.block_map[()] != dom:
        violations.append("root block is not the whole domain")

    for v in pi.tree.sorted_vertices:
        kids = pi.tree.children(v)
        name = vertex_to_str(v)
        if not kids:
            if len(pi.block_map[v]) != 1:
                violations.append(f"{name}: leaf block is not a singleton")
            continue
        union: set[str] = set()
        total = 0
        for c in kids:
            union |= pi.block_map[c]
            total += len(pi.block_map[c])
        if union != pi.block_map[v] or total != len(pi.block_map[v]):
            violations.append(f"{name}: children's blocks do not partition the block")

    # Upward coarsening: a class lower down never straddles two classes above.
    for v in pi.tree.sorted_vertices:
        parent = pi.tree.parent(v)
        if parent is None:
            continue
        up_class: dict[str, int] = {}
        for idx, cls in enumerate(pi.class_map[parent]):
            for x in cls:
                up_class[x] = idx
        for cls in pi.class_map[v]:
            ids = {up_class.get(x) for x in cls if x in up_class}
            if len(ids) > 1:
                pair = sorted(cls)[:2]
                violations.append(
                    f"{vertex_to_str(v)}: {pair[0]} ~ {pair[1]} here but not at "
                    f"{vertex_to_str(parent)}"
                )

    # External-connection condition at every internal vertex.
    for u in pi.tree.sorted_vertices:
        kids = pi.tree.children(u)
        if not kids:
            continue
        child_of: dict[str, Vertex] = {}
        for c in kids:
            for x in pi.block_map[c]:
                child_of[x] = c
        name = vertex_to_str(u)
        for cls in pi.class_map[u]:
            members = sorted(cls)
            for i, x in enumerate(members):
                for y in members[i + 1 :]:
                    if x not in child_of or y not in child_of:
                        continue  # partition failure, reported above
                    excluded = pi.block_map[child_of[x]] | pi.block_map[child_of[y]]
                    if x in a_part and y in a_part:
                        px = {le for le in by_a[x] if le[1] not in excluded}
                        py = {le for le in by_a[y] if le[1] not in excluded}
                    elif x in e_part and y in e_part:
                        px = {le for le in by_e[x] if le[1] not in excluded}
                        py = {le for le in by_e[y] if le[1] not in excluded}
                    else:
                        violations.append(f"{name}: {x} ~ {y} mixes the two sorts")
                        continue
                    if px != py:
                        witness = sorted(px ^ py)[0]
                        violations.append(
                            f"{name}: {x} ~ {y} disagree on external link {witness}"
                        )

    return RefinementReport(not violations, pi.width, tuple(violations))


def check_refinement(pi: PartitionRefinement) -> None:
    report = validate_refinement(pi)
    if not report.valid:
        raise MalformedError(
            "invalid refinement: " + "; ".join(report.violations[:5])
        )


def to_tree_decomposition(pi: PartitionRefinement) -> TreeDecomposition:
    """Convert a valid refinement into a tree decomposition of the encoded
    structure, over the same tree.

    Every element travels along the tree path between its own leaf and the
    leaves of the tuples it occurs in; that path union is its bag trace.
    Elements occurring in no tuple get a singleton bag at their own leaf.
    The resulting width is below ``(r + 3) * width(pi)`` for maximal arity
    ``r``.
    """
    check_refinement(pi)
    I = pi.structure
    A = from_incidence(I)
    leaf_of = pi.leaf_map
    by_a, _ = incidence_links(I)

    bags: dict[Vertex, set[str]] = {v: set() for v in pi.tree.sorted_vertices}
    for a in I.a_part:
        links = by_a[a]
        if not links:
            bags[leaf_of[a]].add(a)
            continue
        la = leaf_of[a]
        for _, e in links:
            le = leaf_of[e]
            m = TreeDomain.meet(la, le)
            for stop in (la, le):
                v = stop
                while True:
                    bags[v].add(a)
                    if v == m:
                        break
                    v = v[:-1]

    D = TreeDecomposition.make(pi.tree, {v: frozenset(b) for v, b in bags.items()})
    check(D, A)
    r = I.base_signature.max_arity
    assert D.width < (r + 3) * pi.width, (D.width, r, pi.width)
    return D


def external_classes(
    I: IncidenceStructure,
    block_map: Mapping[Vertex, frozenset[str]],
    tree: TreeDomain,
    v: Vertex,
    links: Optional[tuple[Links, Links]] = None,
) -> tuple[frozenset[str], ...]:
    """Coarsest safe equivalence at ``v``: group by sort and by the element's
    links that leave its own child block.

    Profile equality implies the external-connection condition pairwise, and
    nested blocks make it coarsen upward, so building every node's classes
    this way always yields a valid refinement.
    """
    by_a, by_e = links if links is not None else incidence_links(I)
    a_part = frozenset(I.a_part)
    block = block_map[v]
    kids = tree.children(v)
    child_of: dict[str, Vertex] = {}
    for c in kids:
        for x in block_map[c]:
            child_of[x] = c
    groups: dict[tuple, set[str]] = {}
    for x in sorted(block):
        inner = block_map[child_of[x]] if x in child_of else frozenset({x})
        side = by_a if x in a_part else by_e
        profile = frozenset(le for le in side[x] if le[1] not in inner)
        key = (x in a_part, profile)
        groups.setdefault(key, set()).add(x)
    return _sorted_classes([frozenset(g) for g in groups.values()])


def random_refinement(
    I: IncidenceStructure, rng: random.Random
) -> PartitionRefinement:
    """Random balanced-binary-split refinement with profile-equality classes."""
    dom = sorted(I.domain)
    if not dom:
        raise MalformedError("cannot refine an empty structure")
    blocks: dict[Vertex, frozenset[str]] = {}

    def split(v: Vertex, elems: list[str]) -> None:
        blocks[v] = frozenset(elems)
        if len(elems) == 1:
            return
        rng.shuffle(elems)
        half = len(elems) // 2
        split(v + (0,), sorted(elems[:half]))
        split(v + (1,), sorted(elems[half:]))

    split((), list(dom))
    tree = TreeDomain.make(blocks)
    links = incidence_links(I)
    classes = {
        v: external_classes(I, blocks, tree, v, links) for v in tree.sorted_vertices
    }
    return PartitionRefinement.make(I, tree, blocks, classes)


def refinement_from_interpretation(
    scheme,
    T: ColouredTree,
    type_rank: Optional[int] = None,
    budget: int = 2_000_000,
) -> PartitionRefinement:
    """Refinement of a structure interpreted on the leaves of a tree.

    ``scheme`` must define a structure over an incidence signature, placing
    every output element on a leaf of ``T``.  Blocks follow the subtrees of
    ``T``; two elements are equivalent at an inner vertex when the hereditary
    types of their branch-child subtrees (with the element marked) coincide
    at rank ``type_rank`` — by compositionality this caps the width by the
    number of such types, a constant independent of the tree.
    """
    from .transduction import apply_basic

    tree_struct = T.to_structure()
    out = apply_basic(scheme, tree_struct, budget=budget)
    if out is None:
        raise MalformedError("the scheme rejects this tree")
    base = infer_incidence_base(out)
    inc = as_incidence(out, base)

    leaf_names = {vertex_to_str(v): v for v in T.domain.leaves()}
    for x in out.domain:
        if x not in leaf_names:
            raise ScopeError(f"output element {x!r} is not a leaf of the tree")

    formulas = [scheme.chi, scheme.delta] + [f for _, f in scheme.phis]
    if type_rank is None:
        type_rank = max(rank(f) for f in formulas)
    q = max([1] + [modulus_bound(f) for f in formulas])

    selected = sorted(out.domain)
    keep: set[Vertex] = set()
    for x in selected:
        v = leaf_names[x]
        for i in range(len(v) + 1):
            keep.add(v[:i])
    tree = TreeDomain.make(keep)

    blocks: dict[Vertex, frozenset[str]] = {
        u: frozenset(x for x in selected if TreeDomain.is_prefix(u, leaf_names[x]))
        for u in keep
    }

    e_part = frozenset(inc.e_part)
    type_cache: dict[tuple[Vertex, str], object] = {}

    def branch_type(v: Vertex, x: str):
        key = (v, x)
        if key not in type_cache:
            sub = frozenset(
                vertex_to_str(w) for w in T.domain.subtree(v)
            )
            restricted = _induced(tree_struct, sub)
            type_cache[key] = mtype(
                restricted, params=({x},), rank=type_rank, q=q, budget=budget
            )
        return type_cache[key]

    classes: dict[Vertex, tuple[frozenset[str], ...]] = {}
    for u in tree.sorted_vertices:
        if not tree.children(u):
            classes[u] = (blocks[u],)
            continue
        groups: dict[tuple, set[str]] = {}
        for x in blocks[u]:
            branch = leaf_names[x][: len(u) + 1]
            key = (x in e_part, branch_type(branch, x))
            groups.setdefault(key, set()).add(x)
        classes[u] = _sorted_classes([frozenset(g) for g in groups.values()])

    pi = PartitionRefinement.make(inc, tree, blocks, classes)
    report = validate_refinement(pi)
    assert report.valid, report.violations
    return pi


def _induced(A: RelationalStructure, subset: frozenset[str]) -> RelationalStructure:
    rels = {
        name: [t for t in A.rel(name) if all(x in subset for x in t)]
        for name in A.signature.symbols
    }
    return RelationalStructure.make(
        A.signature, tuple(x for x in A.domain if x in subset), rels
    )
