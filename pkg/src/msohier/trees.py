"""Tree domains (prefix-closed direction sequences) and coloured trees.

Vertices are tuples of child indices; the root is the empty tuple.  A tree
of height n has levels 0 .. n-1; the empty tree has height 0.  Trees come in
two relational presentations: ancestor order (``le``) and parent-child
successor (``edg``), with colours as unary predicates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import BudgetError, MalformedError
from .structures import RelationalStructure, Signature

Vertex = tuple[int, ...]

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def vertex_to_str(v: Vertex) -> str:
    try:
        return "".join(_DIGITS[d] for d in v)
    except IndexError:
        raise MalformedError(f"direction {max(v)} too large to serialise") from None


def vertex_from_str(s: str) -> Vertex:
    out = []
    for ch in s:
        d = _DIGITS.find(ch)
        if d < 0:
            raise MalformedError(f"bad direction character {ch!r}")
        out.append(d)
    return tuple(out)


@dataclass(frozen=True)
class TreeDomain:
    """A finite prefix-closed set of direction sequences."""

    vertices: frozenset[Vertex]

    @staticmethod
    def make(vertices: Iterable[Sequence[int]]) -> "TreeDomain":
        return TreeDomain(frozenset(tuple(v) for v in vertices))

    def __post_init__(self) -> None:
        for v in self.vertices:
            if v and v[:-1] not in self.vertices:
                raise MalformedError(f"tree domain not prefix closed at {v}")

    @cached_property
    def sorted_vertices(self) -> tuple[Vertex, ...]:
        return tuple(sorted(self.vertices))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: Vertex) -> bool:
        return tuple(v) in self.vertices

    @property
    def height(self) -> int:
        if not self.vertices:
            return 0
        return max(len(v) for v in self.vertices) + 1

    @staticmethod
    def level(v: Vertex) -> int:
        return len(v)

    @staticmethod
    def is_prefix(u: Vertex, v: Vertex) -> bool:
        return len(u) <= len(v) and v[: len(u)] == u

    @staticmethod
    def meet(u: Vertex, v: Vertex) -> Vertex:
        out = []
        for a, b in zip(u, v):
            if a != b:
                break
            out.append(a)
        return tuple(out)

    def children(self, v: Vertex) -> tuple[Vertex, ...]:
        v = tuple(v)
        out = []
        i = 0
        while v + (i,) in self.vertices:
            out.append(v + (i,))
            i += 1
        # tolerate sparse child indices
        extra = sorted(
            w for w in self.vertices if len(w) == len(v) + 1 and w[:-1] == v and w not in out
        )
        return tuple(out) + tuple(extra)

    def parent(self, v: Vertex) -> Optional[Vertex]:
        return tuple(v)[:-1] if v else None

    def leaves(self) -> tuple[Vertex, ...]:
        return tuple(v for v in self.sorted_vertices if not self.children(v))

    def subtree(self, v: Vertex) -> frozenset[Vertex]:
        v = tuple(v)
        return frozenset(w for w in self.vertices if self.is_prefix(v, w))

    def out_degree(self, v: Vertex) -> int:
        return len(self.children(v))


def complete_tree(m: int, n: int) -> TreeDomain:
    """The complete m-ary tree of height n: all sequences over [m] shorter
    than n."""
    if m < 0 or n < 0:
        raise MalformedError("negative tree parameters")
    verts: list[Vertex] = []
    for length in range(n):
        verts.extend(itertools.product(range(m), repeat=length))
        if m == 0 and length >= 1:
            break
    return TreeDomain.make(verts)


ORDER_MODE = "order"
SUCCESSOR_MODE = "successor"


@dataclass(frozen=True)
class ColouredTree:
    """A tree domain with a relational mode and possibly overlapping colours."""

    domain: TreeDomain
    mode: str = SUCCESSOR_MODE
    colours: tuple[frozenset[Vertex], ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in (ORDER_MODE, SUCCESSOR_MODE):
            raise MalformedError(f"unknown tree mode {self.mode!r}")
        for c in self.colours:
            for v in c:
                if v not in self.domain.vertices:
                    raise MalformedError(f"coloured vertex {v} outside the tree")

    def signature(self) -> Signature:
        rel = ("le", 2) if self.mode == ORDER_MODE else ("edg", 2)
        cols = tuple((f"P{i}", 1) for i in range(len(self.colours)))
        return Signature(tuple(sorted((rel,) + cols)))

    def to_structure(self) -> RelationalStructure:
        dom = [vertex_to_str(v) for v in self.domain.sorted_vertices]
        rels: dict[str, list[tuple[str, ...]]] = {}
        if self.mode == ORDER_MODE:
            pairs = [
                (vertex_to_str(u), vertex_to_str(v))
                for u in self.domain.sorted_vertices
                for v in self.domain.sorted_vertices
                if TreeDomain.is_prefix(u, v)
            ]
            rels["le"] = pairs
        else:
            rels["edg"] = [
                (vertex_to_str(v[:-1]), vertex_to_str(v))
                for v in self.domain.sorted_vertices
                if v
            ]
        for i, c in enumerate(self.colours):
            rels[f"P{i}"] = [(vertex_to_str(v),) for v in sorted(c)]
        return RelationalStructure.make(self.signature(), dom, rels)


def convert_tree(T: ColouredTree) -> ColouredTree:
    """Swap between the order and successor presentations (an involution)."""
    other = ORDER_MODE if T.mode == SUCCESSOR_MODE else SUCCESSOR_MODE
    return ColouredTree(T.domain, other, T.colours)


def embed_order_tree(
    S: TreeDomain, T: TreeDomain, budget: int = 400
) -> Optional[dict[Vertex, Vertex]]:
    """An injective map f with u <= v iff f(u) <= f(v) (ancestor order both
    ways), i.e. S is isomorphic to an induced suborder of T.  Returns the
    embedding or None."""
    if len(S) * max(len(T), 1) > budget * budget:
        raise BudgetError(f"embedding search too large: {len(S)} into {len(T)}")
    if len(S) > len(T):
        return None
    if not S.vertices:
        return {}
    s_order = S.sorted_vertices  # parents precede children
    t_all = T.sorted_vertices

    def ok(v: Vertex, image: Vertex, partial: dict[Vertex, Vertex]) -> bool:
        for u, fu in partial.items():
            pre_s = TreeDomain.is_prefix(u, v) or TreeDomain.is_prefix(v, u)
            pre_t = TreeDomain.is_prefix(fu, image) or TreeDomain.is_prefix(image, fu)
            if pre_s != pre_t:
                return False
            if TreeDomain.is_prefix(u, v) != TreeDomain.is_prefix(fu, image):
                return False
        return True

    used: set[Vertex] = set()
    partial: dict[Vertex, Vertex] = {}

    def assign(i: int) -> bool:
        if i == len(s_order):
            return True
        v = s_order[i]
        for image in t_all:
            if image in used or not ok(v, image, partial):
                continue
            partial[v] = image
            used.add(image)
            if assign(i + 1):
                return True
            del partial[v]
            used.discard(image)
        return False

    return dict(partial) if assign(0) else None


def horizontally_related(T: TreeDomain, vs: Sequence[Vertex]) -> Optional[Vertex]:
    """The common pairwise meet of >= 2 same-level vertices, or None."""
    vs = [tuple(v) for v in vs]
    if len(vs) < 2:
        raise MalformedError("horizontal relatedness needs at least two vertices")
    for v in vs:
        if v not in T.vertices:
            raise MalformedError(f"vertex {v} not in the tree")
    if len({len(v) for v in vs}) != 1:
        return None
    meets = {TreeDomain.meet(a, b) for a, b in itertools.combinations(vs, 2)}
    if len(meets) != 1:
        return None
    return next(iter(meets))


def _tree_size(shape: tuple) -> int:
    return 1 + sum(_tree_size(c) for c in shape)


def _shapes_exact(n: int, height: int, cache: dict) -> list[tuple]:
    """Canonical rooted-tree shapes with exactly n vertices and height <=
    height; a shape is a sorted tuple of child shapes."""
    if n == 0 or height == 0:
        return []
    key = (n, height)
    if key in cache:
        return cache[key]
    if n == 1:
        cache[key] = [()]
        return cache[key]
    result: set[tuple] = set()

    def split(remaining: int, acc: tuple) -> None:
        if remaining == 0:
            result.add(acc)
            return
        for size in range(1, remaining + 1):
            for shape in _shapes_exact(size, height - 1, cache):
                cand = (size, shape)
                if acc and cand < (_tree_size(acc[-1]), acc[-1]):
                    continue  # keep children non-decreasing: one rep per multiset
                split(remaining - size, acc + (shape,))

    split(n - 1, ())
    cache[key] = sorted(result)
    return cache[key]


def all_tree_domains(max_size: int, max_height: int) -> list[TreeDomain]:
    """All tree-domain shapes with at most max_size vertices, height bounded."""
    cache: dict = {}
    out = [TreeDomain.make([])]
    for n in range(1, max_size + 1):
        for shape in _shapes_exact(n, max_height, cache):
            out.append(_shape_to_domain(shape))
    return out


def _shape_to_domain(shape: tuple) -> TreeDomain:
    verts: list[Vertex] = []

    def walk(prefix: Vertex, node: tuple) -> None:
        verts.append(prefix)
        for i, child in enumerate(node):
            walk(prefix + (i,), child)

    walk((), shape)
    return TreeDomain.make(verts)
