"""Tree decompositions of relational structures: validation, exact width
computation (treewidth, pathwidth, and height-bounded treewidth), strict
decompositions with repair, and the level preorder that recovers a bounded
decomposition from the structure itself.

Widths follow the usual convention: width = largest bag size minus one, so
the empty structure has width -1 (a single empty bag).  Heights count bag
levels: a one-node decomposition has height 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import BudgetError, MalformedError
from .graphs import Graph
from .structures import RelationalStructure, gaifman
from .trees import TreeDomain, Vertex

INF = float("inf")

GraphLike = Union[Graph, RelationalStructure]


def _as_graph(A: GraphLike) -> Graph:
    return gaifman(A) if isinstance(A, RelationalStructure) else A


@dataclass(frozen=True)
class TreeDecomposition:
    tree: TreeDomain
    bags: tuple[tuple[Vertex, frozenset[str]], ...]

    @staticmethod
    def make(
        tree: TreeDomain, bag_map: Mapping[Vertex, Iterable[str]]
    ) -> "TreeDecomposition":
        bags = tuple(
            (v, frozenset(bag_map.get(v, ()))) for v in tree.sorted_vertices
        )
        extra = set(bag_map) - set(tree.vertices)
        if extra:
            raise MalformedError(f"bags at vertices outside the tree: {sorted(extra)}")
        return TreeDecomposition(tree, bags)

    @cached_property
    def bag_map(self) -> dict[Vertex, frozenset[str]]:
        return dict(self.bags)

    def bag(self, v: Vertex) -> frozenset[str]:
        return self.bag_map[v]

    @property
    def width(self) -> int:
        if not self.bags:
            return -1
        return max(len(b) for _, b in self.bags) - 1

    @property
    def height(self) -> int:
        return self.tree.height

    @cached_property
    def elements(self) -> frozenset[str]:
        out: set[str] = set()
        for _, b in self.bags:
            out |= b
        return frozenset(out)

    def traces(self) -> dict[str, frozenset[Vertex]]:
        out: dict[str, set[Vertex]] = {}
        for v, b in self.bags:
            for a in b:
                out.setdefault(a, set()).add(v)
        return {a: frozenset(vs) for a, vs in out.items()}

    def cones(self) -> dict[Vertex, frozenset[str]]:
        """For each tree vertex, the union of bags in its subtree."""
        out: dict[Vertex, set[str]] = {}
        for v in sorted(self.tree.sorted_vertices, key=len, reverse=True):
            acc = set(self.bag(v))
            for c in self.tree.children(v):
                acc |= out[c]
            out[v] = acc
        return {v: frozenset(s) for v, s in out.items()}

    def introduced(self) -> dict[Vertex, frozenset[str]]:
        """For each tree vertex, the bag elements absent from the parent bag
        (the elements whose trace starts here, in a valid decomposition)."""
        out = {}
        for v, b in self.bags:
            p = self.tree.parent(v)
            out[v] = b if p is None else b - self.bag(p)
        return out


def validate(D: TreeDecomposition, A: GraphLike) -> list[str]:
    """All axiom violations of D as a decomposition of A (empty = valid)."""
    problems: list[str] = []
    if isinstance(A, RelationalStructure):
        domain = set(A.domain)
        tuple_sets = [(name, t) for name, ts in A.relations for t in ts]
    else:
        domain = set(A.vertices)
        tuple_sets = [("edg", e) for e in sorted(A.edges)]
    stray = D.elements - domain
    if stray:
        problems.append(f"bag elements outside the domain: {sorted(stray)}")
    missing = domain - D.elements
    if missing:
        problems.append(f"elements in no bag: {sorted(missing)}")
    bag_sets = [b for _, b in D.bags]
    for name, t in tuple_sets:
        need = set(t)
        if not any(need <= b for b in bag_sets):
            problems.append(f"no bag covers {name} tuple {t}")
    for a, nodes in D.traces().items():
        tops = [v for v in nodes if v == () or v[:-1] not in nodes]
        if len(tops) != 1:
            problems.append(f"trace of {a!r} is not a connected subtree")
    return problems


def check(D: TreeDecomposition, A: GraphLike) -> None:
    problems = validate(D, A)
    if problems:
        raise MalformedError("invalid decomposition: " + "; ".join(problems))


# ---------------------------------------------------------------------------
# bitmask helpers on graphs


def _submasks(mask: int):
    """All submasks of mask, including 0 and mask itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _neighbourhood(adj: Sequence[int], mask: int) -> int:
    out = 0
    for b in _bits(mask):
        out |= adj[b]
    return out & ~mask


def _mask_components(adj: Sequence[int], mask: int) -> list[int]:
    comps = []
    rest = mask
    while rest:
        seed = rest & -rest
        comp = seed
        while True:
            grow = comp
            for b in _bits(comp):
                grow |= adj[b] & mask
            if grow == comp:
                break
            comp = grow
        comps.append(comp)
        rest &= ~comp
    return comps


def _reach_through(adj: Sequence[int], v: int, allowed: int) -> int:
    """Vertices outside allowed+v adjacent to the component of v in
    allowed | {v}: the fill-neighbourhood of v once allowed is eliminated."""
    comp = 1 << v
    while True:
        grow = comp
        for b in _bits(comp):
            grow |= adj[b] & (allowed | (1 << v))
        if grow == comp:
            break
        comp = grow
    seen = 0
    for b in _bits(comp):
        seen |= adj[b]
    return seen & ~allowed & ~(1 << v)


# ---------------------------------------------------------------------------
# exact widths


def exact_width(
    A: GraphLike,
    mode: str = "twd",
    n: Optional[int] = None,
    engine: str = "dp",
    budget: int = 10,
) -> tuple[int, TreeDecomposition]:
    """The exact width of A under the requested measure, with a witness.

    mode is "twd" (treewidth), "pwd" (pathwidth), or "twdn" (treewidth by
    decompositions of height at most n).  Both engines are exhaustive;
    "dp" runs subset dynamic programs, "search" runs iterative-deepening
    decision searches, and they exist to cross-check one another.
    """
    G = _as_graph(A)
    if len(G.vertices) > budget:
        raise BudgetError(
            f"width computation on {len(G.vertices)} vertices exceeds budget {budget}"
        )
    if mode not in ("twd", "pwd", "twdn"):
        raise MalformedError(f"unknown width mode {mode!r}")
    if engine not in ("dp", "search"):
        raise MalformedError(f"unknown width engine {engine!r}")
    if mode == "twdn":
        if n is None or n < 0:
            raise MalformedError("height-bounded width needs a height bound")
        width, D = _twdn(G, n, engine)
    elif not G.vertices:
        width, D = -1, _single_bag_decomposition(frozenset())
    elif mode == "twd":
        width, D = _split_components(G, _twd_component, engine, path=False)
    else:
        width, D = _split_components(G, _pwd_component, engine, path=True)
    problems = validate(D, G)
    if problems:
        raise MalformedError("width witness failed validation: " + problems[0])
    if D.width != width:
        raise MalformedError(
            f"width witness has width {D.width}, claimed {width}"
        )
    return width, D


def _single_bag_decomposition(bag: frozenset[str]) -> TreeDecomposition:
    return TreeDecomposition.make(TreeDomain.make([()]), {(): bag})


def _split_components(G: Graph, solver, engine: str, path: bool):
    comps = G.components()
    if len(comps) == 1:
        return solver(G, engine)
    parts = [solver(G.subgraph(c), engine) for c in comps]
    width = max(w for w, _ in parts)
    if path:
        bags: list[frozenset[str]] = []
        for _, D in parts:
            bags.extend(D.bag(v) for v in D.tree.sorted_vertices)
        tree = TreeDomain.make([(0,) * i for i in range(len(bags))])
        D = TreeDecomposition.make(
            tree, {(0,) * i: b for i, b in enumerate(bags)}
        )
        return width, D
    first_w, first_D = parts[0]
    verts = list(first_D.tree.sorted_vertices)
    bag_map = {v: first_D.bag(v) for v in verts}
    base = first_D.tree.out_degree(())
    for off, (_, D) in enumerate(parts[1:]):
        prefix = (base + off,)
        for v in D.tree.sorted_vertices:
            bag_map[prefix + v] = D.bag(v)
            verts.append(prefix + v)
    return width, TreeDecomposition.make(TreeDomain.make(verts), bag_map)


def _order_to_tree_decomposition(G: Graph, order: list[int]) -> TreeDecomposition:
    """Tree decomposition from an elimination order: bag(v) = {v} plus its
    neighbours in the fill graph among later vertices."""
    names = G.vertices
    adj = list(G.masks)
    pos = {v: i for i, v in enumerate(order)}
    bags_by_vertex: dict[int, frozenset[int]] = {}
    parent_of: dict[int, Optional[int]] = {}
    for v in order:
        r = adj[v]
        bags_by_vertex[v] = frozenset(_bits(r)) | {v}
        later = [u for u in _bits(r)]
        parent_of[v] = min(later, key=lambda u: pos[u]) if later else None
        # eliminate v: clique up its remaining neighbours
        for u in _bits(r):
            adj[u] = (adj[u] | r) & ~(1 << u) & ~(1 << v)
        for u in range(len(adj)):
            adj[u] &= ~(1 << v)
    children: dict[Optional[int], list[int]] = {}
    for v in order:
        children.setdefault(parent_of[v], []).append(v)
    roots = children.get(None, [])
    coords: dict[int, Vertex] = {}
    bag_map: dict[Vertex, frozenset[str]] = {}

    def place(v: int, at: Vertex) -> None:
        coords[v] = at
        bag_map[at] = frozenset(names[u] for u in bags_by_vertex[v])
        for i, c in enumerate(children.get(v, [])):
            place(c, at + (i,))

    if len(roots) != 1:
        raise MalformedError("elimination order of a disconnected graph")
    place(roots[0], ())
    return TreeDecomposition.make(TreeDomain.make(bag_map), bag_map)


def _twd_component(G: Graph, engine: str) -> tuple[int, TreeDecomposition]:
    n = len(G.vertices)
    adj = G.masks
    full = (1 << n) - 1
    if engine == "dp":
        order = _twd_dp_order(adj, full)
    else:
        order = _twd_search_order(adj, n, full)
    D = _order_to_tree_decomposition(G, order)
    return D.width, D


def _twd_dp_order(adj: Sequence[int], full: int) -> list[int]:
    f: dict[int, float] = {0: -1}
    choice: dict[int, int] = {}
    by_count = sorted(range(full + 1), key=lambda m: bin(m).count("1"))
    for S in by_count:
        if S == 0:
            continue
        best, best_v = INF, -1
        for v in _bits(S):
            rest = S & ~(1 << v)
            q = bin(_reach_through(adj, v, rest)).count("1")
            val = max(f[rest], q)
            if val < best:
                best, best_v = val, v
        f[S] = best
        choice[S] = best_v
    order_rev = []
    S = full
    while S:
        v = choice[S]
        order_rev.append(v)
        S &= ~(1 << v)
    return list(reversed(order_rev))


def _twd_search_order(adj: Sequence[int], n: int, full: int) -> list[int]:
    for w in range(n):
        failed: set[int] = set()
        order: list[int] = []

        def go(elim: int) -> bool:
            if elim == full:
                return True
            if elim in failed:
                return False
            cands = []
            for v in _bits(full & ~elim):
                q = bin(_reach_through(adj, v, elim)).count("1")
                if q <= w:
                    cands.append((q, v))
            for _, v in sorted(cands):
                order.append(v)
                if go(elim | (1 << v)):
                    return True
                order.pop()
            failed.add(elim)
            return False

        if go(0):
            return order
    raise MalformedError("unreachable: every graph has an elimination order")


def _pwd_component(G: Graph, engine: str) -> tuple[int, TreeDecomposition]:
    n = len(G.vertices)
    adj = G.masks
    full = (1 << n) - 1

    def boundary(S: int) -> int:
        count = 0
        for u in _bits(S):
            if adj[u] & ~S:
                count += 1
        return count

    if engine == "dp":
        f: dict[int, float] = {0: 0}
        choice: dict[int, int] = {}
        for S in sorted(range(full + 1), key=lambda m: bin(m).count("1")):
            if S == 0:
                continue
            b = boundary(S)
            best, best_v = INF, -1
            for v in _bits(S):
                val = max(f[S & ~(1 << v)], b)
                if val < best:
                    best, best_v = val, v
            f[S] = best
            choice[S] = best_v
        order_rev = []
        S = full
        while S:
            v = choice[S]
            order_rev.append(v)
            S &= ~(1 << v)
        order = list(reversed(order_rev))
    else:
        order = None
        for w in range(n):
            failed: set[int] = set()
            acc: list[int] = []

            def go(placed: int) -> bool:
                if placed == full:
                    return True
                if placed in failed:
                    return False
                for v in _bits(full & ~placed):
                    nxt = placed | (1 << v)
                    if boundary(nxt) <= w:
                        acc.append(v)
                        if go(nxt):
                            return True
                        acc.pop()
                failed.add(placed)
                return False

            if go(0):
                order = acc
                break
        assert order is not None
    # bags: X_i = {v_i} + earlier vertices with a neighbour at or after i
    names = G.vertices
    bags = []
    for i, v in enumerate(order):
        later = 0
        for u in order[i:]:
            later |= 1 << u
        bag = {names[v]}
        for u in order[:i]:
            if adj[u] & later:
                bag.add(names[u])
        bags.append(frozenset(bag))
    tree = TreeDomain.make([(0,) * i for i in range(len(bags))])
    D = TreeDecomposition.make(tree, {(0,) * i: b for i, b in enumerate(bags)})
    return D.width, D


def _twdn(G: Graph, n: int, engine: str) -> tuple[int, TreeDecomposition]:
    """Minimum width over decompositions of height at most n.  No component
    split: joining per-component trees can change the height, so the
    recursion works on the whole graph."""
    nv = len(G.vertices)
    full = (1 << nv) - 1
    adj = G.masks
    if full == 0:
        if n < 1:
            # the empty decomposition has height 0 and no bags
            return -1, TreeDecomposition(TreeDomain.make([]), ())
        return -1, _single_bag_decomposition(frozenset())

    if engine == "dp":
        memo: dict[tuple[int, int, int], float] = {}
        pick: dict[tuple[int, int, int], tuple[int, list]] = {}

        def rec(W: int, B: int, h: int) -> float:
            if W == 0:
                return -1
            if h <= 0:
                return INF
            if h == 1:
                key = (W, B, 1)
                if key not in pick:
                    pick[key] = (W, [])
                return bin(W).count("1") - 1
            key = (W, B, h)
            if key in memo:
                return memo[key]
            best, best_pick = INF, None
            free = W & ~B
            for sub in _submasks(free):
                U = B | sub
                val = bin(U).count("1") - 1 if U else -1
                kids = []
                ok = True
                for C in _mask_components(adj, W & ~U):
                    conn = _neighbourhood(adj, C) & U
                    child = rec(C | conn, conn, h - 1)
                    kids.append((C | conn, conn, h - 1))
                    if child == INF:
                        ok = False
                        break
                    val = max(val, child)
                if ok and val < best:
                    best, best_pick = val, (U, kids)
            memo[key] = best
            if best_pick is not None:
                pick[key] = best_pick
            return best

        width = rec(full, 0, n)
        if width == INF:
            raise MalformedError(
                f"no decomposition of height {n} exists (this cannot happen for n >= 1)"
            )

        bag_map: dict[Vertex, frozenset[str]] = {}

        def build(key: tuple[int, int, int], at: Vertex) -> None:
            U, kids = pick[key]
            bag_map[at] = frozenset(G.vertices[b] for b in _bits(U))
            for i, k in enumerate(sorted(kids)):
                build(k, at + (i,))

        build((full, 0, n), ())
        D = TreeDecomposition.make(TreeDomain.make(bag_map), bag_map)
        return int(width), D

    # search engine: iterative deepening over the width
    for w in range(-1, nv):
        failed: set[tuple[int, int, int]] = set()

        def decide(W: int, B: int, h: int, w: int) -> Optional[dict]:
            # W is never 0 here: components are nonempty and the empty graph
            # is handled before the loop
            if h <= 0 or bin(B).count("1") > w + 1:
                return None
            key = (W, B, h)
            if key in failed:
                return None
            free = list(_bits(W & ~B))
            room = w + 1 - bin(B).count("1")
            for size in range(min(room, len(free)) + 1):
                for extra in itertools.combinations(free, size):
                    U = B
                    for b in extra:
                        U |= 1 << b
                    kids = []
                    ok = True
                    for C in _mask_components(adj, W & ~U):
                        conn = _neighbourhood(adj, C) & U
                        sub = decide(C | conn, conn, h - 1, w)
                        if sub is None:
                            ok = False
                            break
                        kids.append((C, sub, U))
                    if ok:
                        return {"bag": U, "kids": kids}
            failed.add(key)
            return None

        tree = decide(full, 0, n, w)
        if tree is not None:
            bag_map = {}

            def build(node: dict, at: Vertex) -> None:
                bag_map[at] = frozenset(
                    G.vertices[b] for b in _bits(node["bag"])
                )
                for i, (_, sub, _) in enumerate(node["kids"]):
                    build(sub, at + (i,))

            build(tree, ())
            D = TreeDecomposition.make(TreeDomain.make(bag_map), bag_map)
            return w, D
    raise MalformedError("unreachable: width n-1 always suffices at height 1")


def exact_twdn_value(A: GraphLike, n: int, engine: str = "dp", budget: int = 10) -> int:
    width, _ = exact_width(A, "twdn", n, engine, budget)
    return width


# ---------------------------------------------------------------------------
# strictness


def strictness_problems(D: TreeDecomposition, A: GraphLike) -> list[str]:
    """Why D fails to be strict: validity problems, nodes introducing no new
    element, or subtree contributions that are disconnected."""
    problems = validate(D, A)
    G = _as_graph(A)
    if not G.vertices:
        if len(D.tree) != 1 or D.bag(()) != frozenset():
            problems.append("empty structure needs the one-node empty decomposition")
        return problems
    intro = D.introduced()
    cones = D.cones()
    for v in D.tree.sorted_vertices:
        if not intro[v]:
            problems.append(f"node {v} introduces no new element")
        p = D.tree.parent(v)
        if p is None:
            continue
        contribution = cones[v] - D.bag(p)
        if not contribution:
            continue  # already reported: every bag below is inherited
        comp = G.subgraph(contribution).components()
        if len(comp) > 1:
            problems.append(
                f"subtree at {v} contributes {len(comp)} separate components"
            )
    return problems


def is_strict(D: TreeDecomposition, A: GraphLike) -> bool:
    return not strictness_problems(D, A)


class _Node:
    __slots__ = ("bag", "children")

    def __init__(self, bag: frozenset[str], children: list["_Node"]):
        self.bag = bag
        self.children = children

    def cone(self) -> frozenset[str]:
        out = set(self.bag)
        for c in self.children:
            out |= c.cone()
        return frozenset(out)


def _to_nodes(D: TreeDecomposition, at: Vertex = ()) -> _Node:
    return _Node(D.bag(at), [_to_nodes(D, c) for c in D.tree.children(at)])


def _from_nodes(root: _Node) -> TreeDecomposition:
    bag_map: dict[Vertex, frozenset[str]] = {}

    def place(node: _Node, at: Vertex) -> None:
        bag_map[at] = node.bag
        kids = sorted(node.children, key=lambda c: sorted(c.cone()))
        for i, c in enumerate(kids):
            place(c, at + (i,))

    place(root, ())
    return TreeDecomposition.make(TreeDomain.make(bag_map), bag_map)


def _deep_trim(node: _Node, allowed: frozenset[str]) -> _Node:
    return _Node(
        node.bag & allowed, [_deep_trim(c, allowed) for c in node.children]
    )


def strictify(D: TreeDecomposition, A: GraphLike) -> TreeDecomposition:
    """Repair D into a strict decomposition of the same structure without
    increasing the width.  Subtrees are split along the components of their
    contributions, redundant bags are contracted, and an empty root is merged
    away.  The height never grows on connected structures; joining the
    pieces of a disconnected structure may add one level."""
    check(D, A)
    G = _as_graph(A)
    adj = {v: set() for v in G.vertices}
    for a, b in G.edges:
        adj[a].add(b)
        adj[b].add(a)

    def components_of(elems: frozenset[str]) -> list[frozenset[str]]:
        rest = set(elems)
        out = []
        while rest:
            seed = rest.pop()
            comp = {seed}
            frontier = [seed]
            while frontier:
                x = frontier.pop()
                for y in adj[x]:
                    if y in elems and y not in comp:
                        comp.add(y)
                        frontier.append(y)
            rest -= comp
            out.append(frozenset(comp))
        return out

    def split(node: _Node, parent_bag: frozenset[str]) -> list[_Node]:
        new = node.cone() - parent_bag
        if not new:
            return []
        copies = []
        for C in components_of(new):
            bag_i = (node.bag & C) | (node.bag & parent_bag)
            allowed = C | (node.bag & parent_bag)
            kids: list[_Node] = []
            for ch in node.children:
                kids.extend(split(_deep_trim(ch, allowed), bag_i))
            copies.append(_Node(bag_i, kids))
        return copies

    roots = split(_to_nodes(D), frozenset())
    if not roots:
        root = _Node(frozenset(), [])
    elif len(roots) == 1:
        root = roots[0]
    else:
        root = roots[0]
        root.children = root.children + roots[1:]

    def contract(node: _Node) -> None:
        for c in node.children:
            contract(c)
        changed = True
        while changed:
            changed = False
            kids: list[_Node] = []
            for c in node.children:
                if c.bag <= node.bag:
                    kids.extend(c.children)
                    changed = True
                else:
                    kids.append(c)
            node.children = kids

    while True:
        contract(root)
        if root.bag or not root.children:
            break
        first = root.children[0]
        root = _Node(first.bag, first.children + root.children[1:])

    out = _from_nodes(root)
    problems = strictness_problems(out, A)
    if problems:
        raise MalformedError("strictification failed: " + "; ".join(problems))
    return out


def contract_decomposition(D: TreeDecomposition) -> TreeDecomposition:
    """Remove nodes whose bag is contained in the parent bag, splicing their
    children upward."""
    root = _to_nodes(D)

    def contract(node: _Node) -> None:
        for c in node.children:
            contract(c)
        changed = True
        while changed:
            changed = False
            kids: list[_Node] = []
            for c in node.children:
                if c.bag <= node.bag:
                    kids.extend(c.children)
                    changed = True
                else:
                    kids.append(c)
            node.children = kids

    contract(root)
    return _from_nodes(root)


# ---------------------------------------------------------------------------
# DFS decompositions and height reduction


def dfs_decomposition(A: GraphLike) -> TreeDecomposition:
    """The depth-first decomposition: bags pair each vertex with its
    ancestors that see into its subtree.  Height equals the depth-first tree
    height; a disconnected structure gets a joining empty root (one extra
    level)."""
    G = _as_graph(A)
    if not G.vertices:
        return _single_bag_decomposition(frozenset())
    order = {}
    parent: dict[str, Optional[str]] = {}
    roots = []
    seen: set[str] = set()
    for start in G.vertices:
        if start in seen:
            continue
        roots.append(start)
        # visit at pop time so non-tree edges are always back edges (a
        # vertex adopts the parent that reached it last, i.e. deepest)
        stack: list[tuple[str, Optional[str]]] = [(start, None)]
        while stack:
            x, p = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            parent[x] = p
            order[x] = len(order)
            for y in sorted(G.adjacency.get(x, ()), reverse=True):
                if y not in seen:
                    stack.append((y, x))
    children: dict[Optional[str], list[str]] = {}
    for v, p in parent.items():
        children.setdefault(p, []).append(v)
    subtree: dict[str, set[str]] = {}

    def collect(v: str) -> set[str]:
        out = {v}
        for c in children.get(v, ()):
            out |= collect(c)
        subtree[v] = out
        return out

    for r in roots:
        collect(r)
    bag_map: dict[Vertex, frozenset[str]] = {}

    def ancestors(v: str) -> list[str]:
        out = []
        p = parent[v]
        while p is not None:
            out.append(p)
            p = parent[p]
        return out

    def place(v: str, at: Vertex) -> None:
        bag = {v}
        below = subtree[v]
        for u in ancestors(v):
            if any(w in G.adjacency.get(u, ()) for w in below):
                bag.add(u)
        bag_map[at] = frozenset(bag)
        for i, c in enumerate(sorted(children.get(v, ()), key=lambda x: order[x])):
            place(c, at + (i,))

    if len(roots) == 1:
        place(roots[0], ())
    else:
        bag_map[()] = frozenset()
        for i, r in enumerate(roots):
            place(r, (i,))
    D = TreeDecomposition.make(TreeDomain.make(bag_map), bag_map)
    check(D, A)
    return D


def reduce_height(D: TreeDecomposition, n: int) -> TreeDecomposition:
    """Contract runs of levels so the height drops to at most n.  Blocks of
    b = ceil(height / n) consecutive levels merge along each branch, so the
    width grows to at most b * (width + 1) - 1."""
    if n < 1:
        raise MalformedError("target height must be at least 1")
    h = D.height
    if h <= n:
        return D
    b = -(-h // n)
    root = _to_nodes(D)

    def merge(node: _Node, depth_in_block: int) -> _Node:
        """Collapse the next depth_in_block levels into this node."""
        bag = set(node.bag)
        grand: list[tuple[_Node, int]] = []
        frontier = [(c, depth_in_block - 1) for c in node.children]
        while frontier:
            cur, left = frontier.pop()
            if left == 0:
                grand.append((cur, b))
                continue
            bag |= cur.bag
            frontier.extend((c, left - 1) for c in cur.children)
        return _Node(frozenset(bag), [merge(c, left) for c, left in grand])

    merged = merge(root, b)
    return _from_nodes(merged)


# ---------------------------------------------------------------------------
# level preorders


@dataclass(frozen=True)
class LevelOrder:
    levels: tuple[frozenset[str], ...]
    classes: tuple[tuple[int, frozenset[str]], ...]

    def level_of(self, a: str) -> int:
        for i, L in enumerate(self.levels):
            if a in L:
                return i
        raise MalformedError(f"{a!r} not in any level")

    def below(self, a: str, b: str) -> bool:
        """Whether a is (weakly) above b in the preorder: a's class is an
        ancestor-or-equal of b's."""
        la = self.level_of(a)
        if la > self.level_of(b):
            return False
        for lvl, cls in self.classes:
            if lvl == la and a in cls:
                return b in cls
        return False


def decomposition_levels(
    D: TreeDecomposition, A: GraphLike
) -> tuple[frozenset[str], ...]:
    """The level of each element: the tree level where its trace starts."""
    check(D, A)
    intro = D.introduced()
    by_level: dict[int, set[str]] = {}
    for v in D.tree.sorted_vertices:
        by_level.setdefault(len(v), set()).update(intro[v])
    if not by_level:
        return ()
    height = max(by_level) + 1
    return tuple(frozenset(by_level.get(i, ())) for i in range(height))


def level_order(A: GraphLike, levels: Sequence[Iterable[str]]) -> LevelOrder:
    """The preorder induced by a level partition: a lies above b when a's
    level is no deeper and both sit in one component of the subgraph on a's
    level and everything deeper.  Raises when the partition cannot have come
    from a strict decomposition."""
    G = _as_graph(A)
    levels_f = tuple(frozenset(L) for L in levels)
    seen: set[str] = set()
    for L in levels_f:
        if L & seen:
            raise MalformedError("levels overlap")
        seen |= L
    if seen != set(G.vertices):
        raise MalformedError("levels do not partition the domain")
    if G.vertices and (not levels_f or not levels_f[0]):
        raise MalformedError("first level is empty")
    classes: list[tuple[int, frozenset[str]]] = []
    if levels_f:
        suffix: set[str] = set(G.vertices)
        for i, L in enumerate(levels_f):
            if i == 0:
                classes.append((0, frozenset(suffix)))
            else:
                for comp in G.subgraph(suffix).components():
                    if comp & L:
                        classes.append((i, comp))
            suffix -= L
    # gap detection: each class at level >= 2 must attach one level up
    for lvl, cls in classes:
        if lvl < 2:
            continue
        wider = set().union(*levels_f[lvl - 1 :])
        for comp in G.subgraph(frozenset(wider)).components():
            if cls <= comp:
                if not comp & levels_f[lvl - 1]:
                    raise MalformedError(
                        f"level gap: a level-{lvl} class attaches above level {lvl - 1}"
                    )
                break
    return LevelOrder(levels_f, tuple(classes))


def extract_tree(A: GraphLike, levels: Sequence[Iterable[str]]) -> TreeDecomposition:
    """Rebuild a decomposition from a level partition: one node per level
    class, bagged with the class slice plus its neighbours above.  For levels
    read off a strict decomposition this never increases width or height."""
    G = _as_graph(A)
    order = level_order(A, levels)
    levels_f = order.levels
    if not levels_f:
        return _single_bag_decomposition(frozenset())
    nodes = list(order.classes)
    # parent: the deepest shallower class containing the class
    ids = {i: (lvl, cls) for i, (lvl, cls) in enumerate(nodes)}
    parent_of: dict[int, Optional[int]] = {}
    for i, (lvl, cls) in ids.items():
        if lvl == 0:
            parent_of[i] = None
            continue
        best = None
        for j, (lvl2, cls2) in ids.items():
            if lvl2 < lvl and cls <= cls2:
                if best is None or lvl2 > ids[best][0]:
                    best = j
        if best is None or ids[best][0] != lvl - 1:
            raise MalformedError(f"level-{lvl} class has no parent one level up")
        parent_of[i] = best
    kids: dict[Optional[int], list[int]] = {}
    for i in ids:
        kids.setdefault(parent_of[i], []).append(i)
    bag_of: dict[int, frozenset[str]] = {}
    for i, (lvl, cls) in ids.items():
        slice_ = cls & levels_f[lvl]
        above = {
            u
            for u in G.vertices
            if u not in cls
            and order.level_of(u) < lvl
            and any(v in G.adjacency.get(u, ()) for v in cls)
        }
        bag_of[i] = frozenset(slice_) | frozenset(above)
    if 0 not in set(lvl for lvl, _ in nodes):
        raise MalformedError("no level-0 class")
    root = kids[None][0]
    bag_map: dict[Vertex, frozenset[str]] = {}

    def place(i: int, at: Vertex) -> None:
        bag_map[at] = bag_of[i]
        for idx, c in enumerate(
            sorted(kids.get(i, ()), key=lambda j: sorted(ids[j][1]))
        ):
            place(c, at + (idx,))

    place(root, ())
    D = TreeDecomposition.make(TreeDomain.make(bag_map), bag_map)
    check(D, A)
    return D
