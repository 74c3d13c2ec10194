"""Simple graphs on string vertices, edge contraction and minor search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BudgetError, MalformedError
from .structures import GRAPH_SIGNATURE, RelationalStructure

Edge = tuple[str, str]


def _norm_edge(a: str, b: str) -> Edge:
    if a == b:
        raise MalformedError(f"loop edge at {a!r} not allowed")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Graph:
    """An undirected loop-free graph (directed graphs keep ordered pairs)."""

    vertices: tuple[str, ...]
    edges: frozenset[Edge]
    directed: bool = False

    @staticmethod
    def make(
        vertices: Iterable[str],
        edges: Iterable[Sequence[str]] = (),
        directed: bool = False,
    ) -> "Graph":
        vs = tuple(sorted(set(vertices)))
        vset = set(vs)
        es = set()
        for a, b in edges:
            if a not in vset or b not in vset:
                raise MalformedError(f"edge ({a!r}, {b!r}) leaves the vertex set")
            es.add((a, b) if directed else _norm_edge(a, b))
        return Graph(vs, frozenset(es), directed)

    def __post_init__(self) -> None:
        if not self.directed:
            for a, b in self.edges:
                if a >= b:
                    raise MalformedError(f"unnormalised undirected edge ({a!r}, {b!r})")

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def adjacency(self) -> dict[str, frozenset[str]]:
        nbrs: dict[str, set[str]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            nbrs[a].add(b)
            if not self.directed:
                nbrs[b].add(a)
            else:
                nbrs[b].add(a)  # adjacency ignores direction
        return {v: frozenset(s) for v, s in nbrs.items()}

    @cached_property
    def masks(self) -> list[int]:
        """Neighbourhood bitmasks in vertex order (direction ignored)."""
        out = [0] * len(self.vertices)
        for a, b in self.edges:
            ia, ib = self.index[a], self.index[b]
            out[ia] |= 1 << ib
            out[ib] |= 1 << ia
        return out

    def __len__(self) -> int:
        return len(self.vertices)

    def has_edge(self, a: str, b: str) -> bool:
        if self.directed:
            return (a, b) in self.edges
        return a != b and _norm_edge(a, b) in self.edges

    def to_structure(self) -> RelationalStructure:
        tuples = set()
        for a, b in self.edges:
            tuples.add((a, b))
            if not self.directed:
                tuples.add((b, a))
        return RelationalStructure.make(GRAPH_SIGNATURE, self.vertices, {"edg": tuples})

    @staticmethod
    def from_structure(A: RelationalStructure) -> "Graph":
        """Read a graph off a structure with one binary symbol ``edg``."""
        if A.signature.symbols != ("edg",) or A.signature.arity("edg") != 2:
            raise MalformedError("expected a single binary relation 'edg'")
        edges = {_norm_edge(a, b) for a, b in A.rel("edg") if a != b}
        return Graph(A.domain, frozenset(edges))

    def subgraph(self, keep: Iterable[str]) -> "Graph":
        keep_set = set(keep)
        edges = frozenset(e for e in self.edges if e[0] in keep_set and e[1] in keep_set)
        return Graph(tuple(sorted(keep_set)), edges, self.directed)

    def components(self) -> list[frozenset[str]]:
        seen: set[str] = set()
        out = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in self.adjacency[u]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def contract_edges(G: Graph, contracted: Iterable[Sequence[str]]) -> Graph:
    """Quotient of G by the equivalence generated by the given edges.

    Classes are named after their least member; resulting loops are dropped.
    """
    parent = {v: v for v in G.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in contracted:
        if not G.has_edge(a, b):
            raise MalformedError(f"({a!r}, {b!r}) is not an edge of the graph")
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = (ra, rb) if ra < rb else (rb, ra)
            parent[hi] = lo
    classes = sorted({find(v) for v in G.vertices})
    edges = set()
    for a, b in G.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            edges.add(_norm_edge(ra, rb))
    return Graph(tuple(classes), frozenset(edges))


def check_minor_certificate(
    H: Graph, G: Graph, branch: Mapping[str, frozenset[str]]
) -> bool:
    """Validate a branch-set certificate: disjoint connected sets, one per
    H-vertex, with an edge of G between the sets of every H-edge."""
    if set(branch) != set(H.vertices):
        return False
    used: set[str] = set()
    for v, S in branch.items():
        if not S or not set(S) <= set(G.vertices) or set(S) & used:
            return False
        used |= set(S)
        if not G.subgraph(S).is_connected():
            return False
    for a, b in H.edges:
        if not any(G.has_edge(x, y) for x in branch[a] for y in branch[b]):
            return False
    return True


def is_minor(
    H: Graph, G: Graph, budget: int = 10
) -> Optional[dict[str, frozenset[str]]]:
    """Search for a branch-set model of H in G; returns the certificate or
    None.  This is the same relation as delete-edges/vertices-then-contract."""
    if len(G) > budget:
        raise BudgetError(f"host graph size {len(G)} exceeds minor budget {budget}")
    if len(H) == 0:
        return {}
    if len(H) > len(G):
        return None
    hverts = sorted(H.vertices, key=lambda v: -len(H.adjacency[v]))
    gverts = list(G.vertices)

    def connected_supersets(seed: frozenset[str], avoid: set[str]):
        """All connected sets containing `seed`, avoiding `avoid` (seed is a
        single free vertex here)."""
        # grow sets by adding boundary vertices; enumerate without repeats
        results = []
        start = frozenset(seed)

        def grow(cur: frozenset[str], frontier: list[str], banned: set[str]):
            results.append(cur)
            for i, w in enumerate(frontier):
                if w in banned:
                    continue
                nxt = cur | {w}
                new_frontier = frontier[i + 1 :] + [
                    x
                    for x in G.adjacency[w]
                    if x not in nxt and x not in avoid and x not in frontier
                ]
                grow(nxt, new_frontier, banned)
                banned = banned | {w}

        boundary = [x for x in G.adjacency[next(iter(seed))] if x not in avoid]
        grow(start, boundary, set())
        return results

    def assign(i: int, branch: dict[str, frozenset[str]], used: set[str]):
        if i == len(hverts):
            return dict(branch)
        h = hverts[i]
        needed = [g for g in hverts[:i] if H.has_edge(h, g)]
        for seed in gverts:
            if seed in used:
                continue
            for S in connected_supersets(frozenset({seed}), used):
                if any(
                    not any(G.has_edge(x, y) for x in S for y in branch[g])
                    for g in needed
                ):
                    continue
                branch[h] = S
                result = assign(i + 1, branch, used | set(S))
                if result is not None:
                    return result
                del branch[h]
        return None

    cert = assign(0, {}, set())
    if cert is not None:
        assert check_minor_certificate(H, G, cert)
    return cert


def all_minors(G: Graph, budget: int = 10) -> list[Graph]:
    """Every minor of G, one representative per isomorphism class."""
    from .iso import canonical_key

    if len(G) > budget:
        raise BudgetError(f"graph size {len(G)} exceeds minor budget {budget}")
    seen: dict[object, Graph] = {}
    verts = list(G.vertices)
    for r in range(len(verts) + 1):
        for kept in itertools.combinations(verts, r):
            sub = G.subgraph(kept)
            rest = sorted(sub.edges)
            for keep_mask in range(1 << len(rest)):
                kept_edges = [e for i, e in enumerate(rest) if keep_mask >> i & 1]
                base = Graph.make(kept, kept_edges)
                for cmask in range(1 << len(kept_edges)):
                    con = [e for i, e in enumerate(kept_edges) if cmask >> i & 1]
                    got = contract_edges(base, con)
                    key = canonical_key(got.to_structure())
                    seen.setdefault(key, got)
    return sorted(seen.values(), key=lambda g: (len(g), len(g.edges)))


def longest_path_order(G: Graph) -> int:
    """Number of vertices on a longest simple path (0 for the empty graph)."""
    if not G.vertices:
        return 0
    n = len(G.vertices)
    masks = G.masks
    best = 1

    def extend(v: int, visited: int, length: int) -> None:
        nonlocal best
        best = max(best, length)
        nbrs = masks[v] & ~visited
        while nbrs:
            w = (nbrs & -nbrs).bit_length() - 1
            nbrs &= nbrs - 1
            extend(w, visited | 1 << w, length + 1)

    for v in range(n):
        extend(v, 1 << v, 1)
    return best
