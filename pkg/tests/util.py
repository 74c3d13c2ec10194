"""Shared generators for the test suite (all seeded, no global state)."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from msohier.decomposition import TreeDecomposition, dfs_decomposition
from msohier.graphs import Graph
from msohier.structures import RelationalStructure, Signature, signature
from msohier.trees import TreeDomain


def random_structure(
    rng: random.Random,
    max_elems: int = 8,
    max_arity: int = 3,
    max_symbols: int = 2,
) -> RelationalStructure:
    n = rng.randint(1, max_elems)
    dom = [f"u{i}" for i in range(n)]
    rels = []
    for s in range(rng.randint(1, max_symbols)):
        rels.append((f"R{s}", rng.randint(1, max_arity)))
    sig = Signature(tuple(rels))
    content = {}
    for name, ar in rels:
        count = rng.randint(0, min(6, n**ar))
        tuples = set()
        for _ in range(count):
            tuples.add(tuple(rng.choice(dom) for _ in range(ar)))
        content[name] = sorted(tuples)
    return RelationalStructure.make(sig, dom, content)


def random_graph(rng: random.Random, n: int, p: float = 0.4) -> Graph:
    vs = [f"v{i}" for i in range(n)]
    es = [
        (a, b)
        for i, a in enumerate(vs)
        for b in vs[i + 1 :]
        if rng.random() < p
    ]
    return Graph.make(vs, es)


def random_connected_graph(rng: random.Random, n: int, extra: float = 0.3) -> Graph:
    vs = [f"v{i}" for i in range(n)]
    es = set()
    for i in range(1, n):
        es.add((vs[rng.randrange(i)], vs[i]))
    for i, a in enumerate(vs):
        for b in vs[i + 1 :]:
            if rng.random() < extra:
                es.add((a, b))
    return Graph.make(vs, es)


@lru_cache(maxsize=None)
def atlas_graphs(max_n: int = 7) -> tuple[Graph, ...]:
    """The exhaustive non-isomorphic catalogue up to max_n vertices."""
    import networkx as nx

    out = []
    for g in nx.graph_atlas_g():
        if len(g) > max_n:
            continue
        out.append(
            Graph.make(
                [str(v) for v in g.nodes],
                [(str(u), str(v)) for u, v in g.edges],
            )
        )
    return tuple(out)


def all_edge_structures(n: int, reflexive: bool = True):
    """Every structure over one binary relation on an n-element domain."""
    sig = signature(("edg", 2))
    dom = [chr(97 + i) for i in range(n)]
    pairs = [
        (a, b) for a in dom for b in dom if reflexive or a != b
    ]
    for bits in range(1 << len(pairs)):
        rel = [p for i, p in enumerate(pairs) if bits >> i & 1]
        yield RelationalStructure.make(sig, dom, {"edg": rel})


def mutate_decomposition(
    rng: random.Random, D: TreeDecomposition, rounds: int = 4
) -> TreeDecomposition:
    """Grow a valid decomposition into a sloppier (usually non-strict) one
    by duplicating bags downward and grafting empty leaves."""
    bag_map = dict(D.bags)
    for _ in range(rounds):
        v = rng.choice(sorted(bag_map))
        taken = {w[len(v)] for w in bag_map if len(w) == len(v) + 1 and w[: len(v)] == v}
        slot = 0
        while slot in taken:
            slot += 1
        child = v + (slot,)
        bag_map[child] = bag_map[v] if rng.random() < 0.7 else frozenset()
    return TreeDecomposition.make(TreeDomain.make(bag_map), bag_map)


def seeded_decomposition(rng: random.Random, G: Graph) -> TreeDecomposition:
    return mutate_decomposition(rng, dfs_decomposition(G), rounds=rng.randint(1, 6))


def spider(leg: int) -> TreeDomain:
    """A binary tree whose graph is the 3-legged spider with legs `leg` long
    (the smallest trees of growing pathwidth live in this family)."""
    vs = [(0,) * i for i in range(leg + 1)]
    c = (0,) * leg
    for d in (0, 1):
        for i in range(leg):
            vs.append(c + (d,) + (0,) * i)
    return TreeDomain.make(vs)


def ahu_canon(T: TreeDomain) -> tuple:
    """Canonical form of a rooted unordered tree."""

    def canon(v) -> tuple:
        return tuple(sorted(canon(c) for c in T.children(v)))

    return canon(())


def brute_longest_path(G: Graph) -> int:
    best = 0
    for r in range(len(G.vertices), 0, -1):
        for perm in itertools.permutations(G.vertices, r):
            if all(G.has_edge(a, b) for a, b in zip(perm, perm[1:])):
                return r
    return best


def structure_iso(A, B) -> bool:
    """Brute-force isomorphism test for small structures."""
    from itertools import permutations

    if A.signature != B.signature or len(A.domain) != len(B.domain):
        return False
    rel_a = {s: ts for s, ts in A.relations}
    rel_b = {s: ts for s, ts in B.relations}
    if any(len(rel_a[s]) != len(rel_b[s]) for s in rel_a):
        return False
    for perm in permutations(B.domain):
        ren = dict(zip(A.domain, perm))
        if all(
            frozenset(tuple(ren[x] for x in t) for t in ts) == rel_b[s]
            for s, ts in rel_a.items()
        ):
            return True
    return False
