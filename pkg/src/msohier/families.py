"""Generators for the standard graph and tree families used in tests and by
the hierarchy classifier: paths, cycles, cliques, grids, stars, and complete
m-ary trees in both relational presentations."""

from __future__ import annotations

from .errors import MalformedError
from .graphs import Graph
from .structures import RelationalStructure
from .trees import SUCCESSOR_MODE, ColouredTree, TreeDomain
from .trees import complete_tree as complete_tree_domain


def path(length: int) -> Graph:
    """The path with `length` edges (length + 1 vertices)."""
    if length < 0:
        raise MalformedError("negative path length")
    vs = [f"v{i}" for i in range(length + 1)]
    return Graph.make(vs, [(f"v{i}", f"v{i+1}") for i in range(length)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise MalformedError("cycles need at least 3 vertices")
    vs = [f"v{i}" for i in range(n)]
    return Graph.make(vs, [(f"v{i}", f"v{(i+1) % n}") for i in range(n)])


def clique(n: int) -> Graph:
    vs = [f"v{i}" for i in range(n)]
    return Graph.make(vs, [(a, b) for i, a in enumerate(vs) for b in vs[i + 1 :]])


def grid(m: int, n: int) -> Graph:
    """The m x n grid graph."""
    if m < 1 or n < 1:
        raise MalformedError("grid dimensions must be positive")
    vs = [f"v{i}_{j}" for i in range(m) for j in range(n)]
    edges = []
    for i in range(m):
        for j in range(n):
            if i + 1 < m:
                edges.append((f"v{i}_{j}", f"v{i+1}_{j}"))
            if j + 1 < n:
                edges.append((f"v{i}_{j}", f"v{i}_{j+1}"))
    return Graph.make(vs, edges)


def star(leaves: int) -> Graph:
    vs = ["c"] + [f"l{i}" for i in range(leaves)]
    return Graph.make(vs, [("c", f"l{i}") for i in range(leaves)])


def complete_tree(m: int, n: int, mode: str = SUCCESSOR_MODE) -> RelationalStructure:
    """The complete m-ary tree of height n as a relational structure."""
    return ColouredTree(complete_tree_domain(m, n), mode).to_structure()


def binary_tree(n: int, mode: str = SUCCESSOR_MODE) -> RelationalStructure:
    return complete_tree(2, n, mode)


def tree_graph(domain: TreeDomain) -> Graph:
    """The undirected parent-child graph of a tree domain."""
    T = ColouredTree(domain, SUCCESSOR_MODE).to_structure()
    return Graph.from_structure(T)


_FAMILIES = {
    "path": (path, 1),
    "cycle": (cycle, 1),
    "clique": (clique, 1),
    "grid": (grid, 2),
    "star": (star, 1),
}


def generate(name: str, *args: int) -> RelationalStructure:
    """Build a named family member as a relational structure.

    Known names: path(l), cycle(n), clique(n), grid(m, n), star(k),
    tree(m, n) / btree(n) in successor mode, otree(m, n) in order mode.
    """
    if name == "tree":
        if len(args) != 2:
            raise MalformedError("tree takes two arguments")
        return complete_tree(args[0], args[1])
    if name == "otree":
        if len(args) != 2:
            raise MalformedError("otree takes two arguments")
        return complete_tree(args[0], args[1], mode="order")
    if name == "btree":
        if len(args) != 1:
            raise MalformedError("btree takes one argument")
        return binary_tree(args[0])
    if name not in _FAMILIES:
        raise MalformedError(f"unknown family {name!r}")
    fn, arity = _FAMILIES[name]
    if len(args) != arity:
        raise MalformedError(f"{name} takes {arity} argument(s)")
    return fn(*args).to_structure()
