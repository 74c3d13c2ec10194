"""Tree decompositions: exact widths, validation, strictness, levels."""
from __future__ import annotations

import random

import networkx as nx
import pytest
from networkx.algorithms.approximation import treewidth_min_fill_in

from msohier.decomposition import (
    TreeDecomposition,
    contract_decomposition,
    decomposition_levels,
    dfs_decomposition,
    exact_width,
    extract_tree,
    is_strict,
    level_order,
    reduce_height,
    strictify,
    strictness_problems,
    validate,
)
from msohier.errors import BudgetError, MalformedError
from msohier.families import clique, cycle, grid, path, star
from msohier.graphs import Graph
from msohier.trees import TreeDomain

from util import (
    ahu_canon,
    atlas_graphs,
    random_connected_graph,
    random_graph,
    seeded_decomposition,
)


def to_nx(G: Graph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from(G.edges)
    return H


# -- the container ----------------------------------------------------------


def test_make_and_accessors():
    T = TreeDomain.make([(), (0,), (1,)])
    D = TreeDecomposition.make(T, {(): ["a", "b"], (0,): ["b", "c"], (1,): ["b"]})
    assert D.width == 1
    assert D.height == 2
    assert D.bag((0,)) == frozenset({"b", "c"})
    assert D.elements == frozenset("abc")
    assert D.cones()[()] == frozenset("abc")
    assert D.introduced()[(0,)] == frozenset({"c"})


def test_make_rejects_stray_bags():
    T = TreeDomain.make([()])
    with pytest.raises(MalformedError):
        TreeDecomposition.make(T, {(0,): ["a"]})


def test_validate_flags_each_axiom():
    G = path(2)  # v0 - v1 - v2
    T = TreeDomain.make([(), (0,)])
    # missing vertex
    D = TreeDecomposition.make(T, {(): ["v0", "v1"], (0,): ["v1"]})
    assert any("v2" in p for p in validate(D, G))
    # missing edge
    D = TreeDecomposition.make(T, {(): ["v0", "v2"], (0,): ["v1"]})
    assert any("covers" in p for p in validate(D, G))
    # disconnected trace
    T3 = TreeDomain.make([(), (0,), (0, 0)])
    D = TreeDecomposition.make(
        T3, {(): ["v0", "v1"], (0,): ["v1", "v2"], (0, 0): ["v0", "v1"]}
    )
    assert any("trace" in p or "connected" in p for p in validate(D, G))
    # and a good one is clean
    D = TreeDecomposition.make(T, {(): ["v0", "v1"], (0,): ["v1", "v2"]})
    assert validate(D, G) == []


# -- exact widths -----------------------------------------------------------


def test_frozen_widths():
    assert exact_width(clique(4), "twd")[0] == 3
    assert exact_width(cycle(5), "twd")[0] == 2
    assert exact_width(path(4), "twd")[0] == 1
    assert exact_width(grid(3, 3), "twd")[0] == 3
    assert exact_width(path(4), "pwd")[0] == 1
    assert exact_width(cycle(5), "pwd")[0] == 2
    assert exact_width(star(5), "pwd")[0] == 1
    assert exact_width(grid(3, 3), "pwd")[0] == 3
    # single-level decompositions have one bag
    assert exact_width(clique(4), "twdn", n=1)[0] == 3
    assert exact_width(path(3), "twdn", n=1)[0] == 3
    assert exact_width(star(4), "twdn", n=2)[0] == 1


def test_width_modes_ordered():
    rng = random.Random(3)
    for _ in range(12):
        G = random_graph(rng, rng.randint(1, 6))
        twd = exact_width(G, "twd")[0]
        pwd = exact_width(G, "pwd")[0]
        assert twd <= pwd <= len(G.vertices) - 1
        prev = None
        for n in (1, 2, 3):
            w = exact_width(G, "twdn", n=n)[0]
            assert w >= twd
            if prev is not None:
                assert w <= prev
            prev = w


def test_engines_agree():
    rng = random.Random(9)
    graphs = [random_graph(rng, rng.randint(1, 6)) for _ in range(10)]
    graphs += [G for G in atlas_graphs(5) if len(G.vertices) >= 1][:40]
    for G in graphs:
        for mode, n in [("twd", None), ("pwd", None), ("twdn", 2), ("twdn", 3)]:
            wd, Dd = exact_width(G, mode, n=n, engine="dp")
            ws, Ds = exact_width(G, mode, n=n, engine="search")
            assert wd == ws, (mode, n, G.edges)
            assert validate(Dd, G) == [] and validate(Ds, G) == []


def test_treewidth_sandwich_against_networkx():
    # clique number - 1 <= exact treewidth <= greedy fill-in width
    rng = random.Random(21)
    for _ in range(25):
        G = random_graph(rng, rng.randint(2, 7))
        w = exact_width(G, "twd")[0]
        H = to_nx(G)
        omega = max((len(c) for c in nx.find_cliques(H)), default=1)
        upper, _ = treewidth_min_fill_in(H)
        assert omega - 1 <= w <= upper, G.edges


def test_width_budget_and_errors():
    with pytest.raises(BudgetError):
        exact_width(clique(5), budget=4)
    with pytest.raises(MalformedError):
        exact_width(clique(3), "nope")
    with pytest.raises(MalformedError):
        exact_width(clique(3), "twdn")  # no n
    with pytest.raises(MalformedError):
        exact_width(clique(3), engine="guess")


def test_empty_and_singleton():
    E = Graph.make([], [])
    assert exact_width(E, "twd")[0] == -1
    S = Graph.make(["a"], [])
    assert exact_width(S, "twd")[0] == 0
    assert exact_width(S, "twdn", n=1)[0] == 0


# -- strictness -------------------------------------------------------------


def test_strictness_detects_lazy_nodes():
    G = path(2)
    T = TreeDomain.make([(), (0,)])
    D = TreeDecomposition.make(T, {(): ["v0", "v1", "v2"], (0,): ["v1"]})
    assert validate(D, G) == []
    assert not is_strict(D, G)
    assert any("introduces" in p for p in strictness_problems(D, G))


def test_strictness_detects_split_contribution():
    # one child subtree contributing two components of the remainder
    G = path(4)  # v0..v4
    T = TreeDomain.make([(), (0,)])
    D = TreeDecomposition.make(
        T, {(): ["v1", "v2", "v3"], (0,): ["v0", "v1", "v3", "v4"]}
    )
    assert validate(D, G) == []
    assert any("components" in p for p in strictness_problems(D, G))


def test_strictify_repairs_seeded_corpus():
    rng = random.Random(5)
    for _ in range(60):
        G = random_graph(rng, rng.randint(1, 7))
        D = seeded_decomposition(rng, G)
        S = strictify(D, G)
        assert is_strict(S, G)
        assert S.width <= D.width
        if G.is_connected:
            assert S.height <= D.height
        else:
            assert S.height <= D.height + 1


def test_strictify_connected_height():
    D = dfs_decomposition(grid(2, 3))
    S = strictify(D, grid(2, 3))
    assert is_strict(S, grid(2, 3))
    assert S.height <= D.height


def test_contract_decomposition():
    T = TreeDomain.make([(), (0,), (0, 0)])
    D = TreeDecomposition.make(
        T, {(): ["a", "b"], (0,): ["b"], (0, 0): ["b", "c"]}
    )
    C = contract_decomposition(D)
    assert len(C.tree) == 2
    assert C.width == D.width
    G = Graph.make(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert validate(C, G) == []


# -- depth-first decompositions ---------------------------------------------


def test_dfs_decomposition_properties():
    rng = random.Random(13)
    for _ in range(40):
        G = random_connected_graph(rng, rng.randint(1, 8))
        D = dfs_decomposition(G)
        assert validate(D, G) == []
        assert is_strict(D, G)
        assert D.width <= D.height - 1
        L = D.height
        # a height-L decomposition bounds the height-L width by construction
        assert exact_width(G, "twdn", n=L)[0] <= D.width


def test_dfs_on_disconnected():
    G = Graph.make(["a", "b", "c", "d"], [("a", "b"), ("c", "d")])
    D = dfs_decomposition(G)
    assert validate(D, G) == []
    assert D.bag(()) == frozenset()


# -- height reduction -------------------------------------------------------


def test_reduce_height_bounds():
    rng = random.Random(17)
    for _ in range(30):
        G = random_connected_graph(rng, rng.randint(2, 8))
        D = dfs_decomposition(G)
        k = D.width
        for n in (1, 2, 3):
            R = reduce_height(D, n)
            assert validate(R, G) == []
            assert R.height <= n
            b = -(-D.height // n)
            assert R.width <= b * (k + 1) - 1


def test_reduce_height_noop_and_errors():
    D = dfs_decomposition(path(3))
    assert reduce_height(D, 10) is D
    with pytest.raises(MalformedError):
        reduce_height(D, 0)


# -- level preorders --------------------------------------------------------


def test_levels_of_dfs_path():
    G = path(3)
    D = dfs_decomposition(G)
    levels = decomposition_levels(D, G)
    assert sum(len(L) for L in levels) == 4
    order = level_order(G, levels)
    assert order.levels == levels
    root_level, root_class = order.classes[0]
    assert root_level == 0 and root_class == frozenset(G.vertices)


def test_level_order_rejects_bad_partitions():
    G = path(2)
    with pytest.raises(MalformedError):
        level_order(G, [["v0"], ["v0", "v1", "v2"]])  # overlap
    with pytest.raises(MalformedError):
        level_order(G, [["v0"], ["v1"]])  # misses v2
    with pytest.raises(MalformedError):
        level_order(G, [[], ["v0", "v1", "v2"]])  # empty first level
    # level gap: v2 attaches two levels up
    H = Graph.make(["a", "b", "c"], [("a", "b"), ("a", "c")])
    with pytest.raises(MalformedError):
        level_order(H, [["a"], ["b"], ["c"]])


def test_extract_tree_recovers_strict_decompositions():
    rng = random.Random(19)
    done = 0
    for _ in range(200):
        if done >= 25:
            break
        G = random_connected_graph(rng, rng.randint(1, 7))
        D = strictify(dfs_decomposition(G), G)
        if D.height > 3:
            continue
        done += 1
        levels = decomposition_levels(D, G)
        E = extract_tree(G, levels)
        assert validate(E, G) == []
        assert E.width <= D.width
        assert E.height <= D.height
        assert ahu_canon(E.tree) == ahu_canon(D.tree)
    assert done >= 10


def test_extract_tree_matches_levels():
    G = grid(2, 2)
    D = strictify(dfs_decomposition(G), G)
    levels = decomposition_levels(D, G)
    E = extract_tree(G, levels)
    assert decomposition_levels(strictify(E, G), G) == levels
