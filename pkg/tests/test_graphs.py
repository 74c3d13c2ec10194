import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msohier.errors import BudgetError, MalformedError
from msohier.families import clique, cycle, grid, path, star
from msohier.graphs import (
    Graph,
    all_minors,
    check_minor_certificate,
    contract_edges,
    is_minor,
    longest_path_order,
)
from msohier.iso import canonical_key, isomorphic
from util import brute_longest_path, random_graph


def test_make_normalizes_edges():
    G = Graph.make(["b", "a"], [("b", "a")])
    assert G.vertices == ("a", "b")
    assert G.has_edge("a", "b") and G.has_edge("b", "a")


def test_make_rejects_unknown_endpoints():
    with pytest.raises(MalformedError):
        Graph.make(["a"], [("a", "b")])


def test_loops_rejected():
    with pytest.raises(MalformedError):
        Graph.make(["a"], [("a", "a")])


def test_components():
    G = Graph.make(["a", "b", "c", "d"], [("a", "b"), ("c", "d")])
    comps = G.components()
    assert sorted(sorted(c) for c in comps) == [["a", "b"], ["c", "d"]]
    assert not G.is_connected()
    assert path(2).is_connected()


def test_contract_edges_names_least_member():
    G = path(2)  # v0 - v1 - v2
    H = contract_edges(G, [("v1", "v2")])
    assert set(H.vertices) == {"v0", "v1"}
    assert H.has_edge("v0", "v1")


def test_contract_chain_collapses():
    H = contract_edges(path(3), [("v0", "v1"), ("v1", "v2"), ("v2", "v3")])
    assert H.vertices == ("v0",)
    assert not H.edges


def test_certificate_check():
    G = path(3)
    cert = {"x": frozenset({"v0", "v1"}), "y": frozenset({"v2", "v3"})}
    H = Graph.make(["x", "y"], [("x", "y")])
    assert check_minor_certificate(H, G, cert)
    # disconnected branch set is rejected
    bad = {"x": frozenset({"v0", "v2"}), "y": frozenset({"v3"})}
    assert not check_minor_certificate(H, G, bad)


def test_is_minor_basics():
    assert is_minor(clique(3), cycle(5)) is not None
    assert is_minor(clique(4), cycle(5)) is None
    assert is_minor(clique(4), grid(2, 2)) is None
    assert is_minor(star(3), path(4)) is None  # max degree 2
    cert = is_minor(path(2), clique(4))
    assert cert is not None and check_minor_certificate(path(2), clique(4), cert)


def test_k4_is_minor_of_3x3_grid():
    # the smallest grid with a K4 minor
    cert = is_minor(clique(4), grid(3, 3))
    assert cert is not None
    assert check_minor_certificate(clique(4), grid(3, 3), cert)


def test_is_minor_budget():
    with pytest.raises(BudgetError):
        is_minor(clique(3), grid(4, 4), budget=10)


def test_all_minors_of_triangle():
    ms = all_minors(clique(3))
    # every graph on <= 3 vertices: 1 + 1 + 2 + 4
    assert len(ms) == 8


def test_longest_path_values():
    assert longest_path_order(path(3)) == 4
    assert longest_path_order(star(4)) == 3
    assert longest_path_order(clique(4)) == 4
    assert longest_path_order(Graph.make([], [])) == 0
    assert longest_path_order(Graph.make(["a"], [])) == 1


def test_longest_path_matches_brute_force():
    rng = random.Random(5)
    for _ in range(25):
        G = random_graph(rng, rng.randint(1, 6))
        assert longest_path_order(G) == brute_longest_path(G)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**15 - 1))
def test_canonical_key_stable_under_renaming(bits):
    vs = ["a", "b", "c", "d", "e", "f"]
    pairs = [(x, y) for i, x in enumerate(vs) for y in vs[i + 1 :]]
    es = [p for i, p in enumerate(pairs) if bits >> i & 1]
    G = Graph.make(vs, es)
    ren = {v: f"node_{9 - i}" for i, v in enumerate(vs)}
    H = Graph.make(
        [ren[v] for v in vs], [(ren[a], ren[b]) for a, b in es]
    )
    assert canonical_key(G.to_structure()) == canonical_key(H.to_structure())
    assert isomorphic(G.to_structure(), H.to_structure())


def test_iso_negative():
    assert not isomorphic(path(3).to_structure(), star(3).to_structure())
