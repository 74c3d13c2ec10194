import pytest

from msohier.errors import MalformedError
from msohier.trees import (
    ColouredTree,
    ORDER_MODE,
    SUCCESSOR_MODE,
    TreeDomain,
    all_tree_domains,
    complete_tree,
    convert_tree,
    embed_order_tree,
    horizontally_related,
    vertex_from_str,
    vertex_to_str,
)


def test_vertex_strings():
    assert vertex_to_str(()) == ""
    assert vertex_to_str((0, 1)) == "01"
    assert vertex_from_str("01") == (0, 1)
    assert vertex_from_str("") == ()
    with pytest.raises(MalformedError):
        vertex_from_str("0!")


def test_prefix_closure_enforced():
    with pytest.raises(MalformedError):
        TreeDomain.make([(0, 1)])


def test_basic_queries():
    T = TreeDomain.make([(), (0,), (1,), (0, 0)])
    assert T.height == 3  # levels, not edges
    assert T.children(()) == ((0,), (1,))
    assert T.parent((0, 0)) == (0,)
    assert T.parent(()) is None
    assert T.leaves() == ((0, 0), (1,))
    assert T.subtree((0,)) == frozenset({(0,), (0, 0)})
    assert TreeDomain.meet((0, 0), (0, 1)) == (0,)
    assert TreeDomain.meet((0,), (1, 0)) == ()


def test_complete_tree_count():
    T = complete_tree(2, 3)
    assert len(T) == 7  # 1 + 2 + 4
    assert T.height == 3
    assert complete_tree(3, 2).height == 2
    assert len(complete_tree(1, 4)) == 4
    assert TreeDomain.make([]).height == 0


def test_sorted_vertices_is_preorder():
    T = complete_tree(2, 3)
    sv = T.sorted_vertices
    assert sv[0] == ()
    # lexicographic tuple order == depth-first preorder
    assert list(sv) == sorted(T.vertices)


def test_coloured_tree_structures():
    T = ColouredTree(complete_tree(2, 2), SUCCESSOR_MODE, (frozenset({(0,)}),))
    S = T.to_structure()
    assert S.rel("edg") == frozenset({("", "0"), ("", "1")})
    assert S.rel("P0") == frozenset({("0",)})
    O = ColouredTree(complete_tree(2, 2), ORDER_MODE).to_structure()
    assert ("", "0") in O.rel("le")
    assert ("", "") in O.rel("le")  # reflexive
    assert ("0", "1") not in O.rel("le")


def test_colour_outside_domain_rejected():
    with pytest.raises(MalformedError):
        ColouredTree(complete_tree(2, 2), SUCCESSOR_MODE, (frozenset({(5,)}),))


def test_convert_tree_roundtrip():
    T = ColouredTree(complete_tree(2, 3), SUCCESSOR_MODE)
    O = convert_tree(T)
    assert O.mode == ORDER_MODE
    back = convert_tree(O)
    assert back.mode == SUCCESSOR_MODE
    assert back.domain.vertices == T.domain.vertices


def test_embed_order_tree():
    S = TreeDomain.make([(), (0,), (0, 0)])  # a 3-chain
    T = complete_tree(2, 3)
    emb = embed_order_tree(S, T)
    assert emb is not None
    for u in S.vertices:
        for v in S.vertices:
            assert TreeDomain.is_prefix(u, v) == TreeDomain.is_prefix(emb[u], emb[v])
    # a 3-star of siblings cannot embed into a binary tree of height 2
    S2 = TreeDomain.make([(), (0,), (1,), (2,)])
    assert embed_order_tree(S2, complete_tree(2, 2)) is None


def test_horizontally_related():
    T = complete_tree(2, 3)
    assert horizontally_related(T, [(0, 1), (1, 0)]) == ()
    assert horizontally_related(T, [(0, 0), (0, 1)]) == (0,)
    assert horizontally_related(T, [(0,), (0, 1)]) is None  # levels differ


def test_all_tree_domains_counts():
    # unordered rooted trees on exactly n nodes: 1, 1, 2, 4, 9 for n = 1..5;
    # the enumeration is cumulative and includes the empty shape
    sizes = [1, 1, 2, 4, 9]
    expected = 1 + sum(sizes)
    got = all_tree_domains(5, 5)
    assert len(got) == expected
    assert len({tuple(sorted(T.vertices)) for T in got}) == len(got)
    for T in all_tree_domains(6, 2):
        assert T.height <= 2
