"""JSON round trips and byte-level determinism."""
from __future__ import annotations

import json
import random

import pytest

from msohier.decomposition import dfs_decomposition, exact_width
from msohier.encodings import decomposition_encode, grid_encode, tree_word_encode
from msohier.errors import BudgetError, MalformedError, ScopeError
from msohier.families import grid, path
from msohier.graphs import Graph
from msohier.partition import random_refinement
from msohier.serialize import (
    decomposition_code_from_json,
    decomposition_code_to_json,
    decomposition_from_json,
    decomposition_to_json,
    coloured_tree_from_json,
    coloured_tree_to_json,
    dump_json,
    error_to_json,
    formula_from_json,
    formula_to_json,
    graph_from_json,
    graph_to_json,
    grid_code_from_json,
    grid_code_to_json,
    load_graph,
    refinement_from_json,
    refinement_to_json,
    scheme_from_json,
    scheme_to_json,
    signature_from_json,
    signature_to_json,
    structure_from_json,
    structure_to_json,
    transduction_from_json,
    transduction_to_json,
    tree_from_json,
    tree_to_json,
    word_from_text,
    word_to_text,
)
from msohier.structures import example_structure, signature, to_incidence
from msohier.logic import parse_formula
from msohier.transduction import BUILTIN_NAMES, builtin
from msohier.trees import ColouredTree, TreeDomain, complete_tree

from util import random_structure

EX = example_structure()


def test_signature_roundtrip():
    sig = signature(("R", 3), ("edg", 2))
    assert signature_from_json(signature_to_json(sig)) == sig
    with pytest.raises(MalformedError):
        signature_from_json({"relations": [{"name": "R"}]})


def test_structure_constants_roundtrip():
    # constants ride on the structure document, not the bare signature list
    from msohier.structures import RelationalStructure

    sig = signature(("edg", 2), constants=("root",))
    A = RelationalStructure.make(
        sig, ["u", "v"], {"edg": [("u", "v")]}, {"root": "u"}
    )
    assert structure_from_json(structure_to_json(A)) == A


def test_structure_roundtrip_and_bytes():
    assert structure_from_json(structure_to_json(EX)) == EX
    s1 = dump_json(structure_to_json(EX))
    s2 = dump_json(structure_to_json(structure_from_json(json.loads(s1))))
    assert s1 == s2
    assert s1.endswith("\n")


def test_structure_roundtrip_random():
    rng = random.Random(47)
    for _ in range(40):
        A = random_structure(rng, max_elems=6, max_arity=3, max_symbols=2)
        assert structure_from_json(structure_to_json(A)) == A


def test_graph_roundtrip_and_loader():
    G = grid(2, 2)
    assert graph_from_json(graph_to_json(G)) == G
    # load_graph also accepts a structure document with an edg relation
    doc = structure_to_json(G.to_structure())
    assert load_graph(doc) == G
    with pytest.raises(MalformedError):
        load_graph({"nope": 1})


def test_tree_roundtrips():
    T = complete_tree(2, 3)
    assert tree_from_json(tree_to_json(T)) == T
    C = ColouredTree(T, colours=(frozenset({(0,), (1,)}), frozenset({()})))
    assert coloured_tree_from_json(coloured_tree_to_json(C)) == C
    O = ColouredTree(T, mode="order")
    back = coloured_tree_from_json(coloured_tree_to_json(O))
    assert back.mode == "order" and back == O


def test_decomposition_roundtrip():
    D = dfs_decomposition(grid(2, 3))
    assert decomposition_from_json(decomposition_to_json(D)) == D


def test_refinement_roundtrip():
    I = to_incidence(EX)
    pi = random_refinement(I, random.Random(5))
    data = refinement_to_json(pi)
    again = refinement_from_json(data, I)
    assert again == pi
    assert dump_json(refinement_to_json(again)) == dump_json(data)


def test_formula_roundtrip():
    f = parse_formula("(exists x (forall-set Y (or (in x Y) (card Y 1 2))))")
    assert formula_from_json(formula_to_json(f)) == f
    assert isinstance(formula_to_json(f), str)


def test_scheme_and_transduction_roundtrip():
    for name in BUILTIN_NAMES:
        tau = builtin(name)
        assert transduction_from_json(transduction_to_json(tau)) == tau
        sch = tau.scheme
        assert scheme_from_json(scheme_to_json(sch)) == sch


def test_word_text_roundtrip():
    word = tree_word_encode(complete_tree(2, 3), 3)
    text = word_to_text(word)
    assert word_from_text(text) == word
    assert word_from_text("0 1 1") == (0, 1, 1)
    assert word_from_text("") == ()
    with pytest.raises(MalformedError):
        word_from_text("0 x 1")


def test_grid_code_roundtrip():
    code = grid_encode(EX)
    again = grid_code_from_json(grid_code_to_json(code))
    assert again == code
    assert dump_json(grid_code_to_json(again)) == dump_json(grid_code_to_json(code))


def test_decomposition_code_roundtrip():
    A = path(4).to_structure()
    w, D = exact_width(A, "twd")
    code = decomposition_encode(A, D, w)
    again = decomposition_code_from_json(decomposition_code_to_json(code))
    assert again == code


def test_error_projection():
    assert error_to_json(MalformedError("x"))["error"] == "malformed"
    assert error_to_json(BudgetError("x"))["error"] == "budget"
    assert error_to_json(ScopeError("x"))["error"] == "scope"
    assert error_to_json(ValueError("x"))["error"] == "internal"
    assert error_to_json(MalformedError("boom"))["message"] == "boom"
