"""Partition refinements of incidence structures."""
from __future__ import annotations

import json
import random

import pytest

from msohier.decomposition import validate
from msohier.errors import MalformedError, ScopeError
from msohier.logic import parse_formula
from msohier.partition import (
    PartitionRefinement,
    external_classes,
    incidence_links,
    random_refinement,
    refinement_from_interpretation,
    to_tree_decomposition,
    validate_refinement,
)
from msohier.serialize import refinement_from_json
from msohier.structures import (
    example_structure,
    from_incidence,
    signature,
    to_incidence,
)
from msohier.transduction import DefinitionScheme
from msohier.trees import ColouredTree, TreeDomain, complete_tree

from util import random_structure

I_EX = to_incidence(example_structure())


def load_fixture():
    with open("fixtures/refinement4.json") as fh:
        return refinement_from_json(json.load(fh), I_EX)


# -- the hand-built fixture -------------------------------------------------


def test_fixture_is_valid_width_4():
    pi = load_fixture()
    report = validate_refinement(pi)
    assert report.valid, report.violations
    assert report.width == 4
    assert pi.width == 4


def test_fixture_converts_within_bound():
    pi = load_fixture()
    D = to_tree_decomposition(pi)
    assert D.width == 2
    # arity 3 gives the (3 + 3) * 4 ceiling
    assert D.width < 24
    assert validate(D, from_incidence(I_EX)) == []


# -- axiom violations are each detected -------------------------------------


def edit_fixture(**overrides):
    pi = load_fixture()
    blocks = dict(pi.block_map)
    classes = dict(pi.class_map)
    blocks.update(overrides.get("blocks", {}))
    classes.update(overrides.get("classes", {}))
    return PartitionRefinement.make(pi.structure, pi.tree, blocks, classes)


def test_detects_wrong_root_block():
    pi = load_fixture()
    blocks = dict(pi.block_map)
    blocks[()] = blocks[()] - {"a"}
    classes = dict(pi.class_map)
    classes[()] = tuple(c - {"a"} for c in classes[()] if c - {"a"})
    broken = PartitionRefinement.make(pi.structure, pi.tree, blocks, classes)
    report = validate_refinement(broken)
    assert not report.valid
    assert any("root block" in v for v in report.violations)


def test_detects_class_partition_failure():
    pi = load_fixture()
    classes = dict(pi.class_map)
    classes[()] = classes[()][1:]  # drop one class
    broken = PartitionRefinement.make(pi.structure, pi.tree, dict(pi.block_map), classes)
    assert any(
        "partition the block" in v for v in validate_refinement(broken).violations
    )


def test_detects_children_not_partitioning():
    pi = load_fixture()
    blocks = dict(pi.block_map)
    blocks[(0,)] = blocks[(0,)] | {"b"}  # b also lives under (1,)
    broken = PartitionRefinement.make(pi.structure, pi.tree, blocks, dict(pi.class_map))
    report = validate_refinement(broken)
    assert any("children's blocks" in v for v in report.violations)


def test_detects_non_singleton_leaf():
    pi = load_fixture()
    # graft the block of an inner vertex onto a fresh leaf-only tree
    tree = TreeDomain.make([(), (0,), (1,)])
    dom = frozenset(pi.structure.domain)
    a_and_b = frozenset({"a", "b"})
    blocks = {(): dom, (0,): a_and_b, (1,): dom - a_and_b}
    classes = {
        v: external_classes(pi.structure, blocks, tree, v)
        for v in tree.sorted_vertices
    }
    broken = PartitionRefinement.make(pi.structure, tree, blocks, classes)
    report = validate_refinement(broken)
    assert any("leaf block" in v for v in report.violations)


def test_detects_upward_coarsening_failure():
    pi = load_fixture()
    classes = dict(pi.class_map)
    # at the root, split {c, d, e} so that a deeper class straddles it
    whole = next(c for c in classes[()] if c == frozenset({"c", "d", "e"}))
    classes[()] = tuple(c for c in classes[()] if c != whole) + (
        frozenset({"c"}),
        frozenset({"d", "e"}),
    )
    broken = PartitionRefinement.make(pi.structure, pi.tree, dict(pi.block_map), classes)
    report = validate_refinement(broken)
    assert any("not at" in v for v in report.violations)


def test_detects_external_disagreement():
    pi = load_fixture()
    classes = dict(pi.class_map)
    # merging {a} with {b} at the root breaks the external condition:
    # a sits in position 0 of every tuple, b in position 1
    keep = [c for c in classes[()] if c not in (frozenset({"a"}), frozenset({"b"}))]
    classes[()] = tuple(keep) + (frozenset({"a", "b"}),)
    broken = PartitionRefinement.make(pi.structure, pi.tree, dict(pi.block_map), classes)
    report = validate_refinement(broken)
    assert not report.valid
    assert any("external link" in v for v in report.violations)


def test_detects_sort_mixing():
    pi = load_fixture()
    classes = dict(pi.class_map)
    flat = [c for c in classes[()]]
    # unite an element class with the tuple class
    tuples = next(c for c in flat if c & frozenset(pi.structure.e_part))
    elem = next(c for c in flat if c == frozenset({"b"}))
    rest = [c for c in flat if c not in (tuples, elem)]
    classes[()] = tuple(rest) + (tuples | elem,)
    broken = PartitionRefinement.make(pi.structure, pi.tree, dict(pi.block_map), classes)
    assert any("sorts" in v for v in validate_refinement(broken).violations)


def test_make_rejects_foreign_vertices():
    pi = load_fixture()
    with pytest.raises(MalformedError):
        PartitionRefinement.make(
            pi.structure, pi.tree, {(9, 9): frozenset()}, dict(pi.class_map)
        )


# -- generated refinements --------------------------------------------------


def test_random_refinements_valid_and_convertible():
    rng = random.Random(31)
    for _ in range(40):
        A = random_structure(rng, max_elems=5, max_arity=3, max_symbols=2)
        if not A.domain:
            continue
        I = to_incidence(A)
        pi = random_refinement(I, rng)
        report = validate_refinement(pi)
        assert report.valid, report.violations
        D = to_tree_decomposition(pi)
        assert validate(D, A) == []
        r = I.base_signature.max_arity
        assert D.width < (r + 3) * pi.width


def test_external_classes_are_coarsest_safe():
    # refining any external class further must stay valid; merging the two
    # halves of a split profile is exactly what validation rejects
    I = I_EX
    pi = random_refinement(I, random.Random(3))
    report = validate_refinement(pi)
    assert report.valid
    # every class computed by external_classes is reproduced by re-running it
    links = incidence_links(I)
    for v in pi.tree.sorted_vertices:
        again = external_classes(I, pi.block_map, pi.tree, v, links)
        assert again == pi.node_classes(v)


# -- refinements from tree interpretations ----------------------------------


def interpretation_scheme():
    leaf = "(not (exists y (rel edg x1 y)))"
    lv = lambda v: leaf.replace("x1", v)
    return DefinitionScheme.make(
        signature(("P_Q", 1), ("in_0", 2)),
        parse_formula("true"),
        parse_formula(lv("x")),
        {
            "P_Q": parse_formula(f"(and {lv('x1')} (rel P0 x1))"),
            "in_0": parse_formula(
                f"(and {lv('x1')} {lv('x2')} (rel P0 x2) (not (rel P0 x1))"
                " (exists z (and (rel edg z x1) (rel edg z x2))))"
            ),
        },
    )


def test_refinement_from_interpretation():
    dom = complete_tree(2, 3)
    right = frozenset(v for v in dom.vertices if len(v) == 2 and v[-1] == 1)
    T = ColouredTree(dom, colours=(right,))
    pi = refinement_from_interpretation(interpretation_scheme(), T)
    assert validate_refinement(pi).valid
    D = to_tree_decomposition(pi)
    A = from_incidence(pi.structure)
    assert validate(D, A) == []
    # widths across growing trees stay bounded by the number of types
    widths = []
    for n in (3, 4):
        dn = complete_tree(2, n)
        rn = frozenset(v for v in dn.vertices if len(v) == n - 1 and v[-1] == 1)
        pn = refinement_from_interpretation(
            interpretation_scheme(), ColouredTree(dn, colours=(rn,))
        )
        widths.append(pn.width)
    assert widths[1] <= widths[0] + 2  # no blow-up with tree size


def test_interpretation_rejects_inner_elements():
    # a scheme keeping every vertex puts non-leaves in the output
    sch = DefinitionScheme.make(
        signature(("P_Q", 1)),
        parse_formula("true"),
        parse_formula("true"),
        {"P_Q": parse_formula("false")},
    )
    dom = complete_tree(2, 2)
    T = ColouredTree(dom, colours=(frozenset(),))
    with pytest.raises(ScopeError):
        refinement_from_interpretation(sch, T)
