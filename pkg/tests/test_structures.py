import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msohier.errors import MalformedError
from msohier.iso import isomorphic
from msohier.structures import (
    RelationalStructure,
    Signature,
    disjoint_union,
    example_structure,
    from_incidence,
    gaifman,
    incidence_signature,
    infer_incidence_base,
    is_k_sparse,
    signature,
    to_incidence,
)
from util import random_structure


def test_signature_rejects_duplicates():
    with pytest.raises(MalformedError):
        Signature((("R", 2), ("R", 3)))


def test_signature_rejects_zero_arity():
    with pytest.raises(MalformedError):
        signature(("R", 0))


def test_make_checks_arity_and_domain():
    sig = signature(("R", 2))
    with pytest.raises(MalformedError):
        RelationalStructure.make(sig, ["a"], {"R": [("a",)]})
    with pytest.raises(MalformedError):
        RelationalStructure.make(sig, ["a"], {"R": [("a", "b")]})
    with pytest.raises(MalformedError):
        RelationalStructure.make(sig, ["a"], {"S": []})


def test_domain_is_sorted_and_deduped():
    A = RelationalStructure.make(signature(("R", 1)), ["b", "a", "b"], {})
    assert A.domain == ("a", "b")


def test_example_structure_shape():
    A = example_structure()
    assert A.domain == ("a", "b", "c", "d", "e")
    assert A.rel("R") == frozenset(
        {("a", "b", "c"), ("a", "b", "d"), ("a", "b", "e")}
    )


def test_incidence_of_example():
    I = to_incidence(example_structure())
    assert set(I.a_part) == set("abcde")
    assert sorted(I.e_part) == ["R(a,b,c)", "R(a,b,d)", "R(a,b,e)"]
    S = I.structure
    assert S.rel("P_R") == frozenset({(e,) for e in I.e_part})
    # position relations point element -> tuple
    assert ("a", "R(a,b,c)") in S.rel("in_0")
    assert ("b", "R(a,b,c)") in S.rel("in_1")
    assert ("c", "R(a,b,c)") in S.rel("in_2")


def test_incidence_signature_symbols():
    sig = signature(("R", 3), ("S", 1))
    inc = incidence_signature(sig)
    assert set(inc.symbols) == {"P_R", "P_S", "in_0", "in_1", "in_2"}


def test_example_is_1_sparse():
    I = to_incidence(example_structure())
    ok, witness = is_k_sparse(I.structure, 1)
    assert ok and witness is None


def test_sparsity_witness_found():
    # a dense binary structure is not 1-sparse: K_3 has 6 directed pairs
    # over 3 elements, and already {a, b} holds 4 > 2 of them
    A = RelationalStructure.make(
        signature(("E", 2)),
        ["a", "b", "c"],
        {"E": [(x, y) for x in "abc" for y in "abc" if x != y]},
    )
    ok, witness = is_k_sparse(A, 1)
    assert not ok and witness is not None
    subset, symbol = witness
    assert symbol == "E"
    assert len([t for t in A.rel("E") if set(t) <= subset]) > len(subset)


def test_incidence_roundtrip_example():
    A = example_structure()
    assert isomorphic(from_incidence(to_incidence(A)), A)


def test_incidence_roundtrip_seeded():
    rng = random.Random(11)
    for _ in range(100):
        A = random_structure(rng)
        I = to_incidence(A)
        assert is_k_sparse(I.structure, 1)[0]
        assert isomorphic(from_incidence(I), A)


def test_name_collision_gets_primes():
    # an element literally named like a tuple tag forces renaming
    A = RelationalStructure.make(
        signature(("R", 1)),
        ["a", "R(a)"],
        {"R": [("a",), ("R(a)",)]},
    )
    I = to_incidence(A)
    assert len(set(I.structure.domain)) == 4
    assert isomorphic(from_incidence(I), A)


def test_infer_incidence_base():
    I = to_incidence(example_structure())
    base = infer_incidence_base(I.structure)
    assert base.arities == {"R": 3}


def test_infer_incidence_base_rejects_plain():
    with pytest.raises(MalformedError):
        infer_incidence_base(example_structure())


def test_gaifman_of_example():
    G = gaifman(example_structure())
    assert G.has_edge("a", "b")
    assert G.has_edge("b", "c")
    assert not G.has_edge("c", "d")


def test_disjoint_union_sizes():
    A = example_structure()
    U = disjoint_union(A, A)
    assert len(U.domain) == 2 * len(A.domain)
    assert len(U.rel("R")) == 2 * len(A.rel("R"))


names = st.lists(
    st.text(alphabet="abcdef", min_size=1, max_size=3),
    min_size=1,
    max_size=6,
    unique=True,
)


@settings(max_examples=60, deadline=None)
@given(names, st.integers(0, 4095))
def test_incidence_roundtrip_property(dom, bits):
    pairs = [(a, b) for a in dom for b in dom]
    rel = [p for i, p in enumerate(pairs) if bits >> i & 1]
    A = RelationalStructure.make(signature(("E", 2)), dom, {"E": rel})
    I = to_incidence(A)
    assert is_k_sparse(I.structure, 1)[0]
    assert isomorphic(from_incidence(I), A)
