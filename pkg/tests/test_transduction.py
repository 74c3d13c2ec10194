"""Definition schemes, transductions, backwards translation, composition."""
from __future__ import annotations

import itertools
import random

import pytest

from msohier.errors import BudgetError, MalformedError
from msohier.logic import evaluate, parse_formula, random_formula, rank
from msohier.structures import RelationalStructure, Signature
from msohier.transduction import (
    BUILTIN_NAMES,
    DefinitionScheme,
    Transduction,
    apply,
    apply_all,
    apply_basic,
    backwards,
    backwards_closed,
    builtin,
    compose,
    copy_structure,
    expand,
)

from util import all_edge_structures, structure_iso

SIG_E = Signature((("edg", 2),))
TRUE = parse_formula("true")


def edge_struct(n, edges):
    names = [f"v{i}" for i in range(n)]
    return RelationalStructure.make(
        SIG_E, names, {"edg": [(names[a], names[b]) for a, b in edges]}
    )


P2 = edge_struct(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
K3 = edge_struct(3, [(a, b) for a in range(3) for b in range(3) if a != b])


def chain_order(n):
    names = [f"w{i}" for i in range(n)]
    le = [(names[i], names[j]) for i in range(n) for j in range(i, n)]
    return RelationalStructure.make(Signature((("le", 2),)), names, {"le": le})


# -- scheme construction ----------------------------------------------------


def test_scheme_checks_formula_scopes():
    with pytest.raises(MalformedError):  # phi for a symbol not in the output
        DefinitionScheme.make(SIG_E, TRUE, TRUE, {"edg": TRUE, "ghost": TRUE})
    with pytest.raises(MalformedError):  # missing phi
        DefinitionScheme.make(SIG_E, TRUE, TRUE, {})
    with pytest.raises(MalformedError):  # chi must be a sentence
        DefinitionScheme.make(SIG_E, parse_formula("(empty X)"), TRUE, {"edg": TRUE})
    with pytest.raises(MalformedError):  # delta sees only x
        DefinitionScheme.make(SIG_E, TRUE, parse_formula("(in y Y)"), {"edg": TRUE})
    with pytest.raises(MalformedError):  # phi sees only x1..xr
        DefinitionScheme.make(SIG_E, TRUE, TRUE, {"edg": parse_formula("(empty Z)")})


def test_transduction_checks():
    with pytest.raises(MalformedError):
        Transduction.make(SIG_E, 0, 0, SIG_E, TRUE, TRUE, {"edg": TRUE})
    with pytest.raises(MalformedError):
        Transduction.make(SIG_E, 1, -1, SIG_E, TRUE, TRUE, {"edg": TRUE})
    with pytest.raises(MalformedError):  # unknown symbol in a formula
        Transduction.make(
            SIG_E, 1, 0, SIG_E, TRUE, TRUE, {"edg": parse_formula("(rel nope x1)")}
        )
    # sim / P0 / Q0 are legal inside schemes of a (2-copy, 1-param) transduction
    Transduction.make(
        SIG_E,
        2,
        1,
        SIG_E,
        TRUE,
        parse_formula("(or (rel P0 x) (rel Q0 x))"),
        {"edg": parse_formula("(rel sim x1 x2)")},
    )


def test_unknown_builtin():
    with pytest.raises(MalformedError):
        builtin("frobnicate")
    assert set(BUILTIN_NAMES) == {
        "identity",
        "complement",
        "restrict",
        "double",
        "mark",
        "order_to_successor",
        "successor_to_order",
    }


# -- enrichment -------------------------------------------------------------


def test_copy_structure_shape():
    C = copy_structure(P2, 2)
    assert len(C.domain) == 6
    sim = C.rel("sim")
    # sim joins the copies of each original element, both ways plus loops
    assert ("v0#0", "v0#1") in sim and ("v0#1", "v0#0") in sim
    assert ("v0#0", "v0#0") in sim
    p0 = {t[0] for t in C.rel("P0")}
    p1 = {t[0] for t in C.rel("P1")}
    assert p0 == {f"{a}#0" for a in P2.domain}
    assert p1 == {f"{a}#1" for a in P2.domain}
    # input relations hold inside each copy, never across copies
    for x, y in C.rel("edg"):
        assert x[-2:] == y[-2:]
    assert ("v0#1", "v1#1") in C.rel("edg")
    # a single copy keeps the original names
    assert copy_structure(P2, 1).domain == P2.domain


def test_expand_marks_parameters():
    X = expand(P2, [frozenset({"v0", "v2"})])
    assert {t[0] for t in X.rel("Q0")} == {"v0", "v2"}
    assert X.signature.arity("Q0") == 1


# -- applying ---------------------------------------------------------------


def test_identity():
    assert apply(builtin("identity"), P2) == P2
    assert apply(builtin("identity"), K3) == K3


def test_complement():
    out = apply(builtin("complement"), K3)
    assert out is not None
    assert out.rel("edg") == frozenset()
    empty3 = edge_struct(3, [])
    again = apply(builtin("complement"), empty3)
    assert again.rel("edg") == K3.rel("edg")


def test_restrict():
    out = apply(builtin("restrict"), P2, [["v0", "v1"]])
    assert out is not None
    assert set(out.domain) == {"v0", "v1"}
    assert out.rel("edg") == frozenset({("v0", "v1"), ("v1", "v0")})


def test_double():
    out = apply(builtin("double"), P2)
    assert out is not None
    assert len(out.domain) == 6


def test_mark():
    out = apply(builtin("mark"), P2, [["v1"]])
    assert out is not None
    assert out.rel("mark") == frozenset({("v1",)})
    assert out.rel("edg") == P2.rel("edg")


def test_order_successor_round_trip():
    W = chain_order(4)
    succ = apply(builtin("order_to_successor"), W)
    assert succ is not None
    assert succ.rel("edg") == frozenset(
        {("w0", "w1"), ("w1", "w2"), ("w2", "w3")}
    )
    back = apply(builtin("successor_to_order"), succ)
    assert back == W


def test_apply_rejects_mismatches():
    with pytest.raises(MalformedError):
        apply(builtin("identity"), P2, [["v0"]])  # extra parameter
    with pytest.raises(MalformedError):
        apply(builtin("restrict"), P2)  # missing parameter
    with pytest.raises(MalformedError):
        apply(builtin("order_to_successor"), P2)  # signature mismatch


def test_apply_all_sweeps_and_budget():
    outs = apply_all(builtin("restrict"), P2)
    # every subset of a 3-element domain is a defined valuation
    assert len(outs) == 8
    sizes = sorted(len(s.domain) for _, s in outs)
    assert sizes == [0, 1, 1, 1, 2, 2, 2, 3]
    with pytest.raises(BudgetError):
        apply_all(builtin("restrict"), P2, budget=4)


def test_precondition_can_reject():
    tau = Transduction.make(
        SIG_E,
        1,
        0,
        SIG_E,
        parse_formula("(exists x (exists y (rel edg x y)))"),
        TRUE,
        {"edg": parse_formula("(rel edg x1 x2)")},
    )
    assert apply(tau, edge_struct(2, [])) is None
    assert apply(tau, K3) is not None


# -- backwards translation --------------------------------------------------


def test_backwards_law_builtins():
    rng = random.Random(23)
    structs = list(all_edge_structures(2)) + [P2, K3]
    orders = [chain_order(n) for n in (1, 2, 3)]
    sentences = [random_formula(rng, SIG_E, [], 2) for _ in range(12)]
    le_sentences = [
        random_formula(rng, Signature((("le", 2),)), [], 2) for _ in range(6)
    ]
    for name in BUILTIN_NAMES:
        tau = builtin(name)
        fs = le_sentences if tau.output_signature.symbols == ("le",) else sentences
        ins = orders if tau.input_signature.symbols == ("le",) else structs
        for f in fs:
            g = backwards(tau, f)
            for A in ins:
                subsets = [frozenset(), frozenset(A.domain[:1]), frozenset(A.domain)]
                for val in itertools.product(subsets, repeat=tau.params):
                    out = apply(tau, A, val)
                    want = out is not None and evaluate(out, f)
                    assert evaluate(expand(A, val), g) == want, (name, f)


def test_backwards_closed_is_existential():
    tau = builtin("restrict")
    f = parse_formula("(exists x (exists y (and (not (eq x y)) (rel edg x y))))")
    g = backwards_closed(tau, f)
    # some restriction of P2 has an edge between two distinct vertices
    assert evaluate(P2, g)
    # no restriction of an edgeless structure does
    assert not evaluate(edge_struct(3, []), g)


# -- composition ------------------------------------------------------------


def test_compose_runs_inner_first():
    # complement then restrict != restrict then complement in general;
    # compose(sigma, tau) must apply tau first
    comp = compose(builtin("complement"), builtin("identity"))
    out = apply(comp, K3)
    assert out is not None and out.rel("edg") == frozenset()


def test_compose_matches_two_stage():
    rng = random.Random(29)
    pairs = [
        (builtin("complement"), builtin("complement")),
        (builtin("identity"), builtin("double")),
        (builtin("double"), builtin("complement")),
        (builtin("complement"), builtin("double")),
    ]
    structs = [edge_struct(2, [(0, 1)]), P2, K3]
    for sigma, tau in pairs:
        comp = compose(sigma, tau)
        assert comp.copies == sigma.copies * tau.copies
        assert comp.params == tau.params + tau.copies * sigma.params
        for A in structs:
            mid = apply(tau, A)
            expected = None if mid is None else apply(sigma, mid)
            got = apply(comp, A)
            if expected is None:
                assert got is None
            else:
                assert got is not None
                assert structure_iso(got, expected), (A.domain, sigma, tau)


def test_compose_with_params_two_stage():
    # restrict after restrict: valuation splits into tau's part then
    # sigma's part lifted through the copies
    comp = compose(builtin("restrict"), builtin("restrict"))
    assert comp.params == 2
    A = P2
    first = apply(builtin("restrict"), A, [["v0", "v1"]])
    second = apply(builtin("restrict"), first, [["v1"]])
    got = apply(comp, A, [["v0", "v1"], ["v1"]])
    assert got is not None
    assert structure_iso(got, second)
