"""Transductions between classes of relational structures.

A transduction here is the composite of three primitive operations, applied
to an input structure A in this order:

1. expansion: p parameter sets, given as subsets of the domain of A and
   recorded as fresh unary relations Q0..Q{p-1};
2. copying: k disjoint copies of the expanded structure, with unary markers
   P0..P{k-1} for the copy index and a binary relation ``sim`` joining the
   copies of one element (input relations hold within each copy);
3. a basic definition scheme over the enriched structure: a precondition
   sentence, a domain formula with free element variable ``x``, and one
   formula with free variables x1..xr per output relation.

Everything downstream -- backwards translation of formulas and symbolic
composition -- is organised around this normal form.  Backwards translation
is pointwise in the parameters: the translated formula speaks about the
expansion of A by Q0..Q{p-1}, and an existential closure over the parameters
is a separate (rank-increasing) step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BudgetError, MalformedError
from .logic import (
    And,
    Bottom,
    Card,
    Empty,
    Eq,
    ExistsElem,
    ExistsSet,
    ForallElem,
    ForallSet,
    Formula,
    In,
    Not,
    Or,
    Rel,
    Singleton,
    Sub,
    Top,
    all_var_names,
    children,
    conjoin,
    disjoin,
    evaluate,
    free_vars,
    fresh_var,
    implies,
    map_children,
    neg,
    rename_free,
)
from .structures import RelationalStructure, Signature, signature

_QUANT = (ExistsSet, ForallSet, ExistsElem, ForallElem)


def scheme_vars(arity: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(arity))


@dataclass(frozen=True)
class DefinitionScheme:
    """A basic (non-copying) definition scheme: precondition sentence,
    domain formula over ``x``, and per-relation formulas over x1..xr."""

    output_signature: Signature
    chi: Formula
    delta: Formula
    phis: tuple[tuple[str, Formula], ...]

    @staticmethod
    def make(
        output_signature: Signature,
        chi: Formula,
        delta: Formula,
        phis: Mapping[str, Formula],
    ) -> "DefinitionScheme":
        missing = set(output_signature.symbols) - set(phis)
        if missing:
            raise MalformedError(f"no formula for output relations {sorted(missing)}")
        extra = set(phis) - set(output_signature.symbols)
        if extra:
            raise MalformedError(f"formulas for unknown relations {sorted(extra)}")
        if free_vars(chi):
            raise MalformedError("the precondition must be a sentence")
        if not free_vars(delta) <= {"x"}:
            raise MalformedError("the domain formula may only use x freely")
        for name in output_signature.symbols:
            allowed = set(scheme_vars(output_signature.arity(name)))
            if not free_vars(phis[name]) <= allowed:
                raise MalformedError(
                    f"formula for {name} may only use {sorted(allowed)} freely"
                )
        return DefinitionScheme(
            output_signature,
            chi,
            delta,
            tuple(sorted((n, phis[n]) for n in phis)),
        )

    @cached_property
    def phi_map(self) -> dict[str, Formula]:
        return dict(self.phis)


@dataclass(frozen=True)
class Transduction:
    input_signature: Signature
    copies: int
    params: int
    scheme: DefinitionScheme

    @staticmethod
    def make(
        input_signature: Signature,
        copies: int,
        params: int,
        output_signature: Signature,
        chi: Formula,
        delta: Formula,
        phis: Mapping[str, Formula],
    ) -> "Transduction":
        if copies < 1:
            raise MalformedError("a transduction makes at least one copy")
        if params < 0:
            raise MalformedError("negative parameter count")
        scheme = DefinitionScheme.make(output_signature, chi, delta, phis)
        tau = Transduction(input_signature, copies, params, scheme)
        enriched = set(tau.enriched_signature.symbols)
        for f in [chi, delta] + [p for _, p in scheme.phis]:
            for g in _walk(f):
                if isinstance(g, Rel) and g.symbol not in enriched:
                    raise MalformedError(
                        f"scheme formula uses {g.symbol!r}, "
                        f"not in the enriched input signature"
                    )
        return tau

    @cached_property
    def enriched_signature(self) -> Signature:
        extras = [("sim", 2)]
        extras += [(f"P{i}", 1) for i in range(self.copies)]
        extras += [(f"Q{j}", 1) for j in range(self.params)]
        return self.input_signature.merge(Signature(tuple(sorted(extras))))

    @property
    def output_signature(self) -> Signature:
        return self.scheme.output_signature


def _walk(f: Formula):
    yield f
    for c in children(f):
        yield from _walk(c)


# ---------------------------------------------------------------------------
# the forward direction


def expand(
    A: RelationalStructure, param_sets: Sequence[Iterable[str]]
) -> RelationalStructure:
    """Adjoin unary relations Q0..Q{p-1} holding on the given subsets."""
    extra = []
    dom = set(A.domain)
    for j, S in enumerate(param_sets):
        S = frozenset(S)
        if not S <= dom:
            raise MalformedError(f"parameter {j} leaves the domain")
        extra.append((f"Q{j}", [(a,) for a in sorted(S)]))
    if not extra:
        return A
    sig = Signature(tuple((n, 1) for n, _ in extra))
    return A.with_relations(dict(extra), sig)


def copy_element(a: str, i: int, k: int) -> str:
    return a if k == 1 else f"{a}#{i}"


def copy_structure(A: RelationalStructure, k: int) -> RelationalStructure:
    """k disjoint copies with copy markers P0..P{k-1} and the ``sim``
    relation linking the copies of each element.  Input relations hold
    within each copy."""
    if k < 1:
        raise MalformedError("need at least one copy")
    dom = [copy_element(a, i, k) for a in A.domain for i in range(k)]
    rels: dict[str, list[tuple[str, ...]]] = {}
    for name, tuples in A.relations:
        rels[name] = [
            tuple(copy_element(a, i, k) for a in t)
            for t in sorted(tuples)
            for i in range(k)
        ]
    rels["sim"] = [
        (copy_element(a, i, k), copy_element(a, j, k))
        for a in A.domain
        for i in range(k)
        for j in range(k)
    ]
    for i in range(k):
        rels[f"P{i}"] = [(copy_element(a, i, k),) for a in A.domain]
    extras = [("sim", 2)] + [(f"P{i}", 1) for i in range(k)]
    sig = A.signature.merge(Signature(tuple(sorted(extras))))
    return RelationalStructure.make(sig, dom, rels)


def apply_basic(
    scheme: DefinitionScheme, B: RelationalStructure, budget: int = 2_000_000
) -> Optional[RelationalStructure]:
    """Apply a basic scheme to B; None when the precondition fails."""
    if not evaluate(B, scheme.chi, {}, budget):
        return None
    dom = [
        d for d in B.domain if evaluate(B, scheme.delta, {"x": d}, budget)
    ]
    rels: dict[str, list[tuple[str, ...]]] = {}
    for name, arity in scheme.output_signature.relations:
        phi = scheme.phi_map[name]
        xs = scheme_vars(arity)
        rels[name] = [
            t
            for t in itertools.product(dom, repeat=arity)
            if evaluate(B, phi, dict(zip(xs, t)), budget)
        ]
    return RelationalStructure.make(scheme.output_signature, dom, rels)


def apply(
    tau: Transduction,
    A: RelationalStructure,
    params: Optional[Sequence[Iterable[str]]] = None,
    budget: int = 2_000_000,
) -> Optional[RelationalStructure]:
    """One output of tau on A, for a fixed parameter valuation.  None when
    the precondition rejects this valuation."""
    params = [frozenset(S) for S in (params or [])]
    if len(params) != tau.params:
        raise MalformedError(
            f"transduction takes {tau.params} parameter sets, got {len(params)}"
        )
    if A.signature != tau.input_signature:
        raise MalformedError("input signature mismatch")
    enriched = copy_structure(expand(A, params), tau.copies)
    return apply_basic(tau.scheme, enriched, budget)


def apply_all(
    tau: Transduction,
    A: RelationalStructure,
    params_iter: Optional[Iterable[Sequence[frozenset[str]]]] = None,
    budget: int = 4096,
    eval_budget: int = 2_000_000,
) -> list[tuple[tuple[frozenset[str], ...], RelationalStructure]]:
    """All defined outputs over a parameter sweep (the full powerset product
    by default, guarded by the budget)."""
    if params_iter is None:
        count = (1 << len(A.domain)) ** tau.params
        if count > budget:
            raise BudgetError(
                f"parameter sweep of {count} valuations exceeds budget {budget}"
            )
        subsets = [
            frozenset(c)
            for r in range(len(A.domain) + 1)
            for c in itertools.combinations(A.domain, r)
        ]
        params_iter = itertools.product(subsets, repeat=tau.params)
    out = []
    for val in params_iter:
        val = tuple(frozenset(S) for S in val)
        result = apply(tau, A, val, budget=eval_budget)
        if result is not None:
            out.append((val, result))
    return out


# ---------------------------------------------------------------------------
# formula surgery


def alpha_freshen(f: Formula, avoid: Iterable[str]) -> Formula:
    """Rename bound variables clashing with avoid (capture avoidance)."""
    avoid = set(avoid)

    def go(g: Formula, ren: dict[str, str], used: set[str]) -> Formula:
        if isinstance(g, _QUANT):
            name = g.var
            if name in avoid or name in used:
                name = fresh_var(g.var, avoid | used)
            used.add(name)
            inner = dict(ren)
            inner[g.var] = name
            return type(g)(name, go(g.body, inner, used))
        if isinstance(g, (Sub, Rel, Singleton, Empty, Card, In, Eq)):
            return rename_free(g, ren)
        return map_children(g, lambda c: go(c, ren, used))

    return go(f, {}, set(all_var_names(f)) | avoid)


def rename_relations(f: Formula, mapping: Mapping[str, str]) -> Formula:
    if isinstance(f, Rel):
        return Rel(mapping.get(f.symbol, f.symbol), f.vars)
    return map_children(f, lambda c: rename_relations(c, mapping))


def relativize_quantifiers(f: Formula, guard) -> Formula:
    """Restrict every quantifier: element ones to points satisfying
    guard(v), set ones to sets all of whose members satisfy it.  guard maps
    a variable name to a formula; returning Top() suppresses the guard."""

    def set_guard(var: str, inner_names: set[str]) -> Formula:
        w = fresh_var("w", inner_names | {var})
        g = guard(w)
        if isinstance(g, Top):
            return Top()
        return Not(ExistsElem(w, conjoin([In(w, var), Not(g)])))

    def go(g: Formula) -> Formula:
        if isinstance(g, (ExistsSet, ForallSet)):
            gd = set_guard(g.var, set(all_var_names(g.body)))
            body = go(g.body)
            if isinstance(g, ExistsSet):
                return ExistsSet(g.var, conjoin([gd, body]))
            return ForallSet(g.var, implies(gd, body))
        if isinstance(g, (ExistsElem, ForallElem)):
            gd = guard(g.var)
            body = go(g.body)
            if isinstance(g, ExistsElem):
                return ExistsElem(g.var, conjoin([gd, body]))
            return ForallElem(g.var, implies(gd, body))
        return map_children(g, go)

    return go(f)


# ---------------------------------------------------------------------------
# backwards translation through the basic scheme


def _is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, _QUANT) for g in _walk(f))


def _to_dnf(f: Formula, cap: int = 64) -> Optional[list[list[tuple[bool, Formula]]]]:
    """Quantifier-free formula as a list of clauses of signed atoms, or None
    if it would blow past the cap."""

    def nnf(g: Formula, pos: bool) -> Formula:
        if isinstance(g, Not):
            return nnf(g.body, not pos)
        if isinstance(g, And):
            parts = tuple(nnf(p, pos) for p in g.parts)
            return And(parts) if pos else Or(parts)
        if isinstance(g, Or):
            parts = tuple(nnf(p, pos) for p in g.parts)
            return Or(parts) if pos else And(parts)
        if isinstance(g, Top):
            return Top() if pos else Bottom()
        if isinstance(g, Bottom):
            return Bottom() if pos else Top()
        return g if pos else Not(g)

    def clauses(g: Formula) -> Optional[list[list[tuple[bool, Formula]]]]:
        if isinstance(g, Or):
            out = []
            for p in g.parts:
                sub = clauses(p)
                if sub is None:
                    return None
                out.extend(sub)
            return out if len(out) <= cap else None
        if isinstance(g, And):
            acc: list[list[tuple[bool, Formula]]] = [[]]
            for p in g.parts:
                sub = clauses(p)
                if sub is None:
                    return None
                acc = [a + b for a in acc for b in sub]
                if len(acc) > cap:
                    return None
            return acc
        if isinstance(g, Top):
            return [[]]
        if isinstance(g, Bottom):
            return []
        if isinstance(g, Not):
            return [[(False, g.body)]]
        return [[(True, g)]]

    return clauses(nnf(f, True))


def _exists_wrap(var_sets: Sequence[tuple[str, str]], body: Formula) -> Formula:
    """ExistsElem v in set S for each (v, S) pair, innermost first."""
    out = body
    for v, S in reversed(var_sets):
        out = ExistsElem(v, conjoin([In(v, S), out]))
    return out


def _translate_rel_all_sets(
    scheme: DefinitionScheme, symbol: str, sets: tuple[str, ...]
) -> Formula:
    """Backwards image of a hidden-existential relation atom whose positions
    are all set variables.  Factorises quantifier-free scheme formulas so
    single positive atoms over distinct variables stay atoms; everything
    else falls back to explicit element quantifiers."""
    phi = scheme.phi_map[symbol]
    xs = scheme_vars(len(sets))
    env = dict(zip(xs, sets))

    def fallback() -> Formula:
        inst = alpha_freshen(phi, sets)
        fresh = {}
        for x in xs:
            fresh[x] = fresh_var(f"e_{x}", set(sets) | set(all_var_names(inst)) | set(fresh.values()))
        inst = rename_free(inst, fresh)
        return _exists_wrap(
            [(fresh[x], env[x]) for x in xs], inst
        )

    if not _is_quantifier_free(phi):
        return fallback()
    dnf = _to_dnf(phi)
    if dnf is None:
        return fallback()
    out_clauses: list[Formula] = []
    for clause in dnf:
        atoms_by_var: dict[str, list[tuple[bool, Formula]]] = {x: [] for x in xs}
        adj: dict[str, set[str]] = {x: set() for x in xs}
        degenerate = False
        for signv, atom in clause:
            if isinstance(atom, Rel):
                vs = [v for v in atom.vars if v in env]
                if set(atom.vars) - set(vs):
                    degenerate = True  # mentions a non-slot name
                    break
            elif isinstance(atom, Eq):
                vs = [v for v in (atom.left, atom.right) if v in env]
                if {atom.left, atom.right} - set(vs):
                    degenerate = True
                    break
            else:
                degenerate = True
                break
            for v in vs:
                atoms_by_var[v].append((signv, atom))
                for u in vs:
                    if u != v:
                        adj[v].add(u)
        if degenerate:
            out_clauses.append(fallback())
            continue
        # connected components of the variable-sharing graph
        seen: set[str] = set()
        comps: list[set[str]] = []
        for x in xs:
            if x in seen:
                continue
            comp = {x}
            frontier = [x]
            while frontier:
                v = frontier.pop()
                for u in adj[v]:
                    if u not in comp:
                        comp.add(u)
                        frontier.append(u)
            seen |= comp
            comps.append(comp)
        parts: list[Formula] = []
        for comp in comps:
            lits = []
            lit_seen = set()
            for v in comp:
                for sa in atoms_by_var[v]:
                    if id(sa) not in lit_seen:
                        lit_seen.add(id(sa))
                        lits.append(sa)
            if not lits:
                (v,) = comp
                parts.append(neg(Empty(env[v])))
                continue
            if len(lits) == 1:
                signv, atom = lits[0]
                if (
                    signv
                    and isinstance(atom, Rel)
                    and len(set(atom.vars)) == len(atom.vars)
                ):
                    parts.append(Rel(atom.symbol, tuple(env[v] for v in atom.vars)))
                    continue
            # general component: existentially bind its variables
            order = sorted(comp)
            fresh = {
                v: fresh_var(f"e_{v}", set(env.values()) | set(order))
                for v in order
            }
            lit_f = conjoin(
                [
                    rename_free(a if s else Not(a), fresh)
                    for s, a in lits
                ]
            )
            parts.append(_exists_wrap([(fresh[v], env[v]) for v in order], lit_f))
        out_clauses.append(conjoin(parts))
    return disjoin(out_clauses)


def backwards_core(tau: Transduction, f: Formula) -> Formula:
    """Translate a formula over the output signature into one over the
    enriched input, pointwise: free set variables keep denoting sets of
    surviving elements, free element variables surviving elements."""
    out_syms = set(tau.output_signature.symbols)
    scheme = tau.scheme

    def is_set(v: str, scope: Mapping[str, bool]) -> bool:
        if v in scope:
            return scope[v]
        return _looks_set(v)

    def subst(g: Formula, scope: dict[str, bool]) -> Formula:
        if isinstance(g, (ExistsSet, ForallSet)):
            inner = dict(scope)
            inner[g.var] = True
            return type(g)(g.var, subst(g.body, inner))
        if isinstance(g, (ExistsElem, ForallElem)):
            inner = dict(scope)
            inner[g.var] = False
            return type(g)(g.var, subst(g.body, inner))
        if isinstance(g, Rel) and g.symbol in out_syms:
            arity = tau.output_signature.arity(g.symbol)
            if len(g.vars) != arity:
                raise MalformedError(f"arity mismatch on {g.symbol!r}")
            if all(is_set(v, scope) for v in g.vars):
                return _translate_rel_all_sets(scheme, g.symbol, g.vars)
            phi = scheme.phi_map[g.symbol]
            xs = scheme_vars(arity)
            inst = alpha_freshen(phi, g.vars)
            ren = {}
            wraps = []
            for x, v in zip(xs, g.vars):
                if is_set(v, scope):
                    e = fresh_var(
                        f"e_{x}",
                        set(g.vars) | set(all_var_names(inst)) | set(ren.values()),
                    )
                    ren[x] = e
                    wraps.append((e, v))
                else:
                    ren[x] = v
            return _exists_wrap(wraps, rename_free(inst, ren))
        return map_children(g, lambda c: subst(c, scope))

    translated = subst(f, {})
    delta = scheme.delta

    def guard(var: str) -> Formula:
        g = alpha_freshen(delta, [var])
        return rename_free(g, {"x": var})

    if isinstance(delta, Top):
        return translated
    return relativize_quantifiers(translated, guard)


def _looks_set(name: str) -> bool:
    return name[:1].isupper()


# ---------------------------------------------------------------------------
# uncopying


def split_name(name: str, i: int) -> str:
    return f"{name}^{i}"


def uncopy_formula(
    f: Formula,
    k: int,
    sim: str = "sim",
    copy_preds: Optional[Sequence[str]] = None,
    markers: Optional[Mapping[str, Sequence[str]]] = None,
    elem_copies: Optional[Mapping[str, int]] = None,
) -> Formula:
    """Translate a formula over a k-copied structure into one over the base
    structure.  Set variables X split into X^0..X^{k-1}; bound element
    variables case-split over the copies; free element variables take their
    copy from elem_copies.  Markers are unary relations that hold on every
    copy of a marked element; each maps to per-copy base-level names."""
    copy_preds = list(copy_preds or [f"P{i}" for i in range(k)])
    markers = dict(markers or {})
    env = dict(elem_copies or {})
    if len(copy_preds) != k:
        raise MalformedError("need one copy predicate per copy")
    pred_index = {p: i for i, p in enumerate(copy_preds)}

    def is_elem(v: str, scope: Mapping[str, int]) -> bool:
        return v in scope

    def go(g: Formula, scope: dict[str, int]) -> Formula:
        if isinstance(g, Top) or isinstance(g, Bottom):
            return g
        if isinstance(g, Sub):
            return conjoin(
                [Sub(split_name(g.left, i), split_name(g.right, i)) for i in range(k)]
            )
        if isinstance(g, Empty):
            return conjoin([Empty(split_name(g.var, i)) for i in range(k)])
        if isinstance(g, Singleton):
            outs = []
            for i in range(k):
                parts: list[Formula] = [Singleton(split_name(g.var, i))]
                parts += [
                    Empty(split_name(g.var, j)) for j in range(k) if j != i
                ]
                outs.append(conjoin(parts))
            return disjoin(outs)
        if isinstance(g, Card):
            outs = []
            for combo in itertools.product(range(g.modulus), repeat=k):
                if sum(combo) % g.modulus != g.residue:
                    continue
                outs.append(
                    conjoin(
                        [
                            Card(split_name(g.var, i), combo[i], g.modulus)
                            for i in range(k)
                        ]
                    )
                )
            return disjoin(outs)
        if isinstance(g, In):
            if g.elem not in scope:
                raise MalformedError(f"element variable {g.elem!r} has no copy")
            return In(g.elem, split_name(g.set, scope[g.elem]))
        if isinstance(g, Eq):
            same = scope.get(g.left) == scope.get(g.right)
            return Eq(g.left, g.right) if same else Bottom()
        if isinstance(g, Rel):
            return rel(g, scope)
        if isinstance(g, (ExistsSet, ForallSet)):
            body = go(g.body, scope)
            for i in reversed(range(k)):
                body = type(g)(split_name(g.var, i), body)
            return body
        if isinstance(g, (ExistsElem, ForallElem)):
            branches = []
            for c in range(k):
                inner = dict(scope)
                inner[g.var] = c
                branches.append(type(g)(g.var, go(g.body, inner)))
            return disjoin(branches) if isinstance(g, ExistsElem) else conjoin(branches)
        return map_children(g, lambda c: go(c, scope))

    def rel(g: Rel, scope: dict[str, int]) -> Formula:
        if g.symbol == sim:
            u, v = g.vars
            ue, ve = is_elem(u, scope), is_elem(v, scope)
            if ue and ve:
                return Eq(u, v)
            if ue:
                return disjoin([In(u, split_name(v, j)) for j in range(k)])
            if ve:
                return disjoin([In(v, split_name(u, i)) for i in range(k)])
            w = fresh_var("w", {u, v} | set(scope))
            return disjoin(
                [
                    ExistsElem(
                        w,
                        conjoin(
                            [In(w, split_name(u, i)), In(w, split_name(v, j))]
                        ),
                    )
                    for i in range(k)
                    for j in range(k)
                ]
            )
        if g.symbol in pred_index:
            c = pred_index[g.symbol]
            (v,) = g.vars
            if is_elem(v, scope):
                return Top() if scope[v] == c else Bottom()
            return neg(Empty(split_name(v, c)))
        if g.symbol in markers:
            names = markers[g.symbol]
            (v,) = g.vars
            if is_elem(v, scope):
                return Rel(names[scope[v]], (v,))
            return disjoin(
                [Rel(names[i], (split_name(v, i),)) for i in range(k)]
            )
        # base relation: all positions in one copy
        forced = {scope[v] for v in g.vars if is_elem(v, scope)}
        if len(forced) > 1:
            return Bottom()
        rng = [forced.pop()] if forced else list(range(k))
        return disjoin(
            [
                Rel(
                    g.symbol,
                    tuple(
                        v if is_elem(v, scope) else split_name(v, c)
                        for v in g.vars
                    ),
                )
                for c in rng
            ]
        )

    return go(f, env)


# ---------------------------------------------------------------------------
# the public backwards translation


def backwards(tau: Transduction, f: Formula) -> Formula:
    """Pointwise backwards translation of a sentence over the output
    signature: for every parameter valuation Q0..Q{p-1},

        expand(A, Qs) satisfies the result
        iff the valuation passes the precondition and tau's output on
        (A, Qs) satisfies f.
    """
    if free_vars(f):
        raise MalformedError("backwards translation expects a sentence")
    out_syms = set(tau.output_signature.symbols)
    for g in _walk(f):
        if isinstance(g, Rel) and g.symbol not in out_syms:
            raise MalformedError(
                f"sentence uses {g.symbol!r}, not an output relation"
            )
    core = backwards_core(tau, f)
    enriched_level = conjoin([tau.scheme.chi, core])
    marker_map = {f"Q{j}": (f"Q{j}",) * tau.copies for j in range(tau.params)}
    return uncopy_formula(enriched_level, tau.copies, markers=marker_map)


def close_params(f: Formula, params: int) -> Formula:
    """Existentially quantify parameter predicates Q0..Q{p-1} as set
    variables (costs quantifier rank; the pointwise form does not)."""
    out = f

    def to_var(g: Formula, j: int, var: str) -> Formula:
        if isinstance(g, Rel) and g.symbol == f"Q{j}":
            (v,) = g.vars
            if _looks_set(v):
                w = fresh_var("w", {v, var})
                return ExistsElem(w, conjoin([In(w, v), In(w, var)]))
            return In(v, var)
        return map_children(g, lambda c: to_var(c, j, var))

    for j in reversed(range(params)):
        var = f"QS{j}"
        out = ExistsSet(var, to_var(out, j, var))
    return out


def backwards_closed(tau: Transduction, f: Formula) -> Formula:
    """Backwards translation as a sentence over the plain input signature:
    "some parameter valuation is accepted and its output satisfies f"."""
    return close_params(backwards(tau, f), tau.params)


# ---------------------------------------------------------------------------
# composition


def compose(sigma: Transduction, tau: Transduction) -> Transduction:
    """The transduction with apply(compose(sigma, tau), A) ranging over
    apply(sigma, apply(tau, A)): tau runs first, sigma consumes its output.
    Copies multiply; parameters concatenate, with each sigma parameter
    split into one per tau copy."""
    if sigma.input_signature != tau.output_signature:
        raise MalformedError("composition needs sigma's input = tau's output")
    k = sigma.copies * tau.copies
    p = tau.params + tau.copies * sigma.params

    sigma_temp = {f"Q{j}": f"QTMP{j}" for j in range(sigma.params)}
    tau_markers = {f"Q{j}": (f"Q{j}",) * tau.copies for j in range(tau.params)}
    comp_markers = dict(tau_markers)
    for j in range(sigma.params):
        comp_markers[f"QTMP{j}"] = tuple(
            f"Q{tau.params + i * sigma.params + j}" for i in range(tau.copies)
        )

    def pull(g: Formula, sigma_env: Mapping[str, int], tau_env: Mapping[str, int]) -> Formula:
        """sigma-enriched formula -> base-level formula over the input
        signature plus composite parameter markers."""
        g1 = rename_relations(g, sigma_temp)
        g2 = uncopy_formula(
            g1,
            sigma.copies,
            markers={name: (name,) * sigma.copies for name in sigma_temp.values()},
            elem_copies=sigma_env,
        )
        g3 = backwards_core(tau, g2)
        return uncopy_formula(
            g3, tau.copies, markers=comp_markers, elem_copies=tau_env
        )

    def p0_guard(var: str) -> Formula:
        return Rel("P0", (var,))

    def lift(g: Formula) -> Formula:
        """base-level formula -> formula over the k-copied composite, read
        on the copy-0 slice."""
        return relativize_quantifiers(g, p0_guard)

    def tau_delta_at(var: str, i: int) -> Formula:
        d = alpha_freshen(tau.scheme.delta, [var])
        d = rename_free(d, {"x": var})
        return uncopy_formula(d, tau.copies, markers=tau_markers, elem_copies={var: i})

    # precondition: tau's own, plus sigma's pulled back through tau
    chi_sigma = pull(sigma.scheme.chi, {}, {})
    chi_tau = uncopy_formula(tau.scheme.chi, tau.copies, markers=tau_markers)
    chi = lift(conjoin([chi_tau, chi_sigma]))

    def pair(c: int) -> tuple[int, int]:
        return c // tau.copies, c % tau.copies

    # domain: x at copy (l, i) survives iff its base element at tau-copy i
    # is in tau's output and that output element at sigma-copy l passes
    # sigma's domain formula
    delta_parts = []
    for c in range(k):
        l, i = pair(c)
        d_sigma = alpha_freshen(sigma.scheme.delta, ["y"])
        d_sigma = rename_free(d_sigma, {"x": "y"})
        pulled = pull(d_sigma, {"y": l}, {"y": i})
        body = conjoin([tau_delta_at("y", i), pulled])
        delta_parts.append(
            conjoin(
                [
                    Rel(f"P{c}", ("x",)),
                    ExistsElem(
                        "y",
                        conjoin(
                            [Rel("sim", ("x", "y")), Rel("P0", ("y",)), lift(body)]
                        ),
                    ),
                ]
            )
        )
    delta = disjoin(delta_parts)

    phis: dict[str, Formula] = {}
    for name, arity in sigma.output_signature.relations:
        xs = scheme_vars(arity)
        branches = []
        for cs in itertools.product(range(k), repeat=arity):
            ys = [f"y{j + 1}" for j in range(arity)]
            phi_s = alpha_freshen(sigma.scheme.phi_map[name], ys)
            phi_s = rename_free(phi_s, dict(zip(xs, ys)))
            sigma_env = {y: pair(c)[0] for y, c in zip(ys, cs)}
            tau_env = {y: pair(c)[1] for y, c in zip(ys, cs)}
            pulled = pull(phi_s, sigma_env, tau_env)
            body = lift(pulled)
            for x, y, c in reversed(list(zip(xs, ys, cs))):
                body = ExistsElem(
                    y,
                    conjoin([Rel("sim", (x, y)), Rel("P0", (y,)), body]),
                )
            guard = conjoin([Rel(f"P{c}", (x,)) for x, c in zip(xs, cs)])
            branches.append(conjoin([guard, body]))
        phis[name] = disjoin(branches)

    return Transduction.make(
        tau.input_signature,
        k,
        p,
        sigma.output_signature,
        chi,
        delta,
        phis,
    )


# ---------------------------------------------------------------------------
# built-in transductions over graphs


def _graph_sig() -> Signature:
    return signature(("edg", 2))


def builtin(name: str) -> Transduction:
    """A small registry of ready-made transductions on graph-like
    structures, used across the test corpus and the command line."""
    edg = _graph_sig()
    x, y = "x", "y"
    if name == "identity":
        return Transduction.make(
            edg, 1, 0, edg, Top(), Top(), {"edg": Rel("edg", ("x1", "x2"))}
        )
    if name == "complement":
        return Transduction.make(
            edg,
            1,
            0,
            edg,
            Top(),
            Top(),
            {
                "edg": conjoin(
                    [Not(Rel("edg", ("x1", "x2"))), Not(Eq("x1", "x2"))]
                )
            },
        )
    if name == "restrict":
        # induced substructure on the parameter set
        return Transduction.make(
            edg,
            1,
            1,
            edg,
            Top(),
            Rel("Q0", ("x",)),
            {"edg": Rel("edg", ("x1", "x2"))},
        )
    if name == "double":
        # two copies; rungs between the copies of each element
        return Transduction.make(
            edg,
            2,
            0,
            edg,
            Top(),
            Top(),
            {
                "edg": disjoin(
                    [
                        Rel("edg", ("x1", "x2")),
                        conjoin(
                            [Rel("sim", ("x1", "x2")), Not(Eq("x1", "x2"))]
                        ),
                    ]
                )
            },
        )
    if name == "mark":
        # expand with one marked set
        out = signature(("edg", 2), ("mark", 1))
        return Transduction.make(
            edg,
            1,
            1,
            out,
            Top(),
            Top(),
            {"edg": Rel("edg", ("x1", "x2")), "mark": Rel("Q0", ("x1",))},
        )
    if name == "order_to_successor":
        le = signature(("le", 2))
        z = "z"
        succ = conjoin(
            [
                Rel("le", ("x1", "x2")),
                Not(Eq("x1", "x2")),
                Not(
                    ExistsElem(
                        z,
                        conjoin(
                            [
                                Rel("le", ("x1", z)),
                                Rel("le", (z, "x2")),
                                Not(Eq(z, "x1")),
                                Not(Eq(z, "x2")),
                            ]
                        ),
                    )
                ),
            ]
        )
        return Transduction.make(le, 1, 0, edg, Top(), Top(), {"edg": succ})
    if name == "successor_to_order":
        le = signature(("le", 2))
        u, v = "u", "v"
        closed = ForallElem(
            u,
            ForallElem(
                v,
                implies(
                    conjoin([In(u, "Z"), Rel("edg", (u, v))]),
                    In(v, "Z"),
                ),
            ),
        )
        reach = ForallSet(
            "Z",
            implies(conjoin([In("x1", "Z"), closed]), In("x2", "Z")),
        )
        return Transduction.make(edg, 1, 0, le, Top(), Top(), {"le": reach})
    raise MalformedError(f"unknown builtin transduction {name!r}")


BUILTIN_NAMES = (
    "identity",
    "complement",
    "restrict",
    "double",
    "mark",
    "order_to_successor",
    "successor_to_order",
)
