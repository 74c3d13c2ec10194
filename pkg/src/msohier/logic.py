"""Monadic second-order logic over relational structures, in a restricted
set-variable form.

Core formulas use only set variables.  Atoms:

* ``Sub(X, Y)``        -- X is a subset of Y
* ``Rel(R, X1..Xr)``   -- some tuple (a1..ar) in R has each ai in Xi
* ``Singleton(X)``, ``Empty(X)``
* ``Card(X, k, m)``    -- |X| = k (mod m), m >= 2

plus boolean connectives and set quantifiers.  First-order variables are
sugar: an element variable is evaluated as a singleton set, so ``In`` and
``Eq`` desugar to inclusions and element quantifiers to guarded set
quantifiers.

The rank of a formula is the larger of its set-quantifier nesting depth and
its largest cardinality modulus; plain MSO formulas have all moduli 1 (no
``Card`` atoms).  Hereditary rank-m types (`mtype`) refine structures up to
equivalence for all sentences of that rank and modulus bound.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import BudgetError, MalformedError
from .structures import RelationalStructure, Signature


class Formula:
    def __str__(self) -> str:
        return to_sexpr(self)

    def __and__(self, other: "Formula") -> "Formula":
        return conjoin([self, other])

    def __or__(self, other: "Formula") -> "Formula":
        return disjoin([self, other])

    def __invert__(self) -> "Formula":
        return neg(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Sub(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Rel(Formula):
    """Hidden-existential relation atom: some R-tuple meets the given sets
    positionwise.  Variables may be element variables in the sugar layer."""

    symbol: str
    vars: tuple[str, ...]


@dataclass(frozen=True)
class Singleton(Formula):
    var: str


@dataclass(frozen=True)
class Empty(Formula):
    var: str


@dataclass(frozen=True)
class Card(Formula):
    var: str
    residue: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise MalformedError("cardinality modulus must be at least 2")
        object.__setattr__(self, "residue", self.residue % self.modulus)


@dataclass(frozen=True)
class In(Formula):
    elem: str
    set: str


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class ExistsSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsElem(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallElem(Formula):
    var: str
    body: Formula


_QUANTIFIERS = (ExistsSet, ForallSet, ExistsElem, ForallElem)


# ---------------------------------------------------------------------------
# smart constructors


def conjoin(parts: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Bottom):
            return Bottom()
        if isinstance(p, Top):
            continue
        if isinstance(p, And):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return Top()
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disjoin(parts: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Top):
            return Top()
        if isinstance(p, Bottom):
            continue
        if isinstance(p, Or):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return Bottom()
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def neg(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.body
    if isinstance(f, Top):
        return Bottom()
    if isinstance(f, Bottom):
        return Top()
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disjoin([neg(a), b])


# ---------------------------------------------------------------------------
# structural helpers


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.parts
    if isinstance(f, _QUANTIFIERS):
        return (f.body,)
    return ()


def map_children(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    if isinstance(f, Not):
        return Not(fn(f.body))
    if isinstance(f, And):
        return And(tuple(fn(p) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(fn(p) for p in f.parts))
    if isinstance(f, _QUANTIFIERS):
        return type(f)(f.var, fn(f.body))
    return f


def walk(f: Formula):
    yield f
    for c in children(f):
        yield from walk(c)


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Sub):
        return frozenset((f.left, f.right))
    if isinstance(f, Rel):
        return frozenset(f.vars)
    if isinstance(f, (Singleton, Empty, Card)):
        return frozenset((f.var,))
    if isinstance(f, In):
        return frozenset((f.elem, f.set))
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, _QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def all_var_names(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    for g in walk(f):
        if isinstance(g, Sub):
            out.update((g.left, g.right))
        elif isinstance(g, Rel):
            out.update(g.vars)
        elif isinstance(g, (Singleton, Empty, Card)):
            out.add(g.var)
        elif isinstance(g, In):
            out.update((g.elem, g.set))
        elif isinstance(g, Eq):
            out.update((g.left, g.right))
        elif isinstance(g, _QUANTIFIERS):
            out.add(g.var)
    return frozenset(out)


def fresh_var(base: str, used: Iterable[str]) -> str:
    used = set(used)
    if base not in used:
        return base
    i = 1
    while f"{base}_{i}" in used:
        i += 1
    return f"{base}_{i}"


def rename_free(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free variable occurrences; bound variables shadow the map."""

    def sub(name: str, env: Mapping[str, str]) -> str:
        return env.get(name, name)

    def go(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, Sub):
            return Sub(sub(g.left, env), sub(g.right, env))
        if isinstance(g, Rel):
            return Rel(g.symbol, tuple(sub(v, env) for v in g.vars))
        if isinstance(g, Singleton):
            return Singleton(sub(g.var, env))
        if isinstance(g, Empty):
            return Empty(sub(g.var, env))
        if isinstance(g, Card):
            return Card(sub(g.var, env), g.residue, g.modulus)
        if isinstance(g, In):
            return In(sub(g.elem, env), sub(g.set, env))
        if isinstance(g, Eq):
            return Eq(sub(g.left, env), sub(g.right, env))
        if isinstance(g, _QUANTIFIERS):
            inner = dict(env)
            inner.pop(g.var, None)
            return type(g)(g.var, go(g.body, inner))
        return map_children(g, lambda c: go(c, env))

    return go(f, dict(mapping))


# ---------------------------------------------------------------------------
# desugaring and rank


def desugar(f: Formula) -> Formula:
    """Eliminate element variables: each becomes a singleton set variable of
    the same name."""
    if isinstance(f, In):
        return Sub(f.elem, f.set)
    if isinstance(f, Eq):
        return conjoin([Sub(f.left, f.right), Sub(f.right, f.left)])
    if isinstance(f, ExistsElem):
        return ExistsSet(f.var, conjoin([Singleton(f.var), desugar(f.body)]))
    if isinstance(f, ForallElem):
        return ForallSet(f.var, implies(Singleton(f.var), desugar(f.body)))
    return map_children(f, desugar)


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, _QUANTIFIERS):
        return 1 + quantifier_depth(f.body)
    return max((quantifier_depth(c) for c in children(f)), default=0)


def modulus_bound(f: Formula) -> int:
    best = 1
    for g in walk(f):
        if isinstance(g, Card):
            best = max(best, g.modulus)
    return best


def rank(f: Formula) -> int:
    """max(set-quantifier nesting depth, largest cardinality modulus)."""
    return max(quantifier_depth(desugar(f)), modulus_bound(f))


ELEM = "elem"
SET = "set"


def check_kinds(f: Formula, env: Optional[Mapping[str, str]] = None) -> None:
    """Verify element/set variables are used consistently.  Free variables
    not in env default to set kind when the name starts with an upper-case
    letter, element kind otherwise."""
    env = dict(env or {})

    def kind(name: str, scope: Mapping[str, str]) -> str:
        if name in scope:
            return scope[name]
        return SET if name[:1].isupper() else ELEM

    def need(name: str, want: str, scope: Mapping[str, str]) -> None:
        k = kind(name, scope)
        if k != want:
            raise MalformedError(f"variable {name!r} used as {want} but is {k}")

    def go(g: Formula, scope: dict[str, str]) -> None:
        if isinstance(g, Sub):
            need(g.left, SET, scope)
            need(g.right, SET, scope)
        elif isinstance(g, (Singleton, Empty, Card)):
            need(g.var, SET, scope)
        elif isinstance(g, In):
            need(g.elem, ELEM, scope)
            need(g.set, SET, scope)
        elif isinstance(g, Eq):
            need(g.left, ELEM, scope)
            need(g.right, ELEM, scope)
        elif isinstance(g, Rel):
            for v in g.vars:
                kind(v, scope)  # either kind is fine
        elif isinstance(g, (ExistsSet, ForallSet)):
            inner = dict(scope)
            inner[g.var] = SET
            go(g.body, inner)
            return
        elif isinstance(g, (ExistsElem, ForallElem)):
            inner = dict(scope)
            inner[g.var] = ELEM
            go(g.body, inner)
            return
        for c in children(g):
            go(c, scope)

    go(f, env)


# ---------------------------------------------------------------------------
# s-expressions

_TOKEN = re.compile(r"\(|\)|[^\s()]+")

_BINDERS = {
    "exists-set": ExistsSet,
    "forall-set": ForallSet,
    "exists": ExistsElem,
    "forall": ForallElem,
}


def _tokenize(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split(";", 1)[0]
        out.extend(_TOKEN.findall(line))
    return out


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    pos = 0

    def peek() -> Optional[str]:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise MalformedError("unexpected end of formula")
        t = tokens[pos]
        pos += 1
        return t

    def expr() -> Formula:
        t = take()
        if t == ")":
            raise MalformedError("unexpected ')'")
        if t != "(":
            if t == "true":
                return Top()
            if t == "false":
                return Bottom()
            raise MalformedError(f"bare token {t!r} is not a formula")
        head = take()
        if head == "true":
            f: Formula = Top()
        elif head == "false":
            f = Bottom()
        elif head == "sub":
            f = Sub(take(), take())
        elif head == "rel":
            sym = take()
            vs = []
            while peek() != ")":
                vs.append(take())
            f = Rel(sym, tuple(vs))
            if not vs:
                raise MalformedError("relation atom needs variables")
        elif head == "singleton":
            f = Singleton(take())
        elif head == "empty":
            f = Empty(take())
        elif head == "card":
            var = take()
            try:
                k, m = int(take()), int(take())
            except ValueError:
                raise MalformedError("cardinality atom needs integers") from None
            f = Card(var, k, m)
        elif head == "in":
            f = In(take(), take())
        elif head == "eq":
            f = Eq(take(), take())
        elif head == "not":
            f = Not(expr())
        elif head in ("and", "or"):
            parts = []
            while peek() != ")":
                parts.append(expr())
            f = And(tuple(parts)) if head == "and" else Or(tuple(parts))
        elif head in _BINDERS:
            var = take()
            f = _BINDERS[head](var, expr())
        else:
            raise MalformedError(f"unknown operator {head!r}")
        if take() != ")":
            raise MalformedError(f"missing ')' after {head}")
        return f

    f = expr()
    if pos != len(tokens):
        raise MalformedError("trailing input after formula")
    return f


def to_sexpr(f: Formula) -> str:
    if isinstance(f, Top):
        return "(true)"
    if isinstance(f, Bottom):
        return "(false)"
    if isinstance(f, Sub):
        return f"(sub {f.left} {f.right})"
    if isinstance(f, Rel):
        return f"(rel {f.symbol} {' '.join(f.vars)})"
    if isinstance(f, Singleton):
        return f"(singleton {f.var})"
    if isinstance(f, Empty):
        return f"(empty {f.var})"
    if isinstance(f, Card):
        return f"(card {f.var} {f.residue} {f.modulus})"
    if isinstance(f, In):
        return f"(in {f.elem} {f.set})"
    if isinstance(f, Eq):
        return f"(eq {f.left} {f.right})"
    if isinstance(f, Not):
        return f"(not {to_sexpr(f.body)})"
    if isinstance(f, And):
        return "(and " + " ".join(to_sexpr(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(to_sexpr(p) for p in f.parts) + ")"
    if isinstance(f, ExistsSet):
        return f"(exists-set {f.var} {to_sexpr(f.body)})"
    if isinstance(f, ForallSet):
        return f"(forall-set {f.var} {to_sexpr(f.body)})"
    if isinstance(f, ExistsElem):
        return f"(exists {f.var} {to_sexpr(f.body)})"
    if isinstance(f, ForallElem):
        return f"(forall {f.var} {to_sexpr(f.body)})"
    raise MalformedError(f"cannot print {f!r}")


# ---------------------------------------------------------------------------
# evaluation

Assignment = Mapping[str, Union[str, Iterable[str]]]


class _Budget:
    __slots__ = ("left",)

    def __init__(self, budget: int) -> None:
        self.left = budget

    def tick(self, cost: int = 1) -> None:
        self.left -= cost
        if self.left < 0:
            raise BudgetError("formula evaluation budget exhausted")


def _as_mask(value, index: Mapping[str, int]) -> int:
    if isinstance(value, (set, frozenset, list, tuple)):
        mask = 0
        for e in value:
            mask |= 1 << index[e]
        return mask
    return 1 << index[value]


def _rel_tuples(A: RelationalStructure) -> dict[str, tuple[tuple[int, ...], ...]]:
    idx = A.index
    return {
        name: tuple(tuple(idx[e] for e in t) for t in sorted(tuples))
        for name, tuples in A.relations
    }


def evaluate(
    A: RelationalStructure,
    f: Formula,
    assignment: Optional[Assignment] = None,
    budget: int = 2_000_000,
) -> bool:
    """Evaluate a (possibly sugared) formula on A under the assignment.

    Assignment values may be single elements (for element variables) or
    iterables of elements (for set variables).  Raises BudgetError when the
    subset-enumeration work exceeds the budget."""
    idx = A.index
    n = len(A.domain)
    rels = _rel_tuples(A)
    env: dict[str, int] = {}
    for name, value in (assignment or {}).items():
        env[name] = _as_mask(value, idx)
    counter = _Budget(budget)
    core = desugar(f)
    missing = free_vars(core) - set(env)
    if missing:
        raise MalformedError(f"unassigned free variables: {sorted(missing)}")
    return _eval(core, env, rels, n, counter)


def _eval(
    f: Formula,
    env: dict[str, int],
    rels: Mapping[str, tuple[tuple[int, ...], ...]],
    n: int,
    counter: _Budget,
) -> bool:
    counter.tick()
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Sub):
        return env[f.left] & ~env[f.right] == 0
    if isinstance(f, Empty):
        return env[f.var] == 0
    if isinstance(f, Singleton):
        return bin(env[f.var]).count("1") == 1
    if isinstance(f, Card):
        return bin(env[f.var]).count("1") % f.modulus == f.residue
    if isinstance(f, Rel):
        if f.symbol not in rels:
            raise MalformedError(f"relation {f.symbol!r} not in signature")
        masks = tuple(env[v] for v in f.vars)
        for t in rels[f.symbol]:
            if len(t) != len(masks):
                raise MalformedError(
                    f"arity mismatch for {f.symbol!r}: {len(masks)} variables"
                )
            counter.tick()
            if all((masks[i] >> t[i]) & 1 for i in range(len(t))):
                return True
        return False
    if isinstance(f, Not):
        return not _eval(f.body, env, rels, n, counter)
    if isinstance(f, And):
        return all(_eval(p, env, rels, n, counter) for p in f.parts)
    if isinstance(f, Or):
        return any(_eval(p, env, rels, n, counter) for p in f.parts)
    if isinstance(f, (ExistsSet, ForallSet)):
        want = isinstance(f, ExistsSet)
        saved = env.get(f.var)
        try:
            for mask in range(1 << n):
                env[f.var] = mask
                if _eval(f.body, env, rels, n, counter) == want:
                    return want
        finally:
            if saved is None:
                env.pop(f.var, None)
            else:
                env[f.var] = saved
        return not want
    raise MalformedError(f"cannot evaluate sugared node {type(f).__name__}")


# ---------------------------------------------------------------------------
# hereditary types

AtomDesc = tuple
Rank0Type = frozenset
MType = Union[Rank0Type, tuple]


def atom_descriptors(p: int, sig: Signature, q: int = 1) -> tuple[AtomDesc, ...]:
    """The canonical atom list over p set parameters (indexed 0..p-1)."""
    out: list[AtomDesc] = []
    for i in range(p):
        for j in range(p):
            if i != j:
                out.append(("sub", i, j))
    for i in range(p):
        out.append(("empty", i))
        out.append(("single", i))
    for i in range(p):
        for m in range(2, q + 1):
            for k in range(m):
                out.append(("card", i, k, m))
    for name, arity in sig.relations:
        for assign in itertools.product(range(p), repeat=arity):
            out.append(("rel", name, assign))
    return tuple(out)


def _eval_atom(
    desc: AtomDesc,
    masks: Sequence[int],
    rels: Mapping[str, tuple[tuple[int, ...], ...]],
) -> bool:
    tag = desc[0]
    if tag == "sub":
        return masks[desc[1]] & ~masks[desc[2]] == 0
    if tag == "empty":
        return masks[desc[1]] == 0
    if tag == "single":
        return bin(masks[desc[1]]).count("1") == 1
    if tag == "card":
        return bin(masks[desc[1]]).count("1") % desc[3] == desc[2]
    if tag == "rel":
        assign = desc[2]
        for t in rels[desc[1]]:
            if all((masks[assign[i]] >> t[i]) & 1 for i in range(len(t))):
                return True
        return False
    raise MalformedError(f"unknown atom {desc!r}")


def mtype(
    A: RelationalStructure,
    params: Sequence[Iterable[str]] = (),
    rank: int = 0,
    q: int = 1,
    budget: int = 4_000_000,
    engine: str = "auto",
) -> MType:
    """The hereditary rank-`rank` type of A with the given set parameters.

    Rank 0 is the frozenset of satisfied atoms; rank m > 0 pairs the current
    atoms with the set of rank-(m-1) types of all one-set extensions.  Two
    structures get equal types iff they satisfy the same sentences of that
    rank and cardinality-modulus bound."""
    idx = A.index
    n = len(A.domain)
    masks = tuple(_as_mask(pset, idx) for pset in params)
    rels = _rel_tuples(A)
    if engine not in ("auto", "fast", "slow"):
        raise MalformedError(f"unknown type engine {engine!r}")
    use_fast = engine == "fast" or (
        engine == "auto" and rank == 2 and not masks and n <= 9
    )
    if use_fast:
        if rank != 2 or masks:
            raise MalformedError("fast type engine only handles rank 2, no params")
        result = _mtype2_fast(A, q)
        if result is not None:
            return result
        if engine == "fast":
            raise BudgetError("fast type engine cannot pack this signature")
    work = (1 << n) ** rank if rank else 1
    if work > budget:
        raise BudgetError(f"type computation needs {work} extensions")
    sig = A.signature

    def go(ms: tuple[int, ...], r: int) -> MType:
        atoms = frozenset(
            d for d in atom_descriptors(len(ms), sig, q) if _eval_atom(d, ms, rels)
        )
        if r == 0:
            return atoms
        exts = frozenset(go(ms + (x,), r - 1) for x in range(1 << n))
        return (atoms, exts)

    return go(masks, rank)


def _mtype2_fast(A: RelationalStructure, q: int) -> Optional[MType]:
    """Vectorised rank-2 type with no parameters.  Returns None when the atom
    list doesn't fit the packing width (caller falls back to the generic
    recursion)."""
    n = len(A.domain)
    N = 1 << n
    sig = A.signature
    desc1 = atom_descriptors(1, sig, q)
    desc2 = atom_descriptors(2, sig, q)
    if len(desc2) > 62 or N > 1 << 10:
        return None
    rels = _rel_tuples(A)
    M = np.arange(N, dtype=np.uint64)
    pc = np.zeros(N, dtype=np.uint64)
    for b in range(n):
        pc += (M >> np.uint64(b)) & np.uint64(1)
    bits = [((M >> np.uint64(b)) & np.uint64(1)).astype(bool) for b in range(n)]
    full = np.uint64(N - 1)

    def atom_array(desc: AtomDesc, axes: int) -> np.ndarray:
        tag = desc[0]
        shape = (N,) if axes == 1 else (N, N)
        if tag == "sub":
            i, j = desc[1], desc[2]
            if axes == 1:
                return np.ones(N, dtype=bool)  # unreachable: no (i, j) with i != j
            left = M[:, None] if i == 0 else M[None, :]
            right = M[:, None] if j == 0 else M[None, :]
            return (left & (right ^ full)) == 0
        if tag in ("empty", "single", "card"):
            i = desc[1]
            if tag == "empty":
                vec = M == 0
            elif tag == "single":
                vec = pc == 1
            else:
                vec = pc % desc[3] == desc[2]
            if axes == 1:
                return vec
            return np.broadcast_to(vec[:, None] if i == 0 else vec[None, :], shape)
        if tag == "rel":
            assign = desc[2]
            acc = np.zeros(shape, dtype=bool)
            for t in rels[desc[1]]:
                if axes == 1:
                    term = np.ones(N, dtype=bool)
                    for pos, e in enumerate(t):
                        term &= bits[e]
                    acc |= term
                else:
                    t0 = np.ones(N, dtype=bool)
                    t1 = np.ones(N, dtype=bool)
                    for pos, e in enumerate(t):
                        if assign[pos] == 0:
                            t0 &= bits[e]
                        else:
                            t1 &= bits[e]
                    acc |= t0[:, None] & t1[None, :]
            return acc
        raise MalformedError(f"unknown atom {desc!r}")

    packed2 = np.zeros((N, N), dtype=np.uint64)
    for d, desc in enumerate(desc2):
        packed2 |= atom_array(desc, 2).astype(np.uint64) << np.uint64(d)
    packed1 = np.zeros(N, dtype=np.uint64)
    for d, desc in enumerate(desc1):
        packed1 |= atom_array(desc, 1).astype(np.uint64) << np.uint64(d)

    def decode(value: int, descs: tuple[AtomDesc, ...]) -> Rank0Type:
        return frozenset(descs[d] for d in range(len(descs)) if (value >> d) & 1)

    decode2_cache: dict[int, Rank0Type] = {}
    types1 = set()
    for x in range(N):
        row = np.unique(packed2[x])
        inner = frozenset(
            decode2_cache.setdefault(int(v), decode(int(v), desc2)) for v in row
        )
        types1.add((decode(int(packed1[x]), desc1), inner))
    return (frozenset(), frozenset(types1))


def theory_equal(
    A: RelationalStructure,
    B: RelationalStructure,
    rank: int,
    q: int = 1,
    budget: int = 4_000_000,
) -> bool:
    """Do A and B satisfy the same sentences of the given rank and modulus
    bound?"""
    return mtype(A, (), rank, q, budget) == mtype(B, (), rank, q, budget)


def type_key(t: MType) -> str:
    """Deterministic text form of a type value: set parts are sorted, so
    equal types always print identically (useful for digests)."""
    if isinstance(t, frozenset):
        return "{" + ",".join(sorted(type_key(x) for x in t)) + "}"
    if isinstance(t, tuple):
        return "(" + ",".join(type_key(x) for x in t) + ")"
    return repr(t)


# ---------------------------------------------------------------------------
# random formulas (for property tests)


def random_formula(
    rng,
    sig: Signature,
    set_vars: Sequence[str],
    depth: int,
    q: int = 1,
) -> Formula:
    """A random core formula over the given free set variables with
    quantifier depth at most `depth`."""
    names = list(set_vars)

    def atom(scope: list[str]) -> Formula:
        kinds = ["sub", "empty", "single", "rel"] if scope else ["rel"]
        if q >= 2 and scope:
            kinds.append("card")
        kind = rng.choice(kinds)
        if kind == "sub" and len(scope) >= 1:
            return Sub(rng.choice(scope), rng.choice(scope))
        if kind == "empty":
            return Empty(rng.choice(scope))
        if kind == "single":
            return Singleton(rng.choice(scope))
        if kind == "card":
            m = rng.randrange(2, q + 1) if q > 2 else 2
            return Card(rng.choice(scope), rng.randrange(m), m)
        if not sig.relations:
            return Top() if rng.random() < 0.5 else Bottom()
        name, arity = sig.relations[rng.randrange(len(sig.relations))]
        if not scope:
            return Top()
        return Rel(name, tuple(rng.choice(scope) for _ in range(arity)))

    def go(scope: list[str], d: int, fuel: list[int]) -> Formula:
        fuel[0] -= 1
        if fuel[0] <= 0 or (d == 0 and rng.random() < 0.6):
            return atom(scope)
        roll = rng.random()
        if d > 0 and roll < 0.35:
            v = fresh_var(f"X{len(scope)}", scope)
            body = go(scope + [v], d - 1, fuel)
            return ExistsSet(v, body) if rng.random() < 0.5 else ForallSet(v, body)
        if roll < 0.55:
            return Not(go(scope, d, fuel))
        parts = tuple(go(scope, d, fuel) for _ in range(2))
        return And(parts) if rng.random() < 0.5 else Or(parts)

    return go(names, depth, [24])
