"""Concrete encodings between representation levels.

Four translations, each with a direct encode/decode pair:

* trees of bounded height as words (level sequences in lexicographic order),
* arbitrary structures as marked grids (one row per element, one column per
  tuple),
* structures of bounded treewidth as coloured trees over a catalogue of
  bag-sized pieces glued along partial bijections,
* minors of a graph as four parameter sets (deletions, edge deletions,
  contractions, representatives).

Where the defining formulas are simple enough to spell out — recovering a
tree from its word, and orienting a grid from mod-3 axis classes — the
translation is also packaged as a :class:`~msohier.transduction.Transduction`
so the definable and the direct route can be checked against each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .decomposition import TreeDecomposition, check
from .errors import BudgetError, MalformedError
from .graphs import Graph
from .iso import canonical_key
from .logic import (
    Eq,
    Formula,
    Rel,
    Top,
    conjoin,
    disjoin,
    ExistsElem,
    ForallElem,
    implies,
    neg,
)
from .structures import (
    IncidenceStructure,
    RelationalStructure,
    Signature,
    as_incidence,
    incidence_signature,
    infer_incidence_base,
    signature,
    to_incidence,
)
from .transduction import Transduction
from .trees import ColouredTree, SUCCESSOR_MODE, TreeDomain, Vertex

Cell = tuple[int, int]


# ---------------------------------------------------------------------------
# trees as words


def tree_word_encode(T: TreeDomain, n: int) -> tuple[int, ...]:
    """Encode a tree of height at most ``n`` as its level word.

    The word lists the level of every vertex in lexicographic order, so it
    always starts with 0 and never jumps by more than one upward.
    """
    if T.height > n:
        raise MalformedError(f"tree height {T.height} exceeds the bound {n}")
    return tuple(len(v) for v in T.sorted_vertices)


def tree_word_decode(word: Sequence[int]) -> TreeDomain:
    """Rebuild the tree: each position attaches below the latest earlier
    position with a smaller label."""
    if not word:
        return TreeDomain.make([])
    if word[0] != 0:
        raise MalformedError("a tree word must start at level 0")
    vertices: list[Vertex] = [()]
    width: dict[Vertex, int] = {(): 0}
    for i in range(1, len(word)):
        level = word[i]
        pred = None
        for j in range(i - 1, -1, -1):
            if word[j] < level:
                pred = j
                break
        if pred is None:
            raise MalformedError(f"position {i} has no eligible predecessor")
        if word[pred] != level - 1:
            raise MalformedError(
                f"position {i} jumps from level {word[pred]} to {level}"
            )
        parent = vertices[pred]
        v = parent + (width[parent],)
        width[parent] += 1
        width[v] = 0
        vertices.append(v)
    return TreeDomain.make(vertices)


def word_structure(length: int) -> RelationalStructure:
    """The carrier of a word: positions p0..p{m-1} under the reflexive
    linear order ``le``."""
    dom = tuple(f"p{i}" for i in range(length))
    pairs = [(dom[i], dom[j]) for i in range(length) for j in range(i, length)]
    return RelationalStructure.make(signature(("le", 2)), dom, {"le": pairs})


def word_params(word: Sequence[int], n: int) -> list[frozenset[str]]:
    """Parameter sets feeding a word into :func:`tree_word_decode_scheme`."""
    if any(l < 0 or l >= n for l in word):
        raise MalformedError(f"word uses labels outside [{n}]")
    return [
        frozenset(f"p{i}" for i, l in enumerate(word) if l == m) for m in range(n)
    ]


def tree_word_decode_scheme(n: int) -> Transduction:
    """The word decoder as a transduction with ``n`` label parameters.

    Input: a ``le``-ordered word whose labels arrive as parameter sets
    Q0..Q{n-1}.  The precondition checks that ``le`` is a linear order, the
    labels partition the positions, the first position is labelled 0, and
    every later position has a predecessor exactly one level up.  The output
    relation ``edg`` links each position to the ones it is the predecessor
    of, which is the successor-tree presentation.
    """
    if n < 1:
        raise MalformedError("need at least one level label")

    def lab(i: int, v: str) -> Formula:
        return Rel(f"Q{i}", (v,))

    def le(a: str, b: str) -> Formula:
        return Rel("le", (a, b))

    def before(a: str, b: str) -> Formula:
        return le(a, b) & ~Eq(a, b)

    def smaller(a: str, b: str) -> Formula:
        return disjoin(
            lab(i, a) & lab(j, b) for j in range(n) for i in range(j)
        )

    def pred(a: str, b: str) -> Formula:
        blocker = ForallElem(
            "z", implies(before(a, "z") & before("z", b), neg(smaller("z", b)))
        )
        return before(a, b) & smaller(a, b) & blocker

    linear = conjoin(
        [
            ForallElem("u", le("u", "u")),
            ForallElem(
                "u",
                ForallElem("v", implies(le("u", "v") & le("v", "u"), Eq("u", "v"))),
            ),
            ForallElem(
                "u",
                ForallElem(
                    "v",
                    ForallElem(
                        "w",
                        implies(le("u", "v") & le("v", "w"), le("u", "w")),
                    ),
                ),
            ),
            ForallElem("u", ForallElem("v", le("u", "v") | le("v", "u"))),
        ]
    )
    one_label = ForallElem(
        "u",
        disjoin(
            conjoin([lab(i, "u")] + [neg(lab(j, "u")) for j in range(n) if j != i])
            for i in range(n)
        ),
    )
    first_is_root = ForallElem(
        "u", implies(ForallElem("v", le("u", "v")), lab(0, "u"))
    )
    steps = ForallElem(
        "u",
        implies(
            neg(ForallElem("v", le("u", "v"))),
            ExistsElem(
                "v",
                pred("v", "u")
                & disjoin(lab(i, "v") & lab(i + 1, "u") for i in range(n - 1)),
            ),
        ),
    )
    chi = conjoin([linear, one_label, first_is_root, steps])
    return Transduction.make(
        input_signature=signature(("le", 2)),
        copies=1,
        params=n,
        output_signature=signature(("edg", 2)),
        chi=chi,
        delta=Top(),
        phis={"edg": pred("x1", "x2")},
    )


# ---------------------------------------------------------------------------
# orienting grids


def _class_index(classes: Sequence[frozenset[str]], x: str) -> Optional[int]:
    for i, c in enumerate(classes):
        if x in c:
            return i
    return None


def grid_orient(
    G: Graph,
    row_classes: Sequence[Iterable[str]],
    col_classes: Sequence[Iterable[str]],
) -> tuple[frozenset[tuple[str, str]], frozenset[tuple[str, str]]]:
    """Recover the two step relations of a grid from mod-3 axis classes.

    Inside one column the row class increments by 1 (mod 3) per step, so the
    direction of every edge can be read off the classes; mod 2 would not do,
    since +1 and -1 would coincide.  Inconsistent classes — not a partition,
    or an edge stepping along both axes or neither — are rejected.
    """
    rows = [frozenset(c) for c in row_classes]
    cols = [frozenset(c) for c in col_classes]
    if len(rows) != 3 or len(cols) != 3:
        raise MalformedError("expected three row and three column classes")
    vs = set(G.vertices)
    for name, classes in (("row", rows), ("column", cols)):
        seen: set[str] = set()
        for c in classes:
            if c & seen:
                raise MalformedError(f"{name} classes overlap")
            seen |= c
        if seen != vs:
            raise MalformedError(f"{name} classes do not cover the vertices")
    e0: set[tuple[str, str]] = set()
    e1: set[tuple[str, str]] = set()
    for a, b in sorted(G.edges):
        ra, rb = _class_index(rows, a), _class_index(rows, b)
        ca, cb = _class_index(cols, a), _class_index(cols, b)
        same_row, same_col = ra == rb, ca == cb
        if same_row == same_col:
            raise MalformedError(
                f"edge ({a!r}, {b!r}) does not step along exactly one axis"
            )
        if same_col:
            e0.add((a, b) if (rb - ra) % 3 == 1 else (b, a))
        else:
            e1.add((a, b) if (cb - ca) % 3 == 1 else (b, a))
    return frozenset(e0), frozenset(e1)


def grid_classes(rows: int, cols: int, prefix: str = "v") -> tuple[
    list[frozenset[str]], list[frozenset[str]]
]:
    """The canonical mod-3 axis classes for a ``rows`` x ``cols`` grid as
    produced by :func:`msohier.families.grid`."""
    row_cl = [
        frozenset(
            f"{prefix}{i}_{j}" for i in range(rows) for j in range(cols) if i % 3 == m
        )
        for m in range(3)
    ]
    col_cl = [
        frozenset(
            f"{prefix}{i}_{j}" for i in range(rows) for j in range(cols) if j % 3 == m
        )
        for m in range(3)
    ]
    return row_cl, col_cl


def grid_orient_scheme() -> Transduction:
    """Grid orientation as a six-parameter transduction.

    Q0..Q2 are the row classes, Q3..Q5 the column classes.  The
    precondition asserts both triples partition the vertices and every edge
    changes exactly one axis class; the two output relations pick the
    direction whose class increments by one modulo 3.
    """

    def lab(i: int, v: str) -> Formula:
        return Rel(f"Q{i}", (v,))

    def one_of(v: str, base: int) -> Formula:
        return disjoin(
            conjoin(
                [lab(base + i, v)]
                + [neg(lab(base + j, v)) for j in range(3) if j != i]
            )
            for i in range(3)
        )

    def same(x: str, y: str, base: int) -> Formula:
        return disjoin(lab(base + i, x) & lab(base + i, y) for i in range(3))

    def inc(x: str, y: str, base: int) -> Formula:
        return disjoin(
            lab(base + i, x) & lab(base + (i + 1) % 3, y) for i in range(3)
        )

    edge = Rel("edg", ("u", "v"))
    one_axis = implies(
        edge,
        (same("u", "v", 0) & neg(same("u", "v", 3)))
        | (same("u", "v", 3) & neg(same("u", "v", 0))),
    )
    chi = conjoin(
        [
            ForallElem("u", one_of("u", 0) & one_of("u", 3)),
            ForallElem("u", ForallElem("v", one_axis)),
        ]
    )
    e0 = Rel("edg", ("x1", "x2")) & same("x1", "x2", 3) & inc("x1", "x2", 0)
    e1 = Rel("edg", ("x1", "x2")) & same("x1", "x2", 0) & inc("x1", "x2", 3)
    return Transduction.make(
        input_signature=signature(("edg", 2)),
        copies=1,
        params=6,
        output_signature=signature(("E_0", 2), ("E_1", 2)),
        chi=chi,
        delta=Top(),
        phis={"E_0": e0, "E_1": e1},
    )


# ---------------------------------------------------------------------------
# structures as marked grids


@dataclass(frozen=True)
class GridCode:
    """A structure spread over a grid: row i+1 stands for the i-th element,
    column k+1 for the k-th tuple, and the marker sets record labels and
    incidence.  Row 0 and column 0 stay blank so the two enumerations cannot
    collide; the mod-3 axis classes for re-orienting the carrier ride along.
    """

    rows: int
    cols: int
    a_names: tuple[str, ...]
    e_names: tuple[str, ...]
    a_sites: tuple[Cell, ...]
    e_sites: tuple[Cell, ...]
    label_sites: tuple[tuple[str, tuple[Cell, ...]], ...]
    position_sites: tuple[tuple[int, tuple[Cell, ...]], ...]
    row_classes: tuple[tuple[Cell, ...], ...]
    col_classes: tuple[tuple[Cell, ...], ...]


def _axis_classes(rows: int, cols: int) -> tuple[tuple, tuple]:
    row_cl = tuple(
        tuple(
            (r, c) for r in range(rows) for c in range(cols) if r % 3 == m
        )
        for m in range(3)
    )
    col_cl = tuple(
        tuple(
            (r, c) for r in range(rows) for c in range(cols) if c % 3 == m
        )
        for m in range(3)
    )
    return row_cl, col_cl


def grid_encode(A: RelationalStructure) -> GridCode:
    I = to_incidence(A)
    a_names = I.a_part
    e_names = I.e_part
    rows, cols = len(a_names) + 1, len(e_names) + 1
    a_index = {a: i for i, a in enumerate(a_names)}
    labels: dict[str, list[Cell]] = {name: [] for name in A.signature.symbols}
    positions: dict[int, list[Cell]] = {
        l: [] for l in range(A.signature.max_arity)
    }
    for k, e in enumerate(e_names):
        symbol, t = I.tuple_map[e]
        labels[symbol].append((0, k + 1))
        for l, x in enumerate(t):
            positions[l].append((a_index[x] + 1, k + 1))
    row_cl, col_cl = _axis_classes(rows, cols)
    return GridCode(
        rows=rows,
        cols=cols,
        a_names=a_names,
        e_names=e_names,
        a_sites=tuple((i + 1, 0) for i in range(len(a_names))),
        e_sites=tuple((0, k + 1) for k in range(len(e_names))),
        label_sites=tuple(
            (name, tuple(sorted(cells))) for name, cells in sorted(labels.items())
        ),
        position_sites=tuple(
            (l, tuple(sorted(cells))) for l, cells in sorted(positions.items())
        ),
        row_classes=row_cl,
        col_classes=col_cl,
    )


def grid_decode(
    code: GridCode, base: Optional[Signature] = None
) -> IncidenceStructure:
    """Read the structure back off the grid; rejects inconsistent codes.

    Without a declared ``base`` signature, arities are inferred from the
    realised positions (lone labels default to arity 1).
    """
    m, n = len(code.a_names), len(code.e_names)
    if code.rows != m + 1 or code.cols != n + 1:
        raise MalformedError("grid dimensions do not match the enumerations")
    if len(set(code.a_names) | set(code.e_names)) != m + n:
        raise MalformedError("element and tuple names are not distinct")
    if code.a_sites != tuple((i + 1, 0) for i in range(m)):
        raise MalformedError("element markers are off the first column")
    if code.e_sites != tuple((0, k + 1) for k in range(n)):
        raise MalformedError("tuple markers are off the first row")
    if (code.row_classes, code.col_classes) != _axis_classes(code.rows, code.cols):
        raise MalformedError("axis classes are not the mod-3 pattern")

    symbol_of: dict[int, str] = {}
    for name, cells in code.label_sites:
        for r, c in cells:
            if (r, c) not in set(code.e_sites):
                raise MalformedError(f"label {name!r} marks a non-tuple cell")
            if c - 1 in symbol_of:
                raise MalformedError(f"tuple {c - 1} carries two labels")
            symbol_of[c - 1] = name
    if set(symbol_of) != set(range(n)):
        raise MalformedError("some tuple cell carries no label")

    component: dict[tuple[int, int], int] = {}
    for l, cells in code.position_sites:
        for r, c in cells:
            if not (1 <= r <= m and 1 <= c <= n):
                raise MalformedError(f"incidence marker {(r, c)} out of range")
            if (l, c - 1) in component:
                raise MalformedError(f"tuple {c - 1} has two position-{l} entries")
            component[(l, c - 1)] = r - 1
    if base is not None and set(n for n, _ in code.label_sites) != set(base.symbols):
        raise MalformedError("label sets do not match the declared signature")
    rels: dict[str, list[tuple[str, ...]]] = {
        f"P_{name}": [] for name, _ in code.label_sites
    }
    max_l = max((l for l, _ in component), default=-1)
    if base is not None:
        max_l = max(max_l, base.max_arity - 1)
    for l in range(max_l + 1):
        rels[f"in_{l}"] = []
    for k in range(n):
        ls = sorted(l for l, kk in component if kk == k)
        if ls != list(range(len(ls))):
            raise MalformedError(f"tuple {k} skips a position")
        rels[f"P_{symbol_of[k]}"].append((code.e_names[k],))
        for l in ls:
            rels[f"in_{l}"].append((code.a_names[component[(l, k)]], code.e_names[k]))
    sig = Signature(
        tuple(
            sorted(
                [(f"P_{name}", 1) for name, _ in code.label_sites]
                + [(f"in_{l}", 2) for l in range(max_l + 1)]
            )
        )
    )
    raw = RelationalStructure.make(sig, code.a_names + code.e_names, rels)
    return as_incidence(raw, base if base is not None else infer_incidence_base(raw))


# ---------------------------------------------------------------------------
# bounded-width structures as coloured trees


@dataclass(frozen=True)
class DecompositionCode:
    """A structure of treewidth < k+1 as a coloured tree.

    Each vertex's colour points into a catalogue of structures with domains
    inside [k+1]; each tree edge carries the partial bijection identifying
    shared bag positions.
    """

    k: int
    base_signature: Signature
    tree: ColouredTree
    catalogue: tuple[RelationalStructure, ...]
    links: tuple[tuple[Vertex, tuple[tuple[int, int], ...]], ...]

    @property
    def colour_of(self) -> dict[Vertex, int]:
        out: dict[Vertex, int] = {}
        for i, cls in enumerate(self.tree.colours):
            for v in cls:
                out[v] = i
        return out


def _entry_key(entry: RelationalStructure):
    return (
        len(entry.domain),
        tuple(
            (name, tuple(sorted(entry.rel(name))))
            for name in entry.signature.symbols
        ),
    )


def decomposition_encode(
    A: RelationalStructure, D: TreeDecomposition, k: int
) -> DecompositionCode:
    """Colour the decomposition tree by the shape of each bag's induced
    substructure, renamed onto 0..|bag|-1 in sorted bag order."""
    check(D, A)
    if D.width > k:
        raise MalformedError(f"width {D.width} exceeds the bound {k}")
    pis: dict[Vertex, dict[str, int]] = {}
    entries: dict[Vertex, RelationalStructure] = {}
    for v in D.tree.sorted_vertices:
        bag = sorted(D.bag(v))
        pi = {x: i for i, x in enumerate(bag)}
        pis[v] = pi
        rels = {
            name: [
                tuple(str(pi[x]) for x in t)
                for t in A.rel(name)
                if all(x in pi for x in t)
            ]
            for name in A.signature.symbols
        }
        entries[v] = RelationalStructure.make(
            A.signature, tuple(str(i) for i in range(len(bag))), rels
        )
    catalogue = sorted({_entry_key(e): e for e in entries.values()}.values(),
                       key=_entry_key)
    index = {_entry_key(e): i for i, e in enumerate(catalogue)}
    colours = tuple(
        frozenset(
            v for v in D.tree.sorted_vertices if index[_entry_key(entries[v])] == i
        )
        for i in range(len(catalogue))
    )
    links = []
    for v in D.tree.sorted_vertices:
        parent = D.tree.parent(v)
        if parent is None:
            continue
        shared = sorted(set(pis[parent]) & set(pis[v]))
        links.append((v, tuple((pis[parent][x], pis[v][x]) for x in shared)))
    return DecompositionCode(
        k=k,
        base_signature=A.signature,
        tree=ColouredTree(D.tree, SUCCESSOR_MODE, colours),
        catalogue=tuple(catalogue),
        links=tuple(links),
    )


def decomposition_decode(code: DecompositionCode) -> IncidenceStructure:
    """Glue the catalogue pieces along the edge bijections.

    Element slots merge when an edge identifies them; tuple slots merge when
    they carry the same relation symbol and all their components merge along
    the same edge.  Transitivity then takes care of longer overlaps.
    """
    colour_of = code.colour_of
    tree = code.tree.domain
    for v in tree.sorted_vertices:
        if v not in colour_of:
            raise MalformedError("a tree vertex carries no colour")
        if not 0 <= colour_of[v] < len(code.catalogue):
            raise MalformedError("colour index out of range")
    for entry in code.catalogue:
        if entry.signature != code.base_signature:
            raise MalformedError("catalogue entry over the wrong signature")
        if len(entry.domain) > code.k + 1:
            raise MalformedError("catalogue entry larger than the width bound")

    link_map = dict(code.links)
    if set(link_map) != {v for v in tree.sorted_vertices if v != ()}:
        raise MalformedError("links must cover exactly the non-root vertices")

    local = {v: to_incidence(code.catalogue[colour_of[v]]) for v in tree.sorted_vertices}

    parent_uf: dict[tuple[Vertex, str], tuple[Vertex, str]] = {}

    def find(x: tuple[Vertex, str]) -> tuple[Vertex, str]:
        root = x
        while parent_uf.setdefault(root, root) != root:
            root = parent_uf[root]
        while parent_uf[x] != root:
            parent_uf[x], x = root, parent_uf[x]
        return root

    def unite(x: tuple[Vertex, str], y: tuple[Vertex, str]) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent_uf[max(rx, ry)] = min(rx, ry)

    for v in tree.sorted_vertices:
        for x in local[v].domain:
            find((v, x))

    for v, pairs in sorted(link_map.items()):
        u = tree.parent(v)
        assert u is not None
        nu, nv = len(local[u].a_part), len(local[v].a_part)
        if len({i for i, _ in pairs}) != len(pairs) or len(
            {j for _, j in pairs}
        ) != len(pairs):
            raise MalformedError(f"link into {v} is not a partial bijection")
        for i, j in pairs:
            if not (0 <= i < nu and 0 <= j < nv):
                raise MalformedError(f"link into {v} indexes outside the bags")
            unite((u, str(i)), (v, str(j)))
        pair_set = set(pairs)
        for e in local[u].e_part:
            sym_e, te = local[u].tuple_map[e]
            for f in local[v].e_part:
                sym_f, tf = local[v].tuple_map[f]
                if sym_e == sym_f and len(te) == len(tf):
                    if all((int(a), int(b)) in pair_set for a, b in zip(te, tf)):
                        unite((u, e), (v, f))

    a_classes: dict[tuple[Vertex, str], list[tuple[Vertex, str]]] = {}
    e_classes: dict[tuple[Vertex, str], list[tuple[Vertex, str]]] = {}
    for v in tree.sorted_vertices:
        for x in local[v].a_part:
            a_classes.setdefault(find((v, x)), []).append((v, x))
        for x in local[v].e_part:
            e_classes.setdefault(find((v, x)), []).append((v, x))
    a_name = {root: f"a{i}" for i, root in enumerate(sorted(a_classes))}
    e_name = {root: f"e{i}" for i, root in enumerate(sorted(e_classes))}

    sig_in = incidence_signature(code.base_signature)
    rels: dict[str, set[tuple[str, ...]]] = {name: set() for name in sig_in.symbols}
    for root, members in sorted(e_classes.items()):
        v, e = members[0]
        symbol, t = local[v].tuple_map[e]
        rels[f"P_{symbol}"].add((e_name[root],))
        for l, x in enumerate(t):
            rels[f"in_{l}"].add((a_name[find((v, x))], e_name[root]))
    raw = RelationalStructure.make(
        sig_in,
        tuple(a_name[r] for r in sorted(a_classes))
        + tuple(e_name[r] for r in sorted(e_classes)),
        {name: sorted(ts) for name, ts in rels.items()},
    )
    return as_incidence(raw, code.base_signature)


# ---------------------------------------------------------------------------
# minors by four parameter sets


def minor_apply(
    G: Graph,
    deleted_vertices: Iterable[str],
    deleted_edges: Iterable[Sequence[str]],
    contracted_edges: Iterable[Sequence[str]],
    representatives: Iterable[str],
) -> Optional[Graph]:
    """Apply a four-set minor description; None when the sets are
    inconsistent, mirroring how a transduction simply produces no output.

    Consistency asks: deletions name real vertices/edges, contracted edges
    survive the deletions, and the representatives pick exactly one vertex
    from every contracted class of size at least two and nothing else.
    """
    dv = frozenset(deleted_vertices)
    if not dv <= set(G.vertices):
        return None

    def norm(e: Sequence[str]) -> tuple[str, str]:
        a, b = e
        return (a, b) if a <= b else (b, a)

    all_edges = {norm(e) for e in G.edges}
    de = {norm(e) for e in deleted_edges}
    ce = {norm(e) for e in contracted_edges}
    if not de <= all_edges or not ce <= all_edges:
        return None
    if ce & de:
        return None
    if any(a in dv or b in dv for a, b in ce):
        return None

    keep_v = [v for v in G.vertices if v not in dv]
    keep_e = [
        e
        for e in sorted(all_edges - de)
        if e[0] not in dv and e[1] not in dv
    ]

    parent = {v: v for v in keep_v}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in sorted(ce):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    classes: dict[str, list[str]] = {}
    for v in keep_v:
        classes.setdefault(find(v), []).append(v)

    reps = frozenset(representatives)
    if not reps <= set(keep_v):
        return None
    label: dict[str, str] = {}
    for root, members in classes.items():
        chosen = reps & set(members)
        if len(members) == 1:
            if chosen:
                return None
            label[root] = members[0]
        else:
            if len(chosen) != 1:
                return None
            (label[root],) = chosen

    out_edges = set()
    for a, b in keep_e:
        ra, rb = find(a), find(b)
        if ra != rb:
            out_edges.add((label[ra], label[rb]))
    return Graph.make(sorted(label.values()), sorted(out_edges))


def minor_sweep(G: Graph, budget: int = 200_000) -> list[Graph]:
    """Every minor reachable through :func:`minor_apply`, one representative
    per isomorphism class.

    Sweeps all vertex deletions and all keep/delete/contract labellings of
    the remaining edges, choosing the least vertex of every merged class as
    its representative.
    """
    verts = list(G.vertices)
    cost = 0
    for mask in range(1 << len(verts)):
        alive = [v for i, v in enumerate(verts) if not mask >> i & 1]
        m = sum(1 for a, b in G.edges if a in alive and b in alive)
        cost += 3**m
        if cost > budget:
            raise BudgetError(f"minor sweep needs {cost}+ combinations")

    seen: dict[object, Graph] = {}
    for mask in range(1 << len(verts)):
        dead = [v for i, v in enumerate(verts) if mask >> i & 1]
        alive = set(verts) - set(dead)
        edges = sorted(e for e in G.edges if e[0] in alive and e[1] in alive)
        for assign in itertools.product((0, 1, 2), repeat=len(edges)):
            de = [e for e, a in zip(edges, assign) if a == 1]
            ce = [e for e, a in zip(edges, assign) if a == 2]
            parent = {v: v for v in alive}

            def find(v: str) -> str:
                while parent[v] != v:
                    parent[v] = parent[parent[v]]
                    v = parent[v]
                return v

            for a, b in ce:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
            sizes: dict[str, int] = {}
            for v in alive:
                r = find(v)
                sizes[r] = sizes.get(r, 0) + 1
            reps = [r for r, s in sizes.items() if s >= 2]
            H = minor_apply(G, dead, de, ce, reps)
            assert H is not None
            key = canonical_key(H.to_structure())
            if key not in seen:
                seen[key] = H
    return sorted(
        seen.values(), key=lambda H: (len(H.vertices), len(H.edges), H.vertices)
    )
