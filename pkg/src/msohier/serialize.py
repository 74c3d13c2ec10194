"""JSON round-trips for every value the command line reads or writes.

Structures follow {"signature": [{"name", "arity"}], "domain": [...],
"relations": {name: [[...], ...]}}; tree domains are lists of direction
strings ("" for the root, "01" for child 1 of child 0); decompositions and
refinements key their bags by those strings.  Formulas travel as
s-expression text.  All emitters order their output so equal values produce
byte-identical documents.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .decomposition import TreeDecomposition
from .encodings import Cell, DecompositionCode, GridCode
from .errors import MalformedError, MsoHierError
from .graphs import Graph
from .logic import Formula, parse_formula, to_sexpr
from .partition import PartitionRefinement
from .structures import (
    IncidenceStructure,
    RelationalStructure,
    Signature,
)
from .transduction import DefinitionScheme, Transduction
from .trees import (
    ColouredTree,
    TreeDomain,
    Vertex,
    vertex_from_str,
    vertex_to_str,
)

Json = Any


def dump_json(data: Json) -> str:
    return json.dumps(data, indent=2) + "\n"


def _need(data: Mapping[str, Json], key: str) -> Json:
    if not isinstance(data, Mapping) or key not in data:
        raise MalformedError(f"missing field {key!r}")
    return data[key]


# ---------------------------------------------------------------------------
# signatures and structures


def signature_to_json(sig: Signature) -> Json:
    out: Json = [{"name": n, "arity": a} for n, a in sig.relations]
    return out


def signature_from_json(data: Json) -> Signature:
    if not isinstance(data, list):
        raise MalformedError("a signature is a list of {name, arity} entries")
    rels = []
    for entry in data:
        rels.append((str(_need(entry, "name")), int(_need(entry, "arity"))))
    return Signature(tuple(rels))


def structure_to_json(A: RelationalStructure) -> Json:
    doc: dict[str, Json] = {
        "signature": signature_to_json(A.signature),
        "domain": list(A.domain),
        "relations": {
            name: sorted(list(t) for t in tuples) for name, tuples in A.relations
        },
    }
    if A.constants:
        doc["constants"] = {name: value for name, value in A.constants}
    return doc


def structure_from_json(data: Json) -> RelationalStructure:
    sig = signature_from_json(_need(data, "signature"))
    domain = [str(x) for x in _need(data, "domain")]
    relations = {
        str(name): [tuple(str(x) for x in t) for t in tuples]
        for name, tuples in _need(data, "relations").items()
    }
    constants = data.get("constants")
    if constants is not None:
        sig = Signature(sig.relations, tuple(sorted(constants)))
    return RelationalStructure.make(sig, domain, relations, constants)


def graph_to_json(G: Graph) -> Json:
    return {
        "vertices": list(G.vertices),
        "edges": sorted(sorted(e) if not G.directed else list(e) for e in G.edges),
        "directed": G.directed,
    }


def graph_from_json(data: Json) -> Graph:
    edges = [(str(u), str(v)) for u, v in _need(data, "edges")]
    return Graph.make(
        [str(v) for v in _need(data, "vertices")],
        edges,
        directed=bool(data.get("directed", False)),
    )


def load_graph(data: Json) -> Graph:
    """Accept either the graph format or an edg-structure document."""
    if isinstance(data, Mapping) and "vertices" in data:
        return graph_from_json(data)
    return Graph.from_structure(structure_from_json(data))


# ---------------------------------------------------------------------------
# trees


def tree_to_json(T: TreeDomain) -> Json:
    return [vertex_to_str(v) for v in T.sorted_vertices]


def tree_from_json(data: Json) -> TreeDomain:
    if not isinstance(data, list):
        raise MalformedError("a tree domain is a list of direction strings")
    return TreeDomain.make(vertex_from_str(str(s)) for s in data)


def _vertex_set_to_json(vs: frozenset[Vertex]) -> Json:
    return [vertex_to_str(v) for v in sorted(vs)]


def coloured_tree_to_json(T: ColouredTree) -> Json:
    return {
        "tree": tree_to_json(T.domain),
        "mode": T.mode,
        "colours": [_vertex_set_to_json(c) for c in T.colours],
    }


def coloured_tree_from_json(data: Json) -> ColouredTree:
    return ColouredTree(
        tree_from_json(_need(data, "tree")),
        str(data.get("mode", "successor")),
        tuple(
            frozenset(vertex_from_str(str(s)) for s in colour)
            for colour in data.get("colours", [])
        ),
    )


# ---------------------------------------------------------------------------
# decompositions and refinements


def decomposition_to_json(D: TreeDecomposition) -> Json:
    return {
        "tree": tree_to_json(D.tree),
        "bags": {
            vertex_to_str(v): sorted(bag) for v, bag in D.bags
        },
    }


def decomposition_from_json(data: Json) -> TreeDecomposition:
    tree = tree_from_json(_need(data, "tree"))
    bags = {
        vertex_from_str(str(key)): frozenset(str(x) for x in bag)
        for key, bag in _need(data, "bags").items()
    }
    return TreeDecomposition.make(tree, bags)


def refinement_to_json(pi: PartitionRefinement) -> Json:
    return {
        "tree": tree_to_json(pi.tree),
        "blocks": {vertex_to_str(v): sorted(b) for v, b in pi.blocks},
        "classes": {
            vertex_to_str(v): [sorted(c) for c in cs] for v, cs in pi.classes
        },
    }


def refinement_from_json(
    data: Json, structure: IncidenceStructure
) -> PartitionRefinement:
    tree = tree_from_json(_need(data, "tree"))
    blocks = {
        vertex_from_str(str(k)): frozenset(str(x) for x in b)
        for k, b in _need(data, "blocks").items()
    }
    classes = {
        vertex_from_str(str(k)): [frozenset(str(x) for x in c) for c in cs]
        for k, cs in _need(data, "classes").items()
    }
    return PartitionRefinement.make(structure, tree, blocks, classes)


# ---------------------------------------------------------------------------
# formulas, schemes, transductions


def formula_to_json(f: Formula) -> Json:
    return to_sexpr(f)


def formula_from_json(data: Json) -> Formula:
    if not isinstance(data, str):
        raise MalformedError("a formula is an s-expression string")
    return parse_formula(data)


def scheme_to_json(scheme: DefinitionScheme) -> Json:
    return {
        "output_signature": signature_to_json(scheme.output_signature),
        "chi": to_sexpr(scheme.chi),
        "delta": to_sexpr(scheme.delta),
        "phis": {name: to_sexpr(f) for name, f in scheme.phis},
    }


def scheme_from_json(data: Json) -> DefinitionScheme:
    return DefinitionScheme.make(
        signature_from_json(_need(data, "output_signature")),
        parse_formula(str(_need(data, "chi"))),
        parse_formula(str(_need(data, "delta"))),
        {
            str(name): parse_formula(str(text))
            for name, text in _need(data, "phis").items()
        },
    )


def transduction_to_json(tau: Transduction) -> Json:
    doc = scheme_to_json(tau.scheme)
    return {
        "input_signature": signature_to_json(tau.input_signature),
        "copies": tau.copies,
        "params": tau.params,
        **doc,
    }


def transduction_from_json(data: Json) -> Transduction:
    scheme = scheme_from_json(data)
    return Transduction.make(
        signature_from_json(_need(data, "input_signature")),
        int(_need(data, "copies")),
        int(_need(data, "params")),
        scheme.output_signature,
        scheme.chi,
        scheme.delta,
        dict(scheme.phis),
    )


# ---------------------------------------------------------------------------
# words and the two packaged codes


def word_to_text(word: tuple[int, ...]) -> str:
    return " ".join(str(x) for x in word)


def word_from_text(text: str) -> tuple[int, ...]:
    parts = text.split()
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise MalformedError(f"bad word: {exc}") from None


def _cells_to_json(cells: tuple[Cell, ...]) -> Json:
    return [[r, c] for r, c in cells]


def _cells_from_json(data: Json) -> tuple[Cell, ...]:
    return tuple((int(r), int(c)) for r, c in data)


def grid_code_to_json(code: GridCode) -> Json:
    return {
        "rows": code.rows,
        "cols": code.cols,
        "a_names": list(code.a_names),
        "e_names": list(code.e_names),
        "a_sites": _cells_to_json(code.a_sites),
        "e_sites": _cells_to_json(code.e_sites),
        "labels": {name: _cells_to_json(cs) for name, cs in code.label_sites},
        "positions": {str(i): _cells_to_json(cs) for i, cs in code.position_sites},
        "row_classes": [_cells_to_json(cs) for cs in code.row_classes],
        "col_classes": [_cells_to_json(cs) for cs in code.col_classes],
    }


def grid_code_from_json(data: Json) -> GridCode:
    return GridCode(
        rows=int(_need(data, "rows")),
        cols=int(_need(data, "cols")),
        a_names=tuple(str(x) for x in _need(data, "a_names")),
        e_names=tuple(str(x) for x in _need(data, "e_names")),
        a_sites=_cells_from_json(_need(data, "a_sites")),
        e_sites=_cells_from_json(_need(data, "e_sites")),
        label_sites=tuple(
            (str(name), _cells_from_json(cs))
            for name, cs in sorted(_need(data, "labels").items())
        ),
        position_sites=tuple(
            (int(i), _cells_from_json(cs))
            for i, cs in sorted(
                _need(data, "positions").items(), key=lambda kv: int(kv[0])
            )
        ),
        row_classes=tuple(
            _cells_from_json(cs) for cs in _need(data, "row_classes")
        ),
        col_classes=tuple(
            _cells_from_json(cs) for cs in _need(data, "col_classes")
        ),
    )


def decomposition_code_to_json(code: DecompositionCode) -> Json:
    return {
        "k": code.k,
        "base_signature": signature_to_json(code.base_signature),
        "tree": coloured_tree_to_json(code.tree),
        "catalogue": [structure_to_json(entry) for entry in code.catalogue],
        "links": {
            vertex_to_str(v): [[a, b] for a, b in pairs]
            for v, pairs in code.links
        },
    }


def decomposition_code_from_json(data: Json) -> DecompositionCode:
    links = tuple(
        sorted(
            (
                vertex_from_str(str(key)),
                tuple((int(a), int(b)) for a, b in pairs),
            )
            for key, pairs in _need(data, "links").items()
        )
    )
    return DecompositionCode(
        k=int(_need(data, "k")),
        base_signature=signature_from_json(_need(data, "base_signature")),
        tree=coloured_tree_from_json(_need(data, "tree")),
        catalogue=tuple(
            structure_from_json(entry) for entry in _need(data, "catalogue")
        ),
        links=links,
    )


# ---------------------------------------------------------------------------
# errors, for machine-readable failure output


def error_to_json(exc: Exception) -> Json:
    kind = exc.kind if isinstance(exc, MsoHierError) else "internal"
    return {"error": kind, "message": str(exc)}
