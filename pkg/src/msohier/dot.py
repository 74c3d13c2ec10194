"""Plain-text DOT export for graphs, trees, and decompositions.

Everything is emitted in sorted order so repeated runs produce identical
bytes; no drawing library is involved.
"""

from __future__ import annotations

from .decomposition import TreeDecomposition
from .graphs import Graph
from .structures import RelationalStructure, gaifman
from .trees import ColouredTree, TreeDomain, vertex_to_str


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_dot(G: Graph, name: str = "G") -> str:
    kind, arrow = ("digraph", "->") if G.directed else ("graph", "--")
    lines = [f"{kind} {_quote(name)} {{"]
    for v in G.vertices:
        lines.append(f"  {_quote(v)};")
    for a, b in sorted(G.edges):
        lines.append(f"  {_quote(a)} {arrow} {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _tree_lines(T: TreeDomain, label_of) -> list[str]:
    lines = []
    for v in T.sorted_vertices:
        node = vertex_to_str(v) or "root"
        lines.append(f"  {_quote(node)} [label={_quote(label_of(v))}];")
    for v in T.sorted_vertices:
        parent = T.parent(v)
        if parent is not None:
            lines.append(
                f"  {_quote(vertex_to_str(parent) or 'root')} -> "
                f"{_quote(vertex_to_str(v) or 'root')};"
            )
    return lines


def tree_dot(T: TreeDomain, name: str = "T") -> str:
    lines = [f"digraph {_quote(name)} {{"]
    lines += _tree_lines(T, lambda v: vertex_to_str(v) or "root")
    lines.append("}")
    return "\n".join(lines) + "\n"


def coloured_tree_dot(T: ColouredTree, name: str = "T") -> str:
    def label(v):
        hits = [str(i) for i, c in enumerate(T.colours) if v in c]
        base = vertex_to_str(v) or "root"
        return f"{base} [{','.join(hits)}]" if hits else base

    lines = [f"digraph {_quote(name)} {{"]
    lines += _tree_lines(T.domain, label)
    lines.append("}")
    return "\n".join(lines) + "\n"


def decomposition_dot(D: TreeDecomposition, name: str = "D") -> str:
    bag_map = D.bag_map

    def label(v):
        members = ", ".join(sorted(bag_map[v]))
        return f"{vertex_to_str(v) or 'root'}: {{{members}}}"

    lines = [f"digraph {_quote(name)} {{"]
    lines += _tree_lines(D.tree, label)
    lines.append("}")
    return "\n".join(lines) + "\n"


def structure_dot(A: RelationalStructure, name: str = "A") -> str:
    """The adjacency (Gaifman) view of a structure."""
    return graph_dot(gaifman(A), name)
