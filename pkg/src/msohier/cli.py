"""Command-line surface: every library operation behind one executable.

All outputs are deterministic given the inputs and flags.  Results go to
stdout; domain failures print a machine-readable error document to stderr
and exit with status 1; usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Any, Optional

from . import dot as dot_mod
from . import report as report_mod
from . import serialize as ser
from .decomposition import (
    dfs_decomposition,
    exact_width,
    reduce_height,
    strictify,
    validate,
)
from .encodings import (
    decomposition_decode,
    decomposition_encode,
    grid_decode,
    grid_encode,
    minor_apply,
    minor_sweep,
    tree_word_decode,
    tree_word_decode_scheme,
    tree_word_encode,
)
from .errors import MalformedError, MsoHierError
from .graphs import Graph
from .hierarchy import classify_family, count_B, verify_reduction
from .iso import isomorphic
from .logic import (
    evaluate,
    free_vars,
    modulus_bound,
    mtype,
    parse_formula,
    rank,
    to_sexpr,
    type_key,
)
from .partition import (
    to_tree_decomposition,
    validate_refinement,
)
from .structures import (
    RelationalStructure,
    as_incidence,
    gaifman,
    infer_incidence_base,
    is_k_sparse,
    to_incidence,
)
from .transduction import Transduction, apply, apply_all, backwards, backwards_closed, compose

Json = Any


# ---------------------------------------------------------------------------
# small IO helpers


def _read_json(path: str) -> Json:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedError(f"{path}: {exc}") from None


def _write_file(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(data: Json) -> None:
    sys.stdout.write(ser.dump_json(data))


def _load_structure(path: str) -> RelationalStructure:
    data = _read_json(path)
    if isinstance(data, dict) and "vertices" in data:
        return ser.graph_from_json(data).to_structure()
    return ser.structure_from_json(data)


def _load_graphlike(path: str):
    data = _read_json(path)
    if isinstance(data, dict) and "vertices" in data:
        return ser.graph_from_json(data)
    return ser.structure_from_json(data)


def _load_formula(args):
    if getattr(args, "sexpr", None) is not None:
        return parse_formula(args.sexpr)
    with open(args.formula, "r", encoding="utf-8") as fh:
        return parse_formula(fh.read())


def _maybe_dot(args, text: str) -> None:
    if getattr(args, "dot", None):
        _write_file(args.dot, text)


def _structure_table(A: RelationalStructure) -> str:
    lines = [
        "signature: "
        + " ".join(f"{n}/{a}" for n, a in A.signature.relations),
        "domain: " + " ".join(A.domain),
    ]
    for name, tuples in A.relations:
        shown = " ".join("(" + ",".join(t) + ")" for t in sorted(tuples))
        lines.append(f"{name}: {shown}")
    return "\n".join(lines)


def _emit_structure(args, A: RelationalStructure) -> None:
    if args.format == "json":
        _emit_json(ser.structure_to_json(A))
    else:
        _emit(_structure_table(A))
    _maybe_dot(args, dot_mod.structure_dot(A))


def _emit_graph(args, G: Graph) -> None:
    if args.format == "json":
        _emit_json(ser.graph_to_json(G))
    else:
        arrow = "->" if G.directed else "--"
        lines = ["vertices: " + " ".join(G.vertices)]
        lines += [f"{a} {arrow} {b}" for a, b in sorted(G.edges)]
        _emit("\n".join(lines))
    _maybe_dot(args, dot_mod.graph_dot(G))


def _emit_decomposition(args, D) -> None:
    _emit_json(ser.decomposition_to_json(D))
    _maybe_dot(args, dot_mod.decomposition_dot(D))


def _incidence_of(path: str, base_path: Optional[str]):
    raw = _load_structure(path)
    base = (
        ser.signature_from_json(_read_json(base_path))
        if base_path
        else infer_incidence_base(raw)
    )
    return as_incidence(raw, base)


def _parse_names(text: str) -> list[str]:
    return [x for x in text.split(",") if x]


def _parse_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for chunk in text.split(";"):
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise MalformedError(f"bad pair {chunk!r}; expected 'u,v'")
        pairs.append((parts[0], parts[1]))
    return pairs


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


# ---------------------------------------------------------------------------
# structure commands


def cmd_structure_incidence(args) -> int:
    A = _load_structure(args.input)
    _emit_structure(args, to_incidence(A).structure)
    return 0


def cmd_structure_gaifman(args) -> int:
    A = _load_structure(args.input)
    _emit_graph(args, gaifman(A))
    return 0


def cmd_structure_sparse(args) -> int:
    A = _load_structure(args.input)
    ok, witness = is_k_sparse(A, args.k, budget=args.budget or 20)
    if args.format == "json":
        doc: Json = {"sparse": ok, "k": args.k}
        if witness is not None:
            doc["witness"] = {"subset": sorted(witness[0]), "relation": witness[1]}
        _emit_json(doc)
    else:
        _emit("true" if ok else "false")
    return 0


def cmd_structure_iso(args) -> int:
    A = _load_structure(args.left)
    B = _load_structure(args.right)
    ok = isomorphic(A, B)
    if args.format == "json":
        _emit_json({"isomorphic": ok})
    else:
        _emit("true" if ok else "false")
    return 0


# ---------------------------------------------------------------------------
# logic commands


def cmd_logic_eval(args) -> int:
    A = _load_structure(args.input)
    f = _load_formula(args)
    if free_vars(f):
        raise MalformedError(f"not a sentence; free variables {sorted(free_vars(f))}")
    value = evaluate(A, f, {}, args.budget or 2_000_000)
    if args.format == "json":
        _emit_json({"value": value})
    else:
        _emit("true" if value else "false")
    return 0


def cmd_logic_rank(args) -> int:
    f = _load_formula(args)
    r, q = rank(f), modulus_bound(f)
    if args.format == "json":
        _emit_json({"rank": r, "modulus": q})
    else:
        _emit(f"rank {r}\nmodulus {q}")
    return 0


def cmd_logic_types(args) -> int:
    digests = []
    for path in args.inputs:
        A = _load_structure(path)
        t = mtype(A, (), args.rank, args.mod, args.budget or 4_000_000)
        digests.append(
            (
                _stem(path),
                hashlib.sha256(type_key(t).encode()).hexdigest()[:16],
            )
        )
    equal = len({d for _, d in digests}) == 1
    if args.format == "json":
        _emit_json(
            {
                "rank": args.rank,
                "modulus": args.mod,
                "digests": {name: d for name, d in digests},
                "equal": equal,
            }
        )
    else:
        for name, d in digests:
            _emit(f"{name}: {d}")
        if len(digests) > 1:
            _emit("equal" if equal else "different")
    return 0


# ---------------------------------------------------------------------------
# transduction commands


def _load_transduction(path: str) -> Transduction:
    return ser.transduction_from_json(_read_json(path))


def cmd_transduce_apply(args) -> int:
    tau = _load_transduction(args.transduction)
    A = _load_structure(args.input)
    if args.param is not None:
        params = [frozenset(_parse_names(p)) for p in args.param]
        B = apply(tau, A, params, budget=args.budget or 2_000_000)
        if B is None:
            if args.format == "json":
                _emit_json({"defined": False})
            else:
                _emit("undefined")
        else:
            _emit_structure(args, B)
        return 0
    outputs = apply_all(tau, A, budget=args.budget or 4096)
    if args.format == "json":
        _emit_json(
            [
                {
                    "params": [sorted(S) for S in val],
                    "output": ser.structure_to_json(B),
                }
                for val, B in outputs
            ]
        )
    else:
        _emit(f"{len(outputs)} outputs")
        for val, B in outputs:
            shown = " ".join("{" + ",".join(sorted(S)) + "}" for S in val)
            _emit(f"params {shown or '-'}: {len(B.domain)} elements")
    return 0


def cmd_transduce_backwards(args) -> int:
    tau = _load_transduction(args.transduction)
    f = _load_formula(args)
    out = backwards_closed(tau, f) if args.closed else backwards(tau, f)
    if args.format == "json":
        _emit_json({"formula": to_sexpr(out)})
    else:
        _emit(to_sexpr(out))
    return 0


def cmd_transduce_compose(args) -> int:
    sigma = _load_transduction(args.outer)
    tau = _load_transduction(args.inner)
    rho = compose(sigma, tau)
    _emit_json(ser.transduction_to_json(rho))
    return 0


# ---------------------------------------------------------------------------
# decomposition commands


def cmd_decomp_exact(args) -> int:
    A = _load_graphlike(args.input)
    width, witness = exact_width(
        A, args.mode, n=args.n, engine=args.engine, budget=args.budget or 10
    )
    if args.witness:
        _write_file(args.witness, ser.dump_json(ser.decomposition_to_json(witness)))
    if args.format == "json":
        doc = {"mode": args.mode, "width": width}
        if args.n is not None:
            doc["n"] = args.n
        doc["witness"] = ser.decomposition_to_json(witness)
        _emit_json(doc)
    else:
        _emit(str(width))
    _maybe_dot(args, dot_mod.decomposition_dot(witness))
    return 0


def cmd_decomp_validate(args) -> int:
    D = ser.decomposition_from_json(_read_json(args.decomposition))
    A = _load_graphlike(args.input)
    problems = validate(D, A)
    if args.format == "json":
        _emit_json({"valid": not problems, "problems": problems})
    else:
        _emit("valid" if not problems else "\n".join(problems))
    return 0


def cmd_decomp_strictify(args) -> int:
    D = ser.decomposition_from_json(_read_json(args.decomposition))
    A = _load_graphlike(args.input)
    _emit_decomposition(args, strictify(D, A))
    return 0


def cmd_decomp_dfs(args) -> int:
    A = _load_graphlike(args.input)
    _emit_decomposition(args, dfs_decomposition(A))
    return 0


def cmd_decomp_reduce(args) -> int:
    D = ser.decomposition_from_json(_read_json(args.decomposition))
    _emit_decomposition(args, reduce_height(D, args.n))
    return 0


# ---------------------------------------------------------------------------
# partition commands


def cmd_partition_validate(args) -> int:
    I = _incidence_of(args.input, args.base)
    pi = ser.refinement_from_json(_read_json(args.refinement), I)
    rep = validate_refinement(pi)
    if args.format == "json":
        _emit_json(
            {"valid": rep.valid, "width": rep.width, "violations": list(rep.violations)}
        )
    else:
        if rep.valid:
            _emit(f"valid, width {rep.width}")
        else:
            _emit("\n".join(rep.violations))
    return 0


def cmd_partition_convert(args) -> int:
    I = _incidence_of(args.input, args.base)
    pi = ser.refinement_from_json(_read_json(args.refinement), I)
    _emit_decomposition(args, to_tree_decomposition(pi))
    return 0


# ---------------------------------------------------------------------------
# encoding commands


def cmd_encode_treeword(args) -> int:
    if args.scheme:
        if args.n is None:
            raise MalformedError("--scheme needs --n (the level bound)")
        _emit_json(ser.transduction_to_json(tree_word_decode_scheme(args.n)))
        return 0
    if args.word is not None:
        T = tree_word_decode(ser.word_from_text(args.word))
        _emit_json(ser.tree_to_json(T))
        _maybe_dot(args, dot_mod.tree_dot(T))
        return 0
    if args.input is None:
        raise MalformedError("need a tree file, --word, or --scheme")
    T = ser.tree_from_json(_read_json(args.input))
    n = args.n if args.n is not None else (T.height + 1 if len(T) else 1)
    _emit(ser.word_to_text(tree_word_encode(T, n)))
    return 0


def cmd_encode_grid(args) -> int:
    if args.decode:
        code = ser.grid_code_from_json(_read_json(args.input))
        base = ser.signature_from_json(_read_json(args.base)) if args.base else None
        I = grid_decode(code, base)
        _emit_structure(args, I.structure)
        return 0
    A = _load_structure(args.input)
    _emit_json(ser.grid_code_to_json(grid_encode(A)))
    return 0


def cmd_encode_decomp(args) -> int:
    if args.decode:
        code = ser.decomposition_code_from_json(_read_json(args.input))
        I = decomposition_decode(code)
        _emit_structure(args, I.structure)
        return 0
    if args.decomposition is None:
        raise MalformedError("encoding needs a decomposition file")
    A = _load_structure(args.input)
    D = ser.decomposition_from_json(_read_json(args.decomposition))
    code = decomposition_encode(A, D, args.k if args.k is not None else D.width)
    _emit_json(ser.decomposition_code_to_json(code))
    _maybe_dot(args, dot_mod.coloured_tree_dot(code.tree))
    return 0


def cmd_encode_minor(args) -> int:
    data = _read_json(args.input)
    G = ser.load_graph(data)
    if args.sweep:
        minors = minor_sweep(G, budget=args.budget or 200_000)
        if args.format == "json":
            _emit_json([ser.graph_to_json(H) for H in minors])
        else:
            _emit(f"{len(minors)} minors")
            for H in minors:
                es = " ".join(f"{a}-{b}" for a, b in sorted(H.edges))
                _emit(f"[{' '.join(H.vertices)}] {es}")
        return 0
    H = minor_apply(
        G,
        frozenset(_parse_names(args.delete_vertices)),
        frozenset(_parse_pairs(args.delete_edges)),
        frozenset(_parse_pairs(args.contract)),
        frozenset(_parse_names(args.reps)),
    )
    if H is None:
        if args.format == "json":
            _emit_json({"defined": False})
        else:
            _emit("undefined")
        return 0
    _emit_graph(args, H)
    return 0


# ---------------------------------------------------------------------------
# hierarchy commands


def cmd_hierarchy_countb(args) -> int:
    r = count_B(args.n, args.k, args.c, budget=args.budget or 1_000_000)
    if args.format == "json":
        _emit_json(
            {
                "n": r.n,
                "k": r.k,
                "c": r.c,
                "value": str(r.value),
                "lower": None if r.lower is None else str(r.lower),
                "upper": None if r.upper is None else str(r.upper),
                "bounds_ok": r.bounds_ok,
            }
        )
    else:
        _emit(str(r.value))
        if r.bounds_ok is not None:
            _emit("bounds OK" if r.bounds_ok else "bounds FAIL")
    return 0


def cmd_hierarchy_classify(args) -> int:
    samples = [_load_graphlike(p) for p in args.inputs]
    names = [_stem(p) for p in args.inputs]
    rep = classify_family(
        samples,
        names,
        max_depth=args.max_depth,
        width_budget=args.budget or 12,
        jobs=args.jobs,
    )
    if args.report:
        csv_path = args.report + ".csv"
        fig_path = args.report + ".png"
        _write_file(csv_path, report_mod.report_csv(rep))
        report_mod.report_figure(rep, fig_path)
        sys.stderr.write(f"wrote {csv_path} and {fig_path}\n")
    if args.format == "json":
        _emit_json(report_mod.report_json(rep))
    else:
        _emit(report_mod.report_table(rep))
    return 0


def cmd_hierarchy_verify(args) -> int:
    tau = _load_transduction(args.transduction)
    cs = [_load_structure(p) for p in args.c_samples]
    ks = [_load_structure(p) for p in args.k_samples]
    w = verify_reduction(cs, tau, ks, budget=args.budget or 4096)
    if args.format == "json":
        _emit_json(
            {
                "ok": w.ok,
                "matches": [
                    {"c": i, "k": j, "params": [sorted(S) for S in val]}
                    for i, j, val in w.matches
                ],
                "unmatched": list(w.unmatched),
            }
        )
    else:
        _emit("true" if w.ok else "false")
        for i, j, val in w.matches:
            shown = " ".join("{" + ",".join(sorted(S)) + "}" for S in val)
            _emit(f"{args.c_samples[i]} <- {args.k_samples[j]} params {shown or '-'}")
        for i in w.unmatched:
            _emit(f"{args.c_samples[i]} unmatched")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--budget", type=int, default=None, help="work budget")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")
    common.add_argument("--dot", metavar="PATH", help="also write DOT here")
    common.add_argument(
        "--format", choices=("json", "table"), default="table", help="output style"
    )

    parser = argparse.ArgumentParser(
        prog="msohier",
        description="finite structures, their logic, and their decompositions",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, help=None):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    st = groups.add_parser("structure", help="structure inspection").add_subparsers(
        dest="cmd", required=True
    )
    p = leaf(st, "incidence", cmd_structure_incidence, "incidence encoding")
    p.add_argument("input")
    p = leaf(st, "gaifman", cmd_structure_gaifman, "adjacency graph")
    p.add_argument("input")
    p = leaf(st, "sparse", cmd_structure_sparse, "k-sparsity check")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("input")
    p = leaf(st, "iso", cmd_structure_iso, "isomorphism check")
    p.add_argument("left")
    p.add_argument("right")

    lg = groups.add_parser("logic", help="formula tools").add_subparsers(
        dest="cmd", required=True
    )

    def formula_args(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--sexpr", help="formula as inline s-expression")
        g.add_argument("--formula", help="file holding the s-expression")

    p = leaf(lg, "eval", cmd_logic_eval, "evaluate a sentence")
    formula_args(p)
    p.add_argument("input")
    p = leaf(lg, "rank", cmd_logic_rank, "rank and modulus")
    formula_args(p)
    p = leaf(lg, "types", cmd_logic_types, "type digests")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--mod", type=int, default=1, help="cardinality modulus bound")
    p.add_argument("inputs", nargs="+")

    tr = groups.add_parser("transduce", help="transduction tools").add_subparsers(
        dest="cmd", required=True
    )
    p = leaf(tr, "apply", cmd_transduce_apply, "run on a structure")
    p.add_argument("transduction")
    p.add_argument("input")
    p.add_argument(
        "--param",
        action="append",
        help="one parameter set as comma-separated elements (repeatable)",
    )
    p = leaf(tr, "backwards", cmd_transduce_backwards, "translate a sentence")
    p.add_argument("transduction")
    formula_args(p)
    p.add_argument(
        "--closed",
        action="store_true",
        help="existentially close the parameters",
    )
    p = leaf(tr, "compose", cmd_transduce_compose, "compose two transductions")
    p.add_argument("outer", help="runs second")
    p.add_argument("inner", help="runs first")

    dc = groups.add_parser("decomp", help="tree decompositions").add_subparsers(
        dest="cmd", required=True
    )
    p = leaf(dc, "exact", cmd_decomp_exact, "exact width with witness")
    p.add_argument("--mode", choices=("twd", "pwd", "twdn"), default="twd")
    p.add_argument("--n", type=int, default=None, help="height bound for twdn")
    p.add_argument("--engine", choices=("dp", "search"), default="dp")
    p.add_argument("--witness", metavar="PATH", help="write the witness here")
    p.add_argument("input")
    p = leaf(dc, "validate", cmd_decomp_validate, "check the axioms")
    p.add_argument("decomposition")
    p.add_argument("input")
    p = leaf(dc, "strictify", cmd_decomp_strictify, "repair to strict form")
    p.add_argument("decomposition")
    p.add_argument("input")
    p = leaf(dc, "dfs", cmd_decomp_dfs, "depth-first decomposition")
    p.add_argument("input")
    p = leaf(dc, "reduce", cmd_decomp_reduce, "contract levels to height n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("decomposition")

    pt = groups.add_parser("partition", help="partition refinements").add_subparsers(
        dest="cmd", required=True
    )
    p = leaf(pt, "validate", cmd_partition_validate, "check refinement axioms")
    p.add_argument("input", help="incidence structure")
    p.add_argument("refinement")
    p.add_argument("--base", help="base signature file")
    p = leaf(pt, "convert", cmd_partition_convert, "refinement to decomposition")
    p.add_argument("input", help="incidence structure")
    p.add_argument("refinement")
    p.add_argument("--base", help="base signature file")

    en = groups.add_parser("encode", help="structure encodings").add_subparsers(
        dest="cmd", required=True
    )
    p = leaf(en, "treeword", cmd_encode_treeword, "trees as level words")
    p.add_argument("input", nargs="?", help="tree domain file")
    p.add_argument("--n", type=int, default=None, help="level bound")
    p.add_argument("--word", help="decode this word instead")
    p.add_argument(
        "--scheme", action="store_true", help="print the decoding transduction"
    )
    p = leaf(en, "grid", cmd_encode_grid, "structures on grids")
    p.add_argument("input")
    p.add_argument("--decode", action="store_true")
    p.add_argument("--base", help="base signature file for decoding")
    p = leaf(en, "decomp", cmd_encode_decomp, "structures as coloured trees")
    p.add_argument("input", help="structure, or code with --decode")
    p.add_argument("decomposition", nargs="?")
    p.add_argument("--k", type=int, default=None, help="bag budget (width < k+1)")
    p.add_argument("--decode", action="store_true")
    p = leaf(en, "minor", cmd_encode_minor, "minor operations")
    p.add_argument("input")
    p.add_argument("--delete-vertices", default="", metavar="a,b")
    p.add_argument("--delete-edges", default="", metavar="u,v;x,y")
    p.add_argument("--contract", default="", metavar="u,v;x,y")
    p.add_argument("--reps", default="", metavar="a,b")
    p.add_argument("--sweep", action="store_true", help="enumerate all minors")

    hi = groups.add_parser("hierarchy", help="classification").add_subparsers(
        dest="cmd", required=True
    )
    p = leaf(hi, "countB", cmd_hierarchy_countb, "the counting function")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("c", type=int)
    p = leaf(hi, "classify", cmd_hierarchy_classify, "place a sample family")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--max-depth", type=int, default=2)
    p.add_argument(
        "--report",
        metavar="PREFIX",
        help="write PREFIX.csv and PREFIX.png",
    )
    p = leaf(hi, "verify", cmd_hierarchy_verify, "check a sample reduction")
    p.add_argument("transduction")
    p.add_argument("--c-samples", nargs="+", required=True)
    p.add_argument("--k-samples", nargs="+", required=True)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MsoHierError as exc:
        sys.stderr.write(ser.dump_json(ser.error_to_json(exc)))
        return 1
    except OSError as exc:
        sys.stderr.write(ser.dump_json({"error": "io", "message": str(exc)}))
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
