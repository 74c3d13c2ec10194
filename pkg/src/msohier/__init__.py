"""Finite relational structures, monadic second-order logic over them, and
the transduction/decomposition toolkit for comparing structure families.

The usual entry points:

- build structures (:mod:`msohier.structures`, :mod:`msohier.families`),
- evaluate restricted set-quantifier formulas (:mod:`msohier.logic`),
- transform structures and translate sentences backwards
  (:mod:`msohier.transduction`),
- measure widths exactly and shape decompositions
  (:mod:`msohier.decomposition`, :mod:`msohier.partition`),
- move between representations (:mod:`msohier.encodings`),
- and place sampled families on the hierarchy (:mod:`msohier.hierarchy`).
"""

from .decomposition import (
    TreeDecomposition,
    dfs_decomposition,
    exact_width,
    extract_tree,
    is_strict,
    level_order,
    reduce_height,
    strictify,
    validate,
)
from .encodings import (
    DecompositionCode,
    GridCode,
    decomposition_decode,
    decomposition_encode,
    grid_classes,
    grid_decode,
    grid_encode,
    grid_orient,
    grid_orient_scheme,
    minor_apply,
    minor_sweep,
    tree_word_decode,
    tree_word_decode_scheme,
    tree_word_encode,
)
from .errors import (
    BudgetError,
    MalformedError,
    MsoHierError,
    QuotientError,
    ScopeError,
)
from .families import generate
from .graphs import Graph, is_minor, longest_path_order
from .hierarchy import (
    BCount,
    EvidenceReport,
    ReductionWitness,
    SampleEvidence,
    classify_family,
    count_B,
    measure_sample,
    verify_reduction,
)
from .iso import canonical_key, isomorphic
from .logic import evaluate, mtype, parse_formula, rank, theory_equal, to_sexpr
from .partition import (
    PartitionRefinement,
    RefinementReport,
    random_refinement,
    refinement_from_interpretation,
    to_tree_decomposition,
    validate_refinement,
)
from .structures import (
    IncidenceStructure,
    RelationalStructure,
    Signature,
    as_incidence,
    example_structure,
    from_incidence,
    gaifman,
    is_k_sparse,
    signature,
    to_incidence,
)
from .transduction import (
    DefinitionScheme,
    Transduction,
    apply,
    apply_all,
    backwards,
    backwards_closed,
    builtin,
    compose,
)
from .trees import ColouredTree, TreeDomain, complete_tree

__version__ = "0.1.0"

__all__ = [
    "BCount",
    "BudgetError",
    "ColouredTree",
    "DecompositionCode",
    "DefinitionScheme",
    "EvidenceReport",
    "Graph",
    "GridCode",
    "IncidenceStructure",
    "MalformedError",
    "MsoHierError",
    "PartitionRefinement",
    "QuotientError",
    "ReductionWitness",
    "RefinementReport",
    "RelationalStructure",
    "SampleEvidence",
    "ScopeError",
    "Signature",
    "Transduction",
    "TreeDecomposition",
    "TreeDomain",
    "apply",
    "apply_all",
    "as_incidence",
    "backwards",
    "backwards_closed",
    "builtin",
    "canonical_key",
    "classify_family",
    "complete_tree",
    "compose",
    "count_B",
    "decomposition_decode",
    "decomposition_encode",
    "dfs_decomposition",
    "evaluate",
    "exact_width",
    "example_structure",
    "extract_tree",
    "from_incidence",
    "gaifman",
    "generate",
    "grid_classes",
    "grid_decode",
    "grid_encode",
    "grid_orient",
    "grid_orient_scheme",
    "is_k_sparse",
    "is_minor",
    "is_strict",
    "isomorphic",
    "level_order",
    "longest_path_order",
    "measure_sample",
    "minor_apply",
    "minor_sweep",
    "mtype",
    "parse_formula",
    "random_refinement",
    "rank",
    "reduce_height",
    "refinement_from_interpretation",
    "signature",
    "strictify",
    "theory_equal",
    "to_incidence",
    "to_sexpr",
    "to_tree_decomposition",
    "tree_word_decode",
    "tree_word_decode_scheme",
    "tree_word_encode",
    "validate",
    "validate_refinement",
    "verify_reduction",
]
