"""Placing finite graph families on the transduction hierarchy.

The hierarchy runs T_1, T_2, ... (bounded height-n treewidth), then the
path level P (bounded pathwidth), the tree level T_omega (bounded
treewidth), and finally the unrestricted level G.  A finite sample can never
prove a family unbounded, so the classifier reports the least level whose
characteristic measure stays constant across the sample and labels the
verdict as evidence, not proof.

Also here: the counting function B used to separate levels by growth rates.
Its definition as a set of functions collapses the one-point domains for
m <= 1, so we follow the summation formula the proofs actually use, which
counts the m = 1 term as 2^{cn}; the bounds below hold for that reading.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .decomposition import GraphLike, _as_graph, exact_width
from .errors import BudgetError, MalformedError
from .families import grid as grid_graph
from .families import tree_graph
from .graphs import Graph, is_minor, longest_path_order
from .iso import isomorphic
from .structures import RelationalStructure
from .transduction import Transduction, apply_all
from .trees import complete_tree


# ---------------------------------------------------------------------------
# the counting function


@dataclass(frozen=True)
class BCount:
    n: int
    k: int
    c: int
    value: int
    lower: Optional[int]
    upper: Optional[int]

    @property
    def bounds_ok(self) -> Optional[bool]:
        if self.lower is None or self.upper is None:
            return None
        return self.lower <= self.value <= self.upper


def _tree_size(m: int, n: int) -> int:
    """Number of sequences over an m-letter alphabet shorter than n."""
    return sum(m**i for i in range(n))


def count_B(n: int, k: int, c: int, budget: int = 1_000_000) -> BCount:
    """B(n, k, c) = sum over m <= k of 2^(c * |[m]^{<n}|).

    When n >= 1 and k >= 2 the result is sandwiched between 2^(c k^{n-1})
    and k * 2^(2 c k^{n-1}); the returned record carries both bounds so the
    caller can see the inequality checked on actual big integers.
    """
    if n < 0 or k < 1 or c < 1:
        raise MalformedError("need n >= 0, k >= 1, c >= 1")
    top = c * _tree_size(k, n)
    if top > budget:
        raise BudgetError(f"B(n={n}, k={k}, c={c}) needs {top} bits")
    value = sum(2 ** (c * _tree_size(m, n)) for m in range(1, k + 1))
    lower = upper = None
    if n >= 1 and k >= 2:
        lower = 2 ** (c * k ** (n - 1))
        upper = k * 2 ** (2 * c * k ** (n - 1))
    return BCount(n, k, c, value, lower, upper)


# ---------------------------------------------------------------------------
# sample evidence


@dataclass(frozen=True)
class SampleEvidence:
    name: str
    vertices: int
    widths: tuple[tuple[str, Optional[int]], ...]
    longest_path: int
    complete_trees: tuple[tuple[int, int], ...]
    grid_minor: int

    @property
    def width_map(self) -> dict[str, Optional[int]]:
        return dict(self.widths)


@dataclass(frozen=True)
class EvidenceReport:
    samples: tuple[SampleEvidence, ...]
    measures: tuple[str, ...]
    trends: tuple[tuple[str, str], ...]
    skipped: tuple[tuple[str, str], ...]
    verdict: str
    note: str


def _largest_complete_tree(G: Graph, height: int, budget: int) -> int:
    best = 0
    m = 1
    while True:
        if _tree_size(m, height) > len(G.vertices):
            break
        probe = tree_graph(complete_tree(m, height))
        try:
            if is_minor(probe, G, budget=budget) is None:
                break
        except BudgetError:
            break
        best = m
        m += 1
    return best


def _largest_grid(G: Graph, budget: int) -> int:
    best = 1
    g = 2
    while g * g <= len(G.vertices):
        try:
            if is_minor(grid_graph(g, g), G, budget=budget) is None:
                break
        except BudgetError:
            break
        best = g
        g += 1
    return best


def _trend(values: Sequence[int]) -> str:
    if len(values) < 2:
        return "insufficient data"
    if all(v == values[0] for v in values):
        return f"constant {values[0]}"
    if all(a <= b for a, b in zip(values, values[1:])):
        return f"nondecreasing {values[0]}..{values[-1]}"
    return f"varying {min(values)}..{max(values)}"


_DISCLAIMER = (
    "finite-sample evidence only: a sample can witness growth "
    "but never unboundedness"
)


def measure_sample(
    name: str,
    sample: GraphLike,
    measures: Sequence[str],
    width_budget: int = 12,
    minor_budget: int = 10,
) -> SampleEvidence:
    """All evidence for one sample: exact widths per measure (None when the
    budget rules it out), longest path, and the largest grid and complete
    trees found as minors."""
    G = _as_graph(sample)
    widths: list[tuple[str, Optional[int]]] = []
    for measure in measures:
        try:
            if measure.startswith("twd_"):
                w, _ = exact_width(G, "twdn", n=int(measure[4:]), budget=width_budget)
            else:
                w, _ = exact_width(G, measure, budget=width_budget)
            widths.append((measure, w))
        except BudgetError:
            widths.append((measure, None))
    return SampleEvidence(
        name=name,
        vertices=len(G.vertices),
        widths=tuple(widths),
        longest_path=longest_path_order(G),
        complete_trees=tuple(
            (h, _largest_complete_tree(G, h, minor_budget)) for h in (2, 3)
        ),
        grid_minor=_largest_grid(G, minor_budget),
    )


def _measure_star(args) -> SampleEvidence:
    return measure_sample(*args)


def classify_family(
    samples: Sequence[GraphLike],
    names: Optional[Sequence[str]] = None,
    max_depth: int = 2,
    width_budget: int = 12,
    minor_budget: int = 10,
    jobs: int = 1,
) -> EvidenceReport:
    """Measure every sample and report the least hierarchy level whose
    characteristic width stays constant.

    The measures run in hierarchy order: twd_1..twd_{max_depth} for the
    levels T_n, then pwd for P, then twd for T_omega.  Samples whose exact
    computation exceeds the budget are skipped for that measure and listed
    in the report.  Samples are independent, so jobs > 1 measures them in a
    process pool; results are merged in input order either way.
    """
    if not samples:
        raise MalformedError("cannot classify an empty family")
    if names is None:
        names = [f"sample{i}" for i in range(len(samples))]
    if len(names) != len(samples):
        raise MalformedError("one name per sample, please")

    measures = [f"twd_{i}" for i in range(1, max_depth + 1)] + ["pwd", "twd"]
    tasks = [
        (name, sample, measures, width_budget, minor_budget)
        for name, sample in zip(names, samples)
    ]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_measure_star, tasks))
    else:
        rows = [measure_sample(*t) for t in tasks]
    skipped = [
        (r.name, measure)
        for r in rows
        for measure, w in r.widths
        if w is None
    ]

    trends: list[tuple[str, str]] = []
    verdict = "G"
    for measure in measures:
        values = [r.width_map[measure] for r in rows if r.width_map[measure] is not None]
        trends.append((measure, _trend(values)))
    for measure in measures:
        values = [r.width_map[measure] for r in rows if r.width_map[measure] is not None]
        if len(values) >= 2 and all(v == values[0] for v in values):
            if measure.startswith("twd_"):
                verdict = f"T_{measure[4:]}"
            elif measure == "pwd":
                verdict = "P"
            else:
                verdict = "T_omega"
            break
    return EvidenceReport(
        samples=tuple(rows),
        measures=tuple(measures),
        trends=tuple(trends),
        skipped=tuple(skipped),
        verdict=f"{verdict}-consistent",
        note=_DISCLAIMER,
    )


# ---------------------------------------------------------------------------
# reductions between families


@dataclass(frozen=True)
class ReductionWitness:
    ok: bool
    matches: tuple[tuple[int, int, tuple[frozenset[str], ...]], ...]
    unmatched: tuple[int, ...]


def verify_reduction(
    c_samples: Sequence[RelationalStructure],
    tau: Transduction,
    k_samples: Sequence[RelationalStructure],
    budget: int = 4096,
    eval_budget: int = 2_000_000,
) -> ReductionWitness:
    """Check that every C-sample arises from some K-sample through tau.

    Returns the isomorphism matching found: one (C-index, K-index,
    parameter valuation) triple per matched C-sample.
    """
    outputs: list[list[tuple[tuple[frozenset[str], ...], RelationalStructure]]] = []
    for K in k_samples:
        if K.signature != tau.input_signature:
            outputs.append([])
            continue
        produced = apply_all(tau, K, budget=budget, eval_budget=eval_budget)
        outputs.append([(val, B) for val, B in produced])

    matches: list[tuple[int, int, tuple[frozenset[str], ...]]] = []
    unmatched: list[int] = []
    for i, C in enumerate(c_samples):
        hit = None
        if C.signature == tau.output_signature:
            for j, outs in enumerate(outputs):
                for val, B in outs:
                    if isomorphic(C, B):
                        hit = (i, j, val)
                        break
                if hit:
                    break
        if hit:
            matches.append(hit)
        else:
            unmatched.append(i)
    return ReductionWitness(not unmatched, tuple(matches), tuple(unmatched))
