"""Rendering classification evidence: JSON, CSV, a text table, and a figure.

The figure writer uses the non-interactive matplotlib backend and writes
straight to a file, so it works in headless environments.
"""

from __future__ import annotations

import csv
import io
from typing import Any

from .hierarchy import EvidenceReport

Json = Any


def report_json(report: EvidenceReport) -> Json:
    return {
        "verdict": report.verdict,
        "note": report.note,
        "measures": list(report.measures),
        "trends": {m: t for m, t in report.trends},
        "skipped": [{"sample": s, "measure": m} for s, m in report.skipped],
        "samples": [
            {
                "name": r.name,
                "vertices": r.vertices,
                "widths": {m: w for m, w in r.widths},
                "longest_path": r.longest_path,
                "complete_trees": {str(h): m for h, m in r.complete_trees},
                "grid_minor": r.grid_minor,
            }
            for r in report.samples
        ],
    }


def _evidence_columns(report: EvidenceReport) -> tuple[list[str], list[list[str]]]:
    heights = [h for h, _ in report.samples[0].complete_trees] if report.samples else []
    header = (
        ["name", "vertices"]
        + list(report.measures)
        + ["longest_path", "grid_minor"]
        + [f"complete_tree_h{h}" for h in heights]
    )
    rows = []
    for r in report.samples:
        wm = r.width_map
        rows.append(
            [r.name, str(r.vertices)]
            + ["" if wm[m] is None else str(wm[m]) for m in report.measures]
            + [str(r.longest_path), str(r.grid_minor)]
            + [str(m) for _, m in r.complete_trees]
        )
    return header, rows


def report_csv(report: EvidenceReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header, rows = _evidence_columns(report)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _align(header: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    out = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    out.append("  ".join("-" * w for w in widths))
    for row in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(out)


def report_table(report: EvidenceReport) -> str:
    header, rows = _evidence_columns(report)
    lines = [_align(header, rows), ""]
    for measure, trend in report.trends:
        lines.append(f"{measure}: {trend}")
    if report.skipped:
        missed = ", ".join(f"{s}/{m}" for s, m in report.skipped)
        lines.append(f"skipped (budget): {missed}")
    lines.append("")
    lines.append(f"verdict: {report.verdict}")
    lines.append(f"note: {report.note}")
    return "\n".join(lines) + "\n"


def report_figure(report: EvidenceReport, path: str) -> str:
    """Plot every width measure across the sample sequence and save the
    figure to ``path`` (format chosen by the extension)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    xs = range(len(report.samples))
    for measure in report.measures:
        pts = [
            (i, r.width_map[measure])
            for i, r in zip(xs, report.samples)
            if r.width_map[measure] is not None
        ]
        if not pts:
            continue
        ax.plot(
            [p[0] for p in pts],
            [p[1] for p in pts],
            marker="o",
            label=measure,
        )
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r.name for r in report.samples], rotation=30, ha="right")
    ax.set_ylabel("width")
    ax.set_title(f"width trends — {report.verdict}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
