"""Table rendering: aligned markdown with per-block maxima in bold, and CSV."""

from __future__ import annotations

import csv
import io
from itertools import groupby
from typing import Sequence

from ctxlab.evaluation.metrics import SCOPES, AggregateReport

METRICS = ("precision", "recall", "f1")
COLUMNS = [(scope, m) for scope in SCOPES for m in METRICS]
TOOLSET_ORDER = {"bm25": 0, "acr": 1}
TOOLSET_TITLES = {"bm25": "BM25", "acr": "ACR Tools"}


def _pct(value: float | None) -> str:
    return "-" if value is None else f"{100 * value:.1f}"


def sort_rows(rows: Sequence[AggregateReport]) -> list[AggregateReport]:
    datasets = list(dict.fromkeys(r.dataset for r in rows))
    return sorted(rows, key=lambda r: (datasets.index(r.dataset), TOOLSET_ORDER.get(r.toolset, 99), r.toolset, r.reasoning_level))


def bold_cells(rows: Sequence[AggregateReport]) -> set[tuple[int, str, str]]:
    """(row index, scope, metric) of every per-block column maximum.

    Blocks are (dataset, toolset). Maxima are taken on displayed values, so
    ties at display precision are all bold.
    """
    bold = set()
    indexed = list(enumerate(rows))
    key = lambda ir: (ir[1].dataset, ir[1].toolset)  # noqa: E731
    for _, block in groupby(sorted(indexed, key=key), key=key):
        block = list(block)
        for scope, metric in COLUMNS:
            shown = {i: _pct(r.metric(scope, metric)) for i, r in block if r.metric(scope, metric) is not None}
            if not shown:
                continue
            best = max(float(v) for v in shown.values())
            bold.update((i, scope, metric) for i, v in shown.items() if float(v) == best)
    return bold


def render_markdown(rows: Sequence[AggregateReport]) -> str:
    rows = sort_rows(rows)
    bold = bold_cells(rows)
    header = ["Dataset", "Tools", "Strategy"] + [f"{s.capitalize()} {m[0].upper() if m != 'f1' else 'F1'}" for s, m in COLUMNS] + ["Avg. CL"]
    table = [header]
    for i, r in enumerate(rows):
        cells = [r.dataset, TOOLSET_TITLES.get(r.toolset, r.toolset), r.label]
        for scope, metric in COLUMNS:
            text = _pct(r.metric(scope, metric))
            cells.append(f"**{text}**" if (i, scope, metric) in bold else text)
        cells.append(f"{r.avg_context_tokens:.0f}")
        table.append(cells)
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]
    numeric = set(range(3, len(header)))

    def fmt(row: list[str]) -> str:
        return "| " + " | ".join(cell.rjust(w) if c in numeric else cell.ljust(w) for c, (cell, w) in enumerate(zip(row, widths))) + " |"

    sep = "|" + "|".join(("-" * (w + 1) + ":") if c in numeric else ("-" * (w + 2)) for c, w in enumerate(widths)) + "|"
    return "\n".join([fmt(table[0]), sep] + [fmt(row) for row in table[1:]]) + "\n"


def render_csv(rows: Sequence[AggregateReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["dataset", "toolset", "stopping", "reasoning_level"]
        + [f"{s}_{m}" for s, m in COLUMNS]
        + ["avg_context_tokens", "n_instances", "excluded_file", "excluded_entity", "averaging"]
    )
    for r in sort_rows(rows):
        metrics = ["" if r.metric(s, m) is None else repr(r.metric(s, m)) for s, m in COLUMNS]
        writer.writerow(
            [r.dataset, r.toolset, r.stopping, r.reasoning_level]
            + metrics
            + [repr(r.avg_context_tokens), r.n_instances, r.excluded.get("file", 0), r.excluded.get("entity", 0), r.averaging]
        )
    return buf.getvalue()
