"""Gold localization from patches, P/R/F1 scoring and Table-2 style reports."""

from ctxlab.evaluation.gold import GoldLocalization, gold_entities, gold_files, retrieved_entities, retrieved_files
from ctxlab.evaluation.metrics import (
    REASONING_LEVELS,
    SCOPES,
    AggregateReport,
    AggregationError,
    InstanceMetrics,
    InstanceScores,
    ScopeMeans,
    aggregate,
    correlation_report,
    pearson,
    prf,
    score_instance,
)
from ctxlab.evaluation.patch import FileChange, GoldPatch, Hunk, parse_patch
from ctxlab.evaluation.report import bold_cells, render_csv, render_markdown

__all__ = [
    "REASONING_LEVELS",
    "SCOPES",
    "AggregateReport",
    "AggregationError",
    "FileChange",
    "GoldLocalization",
    "GoldPatch",
    "Hunk",
    "InstanceMetrics",
    "InstanceScores",
    "ScopeMeans",
    "aggregate",
    "bold_cells",
    "correlation_report",
    "gold_entities",
    "gold_files",
    "parse_patch",
    "pearson",
    "prf",
    "render_csv",
    "render_markdown",
    "retrieved_entities",
    "retrieved_files",
    "score_instance",
]
