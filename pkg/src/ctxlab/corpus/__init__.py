"""Repository snapshots, code entities and token accounting."""

from ctxlab.corpus.entities import CodeEntity, EntityIndex, EntityKind, extract_entities
from ctxlab.corpus.snapshot import LineSpan, RepoSnapshot, SourceFile, load_snapshot, split_lines
from ctxlab.corpus.stats import SnapshotStats, snapshot_stats
from ctxlab.corpus.tokens import APPROXIMATE, TokenCounterConfig, count_tokens

__all__ = [
    "APPROXIMATE",
    "CodeEntity",
    "EntityIndex",
    "EntityKind",
    "LineSpan",
    "RepoSnapshot",
    "SnapshotStats",
    "SourceFile",
    "TokenCounterConfig",
    "count_tokens",
    "extract_entities",
    "load_snapshot",
    "snapshot_stats",
    "split_lines",
]
