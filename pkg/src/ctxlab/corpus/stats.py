from __future__ import annotations

from dataclasses import dataclass

from ctxlab.corpus.snapshot import RepoSnapshot
from ctxlab.corpus.tokens import APPROXIMATE, TokenCounterConfig, count_tokens


@dataclass(frozen=True)
class SnapshotStats:
    file_count: int
    line_count: int
    token_count: int


def snapshot_stats(snapshot: RepoSnapshot, config: TokenCounterConfig = APPROXIMATE) -> SnapshotStats:
    return SnapshotStats(
        file_count=len(snapshot.files),
        line_count=sum(f.line_count for f in snapshot.files),
        token_count=sum(count_tokens(f.content, config) for f in snapshot.files),
    )
