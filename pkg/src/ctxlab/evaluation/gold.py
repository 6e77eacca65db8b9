"""Ground-truth localization from patches, and the matching view of retrieved context."""

from __future__ import annotations

from dataclasses import dataclass, field

from ctxlab.agent import ContextSet
from ctxlab.corpus import EntityIndex, RepoSnapshot
from ctxlab.evaluation.patch import GoldPatch

EntityKey = tuple[str, str]  # (file, qualified_name)


@dataclass
class GoldLocalization:
    files: set[str] = field(default_factory=set)
    entities: set[EntityKey] = field(default_factory=set)
    missing_files: list[str] = field(default_factory=list)  # pre-image paths absent from the snapshot
    unattributed_changes: int = 0  # touched lines/anchors outside every entity

    @property
    def flagged(self) -> bool:
        return bool(self.missing_files)


def gold_files(patch: GoldPatch) -> set[str]:
    """Pre-image paths of touched files; post-image path for pure additions."""
    return {fc.path_before if fc.path_before is not None else fc.path_after for fc in patch.file_changes} - {None}


def gold_entities(patch: GoldPatch, snapshot: RepoSnapshot, entities: EntityIndex) -> GoldLocalization:
    """Entities touched by ``patch`` in the pre-patch ``snapshot``.

    A deleted or modified line marks every entity whose span contains it.
    An insertion marks an entity only when both neighbouring pre-image lines
    fall inside the entity's span.
    """
    gold = GoldLocalization(files=gold_files(patch))
    for fc in patch.file_changes:
        path = fc.path_before
        if path is None or not fc.hunks:
            continue
        if path not in snapshot:
            gold.missing_files.append(path)
            continue
        file_entities = entities.in_file(path)
        for hunk in fc.hunks:
            deleted, anchors = hunk.touched_pre_lines()
            for line in deleted:
                hit = [e for e in file_entities if e.span.contains_line(line)]
                gold.entities.update(e.key for e in hit)
                gold.unattributed_changes += not hit
            for after in anchors:
                hit = [e for e in file_entities if e.span.start <= after and after + 1 <= e.span.end]
                gold.entities.update(e.key for e in hit)
                gold.unattributed_changes += not hit
    return gold


def retrieved_files(context: ContextSet) -> set[str]:
    return {item.file for item in context.items}


def retrieved_entities(context: ContextSet, entities: EntityIndex) -> set[EntityKey]:
    return {e.key for item in context.items for e in entities.overlapping(item.file, item.span)}
