"""Gathered context: deduplicated code spans with token accounting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ctxlab.corpus import APPROXIMATE, LineSpan, TokenCounterConfig, count_tokens, split_lines
from ctxlab.retrieval import SearchHit


@dataclass(frozen=True)
class ContextItem:
    file: str
    span: LineSpan
    content: str
    source_tool: str
    token_count: int

    def to_json(self) -> dict:
        return {
            "file": self.file,
            "span": [self.span.start, self.span.end],
            "source_tool": self.source_tool,
            "token_count": self.token_count,
            "content": self.content,
        }


@dataclass(frozen=True)
class ContextSet:
    """Items are kept sorted by (file, span.start); spans in a file never overlap."""

    items: tuple[ContextItem, ...] = ()
    counter: TokenCounterConfig = field(default=APPROXIMATE, compare=False)

    @property
    def total_tokens(self) -> int:
        return sum(i.token_count for i in self.items)

    def __len__(self) -> int:
        return len(self.items)

    def files(self) -> list[str]:
        return sorted({i.file for i in self.items}, key=str.encode)

    def add(self, hits: Iterable[SearchHit]) -> ContextSet:
        items = list(self.items)
        for hit in hits:
            items = _insert(items, hit.file, hit.span, hit.snippet, hit.provenance, self.counter)
        items.sort(key=lambda i: (i.file.encode(), i.span.start))
        return ContextSet(tuple(items), self.counter)

    def summary(self) -> str:
        if not self.items:
            return "(no context gathered yet)"
        lines = [f"{len(self.items)} snippet(s), {self.total_tokens} tokens:"]
        lines += [f"- {i.file}:{i.span} ({i.token_count} tokens, via {i.source_tool})" for i in self.items]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"total_tokens": self.total_tokens, "items": [i.to_json() for i in self.items]}


def _insert(items: list[ContextItem], file: str, span: LineSpan, text: str, tool: str, counter: TokenCounterConfig) -> list[ContextItem]:
    overlapping = [i for i in items if i.file == file and i.span.overlaps(span)]
    if any(i.span.contains(span) for i in overlapping):
        return items
    if not overlapping:
        return items + [ContextItem(file, span, text, tool, count_tokens(text, counter))]

    # every piece is an exact file slice and each overlaps ``span``, so the
    # union is contiguous and fully covered
    by_line: dict[int, str] = {}
    union = span
    for item in overlapping:
        union = union.union(item.span)
        by_line.update(zip(range(item.span.start, item.span.end + 1), split_lines(item.content)))
    by_line.update(zip(range(span.start, span.end + 1), split_lines(text)))
    content = "".join(by_line[n] for n in range(union.start, union.end + 1))
    first = min(overlapping, key=lambda i: i.span.start)
    keep = [i for i in items if i not in overlapping]
    keep.append(ContextItem(file, union, content, first.source_tool, count_tokens(content, counter)))
    return keep


def add_to_context(context: ContextSet, hits: Iterable[SearchHit]) -> ContextSet:
    return context.add(hits)
