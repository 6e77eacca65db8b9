"""Structure-aware search tools and the toolset registries exposed to agents."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ctxlab.corpus import CodeEntity, EntityIndex, EntityKind, LineSpan, RepoSnapshot
from ctxlab.retrieval.bm25 import Bm25Index, SearchHit

DEFAULT_LIMIT = 10


@dataclass(frozen=True)
class ToolResult:
    """Outcome of one tool invocation.

    ``truncated`` is the number of hits dropped by the result cap. ``error``
    is set for tool-level failures, which are reported back to the agent as
    observations rather than raised.
    """

    tool: str
    hits: tuple[SearchHit, ...] = ()
    truncated: int = 0
    error: str | None = None

    def render(self) -> str:
        if self.error:
            return f"[{self.tool}] error: {self.error}"
        if not self.hits:
            return f"[{self.tool}] no results"
        parts = [f"[{self.tool}] {len(self.hits)} result(s)"]
        for hit in self.hits:
            head = f"--- {hit.file}:{hit.span}"
            if hit.score is not None:
                head += f" (score {hit.score:.4f})"
            parts.append(head)
            parts.append(hit.snippet.rstrip("\n"))
        if self.truncated:
            parts.append(f"[truncated: {self.truncated} more result(s) not shown]")
        return "\n".join(parts)


def _capped(tool: str, hits: list[SearchHit], limit: int) -> ToolResult:
    hits.sort(key=lambda h: (h.file.encode(), h.span.start, h.span.end))
    return ToolResult(tool, tuple(hits[:limit]), max(0, len(hits) - limit))


def _entity_hits(snapshot: RepoSnapshot, entities: list[CodeEntity], tool: str) -> list[SearchHit]:
    return [SearchHit(e.file, e.span, snapshot.file(e.file).text_at(e.span), tool) for e in entities]


def search_class(snapshot: RepoSnapshot, entities: EntityIndex, name: str, limit: int = DEFAULT_LIMIT) -> ToolResult:
    found = [e for e in entities if e.kind is EntityKind.CLASS and e.name == name]
    return _capped("search_class", _entity_hits(snapshot, found, "search_class"), limit)


def search_method(snapshot: RepoSnapshot, entities: EntityIndex, name: str, limit: int = DEFAULT_LIMIT) -> ToolResult:
    """Methods and free functions whose simple name equals ``name``."""
    found = [e for e in entities if e.kind is not EntityKind.CLASS and e.name == name]
    return _capped("search_method", _entity_hits(snapshot, found, "search_method"), limit)


def search_method_in_class(
    snapshot: RepoSnapshot, entities: EntityIndex, class_name: str, method_name: str, limit: int = DEFAULT_LIMIT
) -> ToolResult:
    found = [
        e
        for e in entities
        if e.kind is EntityKind.METHOD and e.name == method_name and e.parent_name is not None
        and e.parent_name.rsplit(".", 1)[-1] == class_name
    ]
    return _capped("search_method_in_class", _entity_hits(snapshot, found, "search_method_in_class"), limit)


def _code_hits(snapshot: RepoSnapshot, entities: EntityIndex, fragment: str, path: str, tool: str) -> list[SearchHit]:
    f = snapshot.file(path)
    spans: set[LineSpan] = set()
    pos = f.content.find(fragment)
    while pos != -1:
        first = f.content.count("\n", 0, pos) + 1
        last = first + fragment.count("\n")
        if fragment.endswith("\n"):
            last -= 1
        last = max(first, min(last, f.line_count))
        span = LineSpan(first, last)
        # widen to the innermost entity enclosing the whole match
        enclosing = [e for e in entities.in_file(path) if e.span.contains(span)]
        if enclosing:
            span = min(enclosing, key=lambda e: len(e.span)).span
        spans.add(span)
        pos = f.content.find(fragment, pos + 1)
    return [SearchHit(path, s, f.text_at(s), tool) for s in spans]


def search_code(snapshot: RepoSnapshot, entities: EntityIndex, fragment: str, limit: int = DEFAULT_LIMIT) -> ToolResult:
    if not fragment:
        return ToolResult("search_code", error="empty code fragment")
    hits = [h for path in snapshot.paths for h in _code_hits(snapshot, entities, fragment, path, "search_code")]
    return _capped("search_code", hits, limit)


def search_code_in_file(
    snapshot: RepoSnapshot, entities: EntityIndex, fragment: str, file: str, limit: int = DEFAULT_LIMIT
) -> ToolResult:
    if file not in snapshot:
        return ToolResult("search_code_in_file", error=f"file not found: {file}")
    if not fragment:
        return ToolResult("search_code_in_file", error="empty code fragment")
    return _capped("search_code_in_file", _code_hits(snapshot, entities, fragment, file, "search_code_in_file"), limit)


@dataclass(frozen=True)
class Tool:
    name: str
    description: str
    params: tuple[str, ...]
    run: Callable[..., ToolResult]


@dataclass
class ToolRegistry:
    name: str
    tools: dict[str, Tool] = field(default_factory=dict)

    def add(self, tool: Tool) -> None:
        self.tools[tool.name] = tool

    def __contains__(self, name: str) -> bool:
        return name in self.tools

    def __getitem__(self, name: str) -> Tool:
        return self.tools[name]

    def describe(self) -> str:
        lines = []
        for tool in self.tools.values():
            args = ", ".join(tool.params)
            lines.append(f"- {tool.name}({args}): {tool.description}")
        return "\n".join(lines)

    def call(self, name: str, arguments: dict[str, str]) -> ToolResult:
        return self.tools[name].run(**arguments)


def bm25_toolset(index: Bm25Index, top_k: int = 5) -> ToolRegistry:
    registry = ToolRegistry("bm25")

    def run(query: str) -> ToolResult:
        return ToolResult("search_bm25", tuple(index.search(query, top_k)))

    registry.add(Tool("search_bm25", f"Lexical BM25 search over code chunks; returns the top {top_k} chunks.", ("query",), run))
    return registry


def acr_toolset(snapshot: RepoSnapshot, entities: EntityIndex, limit: int = DEFAULT_LIMIT) -> ToolRegistry:
    registry = ToolRegistry("acr")
    registry.add(Tool(
        "search_class", "Find class definitions by exact name.", ("class_name",),
        lambda class_name: search_class(snapshot, entities, class_name, limit),
    ))
    registry.add(Tool(
        "search_method", "Find methods or functions by exact name anywhere in the codebase.", ("method_name",),
        lambda method_name: search_method(snapshot, entities, method_name, limit),
    ))
    registry.add(Tool(
        "search_method_in_class", "Find a method by exact name inside the named class.", ("class_name", "method_name"),
        lambda class_name, method_name: search_method_in_class(snapshot, entities, class_name, method_name, limit),
    ))
    registry.add(Tool(
        "search_code", "Find code containing an exact fragment; results widen to the enclosing definition.", ("code_str",),
        lambda code_str: search_code(snapshot, entities, code_str, limit),
    ))
    registry.add(Tool(
        "search_code_in_file", "Like search_code, restricted to one file (path relative to the repository root).",
        ("code_str", "file_path"),
        lambda code_str, file_path: search_code_in_file(snapshot, entities, code_str, file_path, limit),
    ))
    return registry
