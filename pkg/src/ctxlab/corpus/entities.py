"""Class / function / method extraction with line spans."""

from __future__ import annotations

import ast
import enum
import posixpath
from dataclasses import dataclass
from typing import Callable, Iterator

from ctxlab.corpus.snapshot import LineSpan, RepoSnapshot, SourceFile


class EntityKind(str, enum.Enum):
    CLASS = "class"
    FUNCTION = "function"
    METHOD = "method"


@dataclass(frozen=True, order=True)
class CodeEntity:
    file: str
    span: LineSpan
    kind: EntityKind
    qualified_name: str

    @property
    def name(self) -> str:
        return self.qualified_name.rsplit(".", 1)[-1]

    @property
    def parent_name(self) -> str | None:
        if "." not in self.qualified_name:
            return None
        return self.qualified_name.rsplit(".", 1)[0]

    @property
    def key(self) -> tuple[str, str]:
        return (self.file, self.qualified_name)


class _Collector(ast.NodeVisitor):
    def __init__(self, path: str, line_count: int):
        self.path = path
        self.line_count = line_count
        self.scope: list[tuple[str, bool]] = []  # (name, is_class)
        self.found: list[CodeEntity] = []

    def _span(self, node: ast.ClassDef | ast.FunctionDef | ast.AsyncFunctionDef) -> LineSpan:
        start = min([node.lineno] + [d.lineno for d in node.decorator_list])
        end = node.end_lineno or node.lineno
        # ast counts a trailing "\r" as a line break; clamp to the file
        return LineSpan(min(start, self.line_count), min(end, self.line_count))

    def _qualify(self, name: str) -> str:
        return ".".join([s for s, _ in self.scope] + [name])

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        self.found.append(CodeEntity(self.path, self._span(node), EntityKind.CLASS, self._qualify(node.name)))
        self.scope.append((node.name, True))
        self.generic_visit(node)
        self.scope.pop()

    def _visit_def(self, node: ast.FunctionDef | ast.AsyncFunctionDef) -> None:
        in_class = bool(self.scope) and self.scope[-1][1]
        kind = EntityKind.METHOD if in_class else EntityKind.FUNCTION
        self.found.append(CodeEntity(self.path, self._span(node), kind, self._qualify(node.name)))
        self.scope.append((node.name, False))
        self.generic_visit(node)
        self.scope.pop()

    visit_FunctionDef = _visit_def
    visit_AsyncFunctionDef = _visit_def


def extract_python(file: SourceFile) -> list[CodeEntity]:
    """Raises SyntaxError/ValueError on unparseable source."""
    tree = ast.parse(file.content, filename=file.path)
    collector = _Collector(file.path, file.line_count)
    collector.visit(tree)
    return collector.found


Extractor = Callable[[SourceFile], list[CodeEntity]]

EXTRACTORS: dict[str, Extractor] = {".py": extract_python}


def extract_entities(file: SourceFile, failures: list[str] | None = None) -> list[CodeEntity]:
    """All class/function/method definitions in ``file``, by span start.

    Files with no registered extractor yield ``[]``. Files that fail to parse
    also yield ``[]`` and, if ``failures`` is given, have their path appended
    to it.
    """
    extractor = EXTRACTORS.get(posixpath.splitext(file.path)[1])
    if extractor is None or not file.content:
        return []
    try:
        found = extractor(file)
    except (SyntaxError, ValueError, RecursionError, MemoryError):
        if failures is not None:
            failures.append(file.path)
        return []
    # stable: a decorated class and its first decorated method can't share a
    # start line, but keep outer-before-inner on equal starts anyway
    return sorted(found, key=lambda e: (e.span.start, -e.span.end))


class EntityIndex:
    """Entities of a whole snapshot, grouped by file."""

    def __init__(self, by_file: dict[str, list[CodeEntity]], parse_failures: list[str] | None = None):
        self.by_file = by_file
        self.parse_failures = sorted(parse_failures or [])

    @classmethod
    def build(cls, snapshot: RepoSnapshot) -> EntityIndex:
        failures: list[str] = []
        by_file = {f.path: extract_entities(f, failures) for f in snapshot.files}
        return cls(by_file, failures)

    def __iter__(self) -> Iterator[CodeEntity]:
        for path in sorted(self.by_file, key=str.encode):
            yield from self.by_file[path]

    def __len__(self) -> int:
        return sum(len(v) for v in self.by_file.values())

    def in_file(self, path: str) -> list[CodeEntity]:
        return self.by_file.get(path, [])

    def containing(self, path: str, line: int) -> list[CodeEntity]:
        return [e for e in self.in_file(path) if e.span.contains_line(line)]

    def innermost(self, path: str, line: int) -> CodeEntity | None:
        candidates = self.containing(path, line)
        if not candidates:
            return None
        return min(candidates, key=lambda e: (len(e.span), -e.span.start))

    def overlapping(self, path: str, span: LineSpan) -> list[CodeEntity]:
        return [e for e in self.in_file(path) if e.span.overlaps(span)]
