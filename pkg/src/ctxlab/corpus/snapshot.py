"""Repository snapshots: a sorted, immutable view of one checkout."""

from __future__ import annotations

import fnmatch
import hashlib
import logging
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from ctxlab.errors import ConfigError

log = logging.getLogger(__name__)

DEFAULT_INCLUDE = ("*.py",)
DEFAULT_EXCLUDE: tuple[str, ...] = ()
# never descended into, regardless of globs
SKIP_DIRS = frozenset({".git", ".hg", ".svn"})


def split_lines(text: str) -> list[str]:
    """Split on ``\\n`` only, keeping line endings.

    ``str.splitlines`` also breaks on form feeds and other separators, which
    would disagree with newline-delimited line numbering.
    """
    if not text:
        return []
    parts = text.split("\n")
    lines = [p + "\n" for p in parts[:-1]]
    if parts[-1]:
        lines.append(parts[-1])
    return lines


@dataclass(frozen=True, order=True)
class LineSpan:
    start: int
    end: int

    def __post_init__(self) -> None:
        if not 1 <= self.start <= self.end:
            raise ValueError(f"invalid span {self.start}-{self.end}")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def __str__(self) -> str:
        return f"{self.start}-{self.end}"

    def contains(self, other: LineSpan) -> bool:
        return self.start <= other.start and other.end <= self.end

    def contains_line(self, line: int) -> bool:
        return self.start <= line <= self.end

    def overlaps(self, other: LineSpan) -> bool:
        return self.start <= other.end and other.start <= self.end

    def union(self, other: LineSpan) -> LineSpan:
        return LineSpan(min(self.start, other.start), max(self.end, other.end))


@dataclass(frozen=True)
class SourceFile:
    path: str
    content: str

    @cached_property
    def lines(self) -> list[str]:
        return split_lines(self.content)

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def text_at(self, span: LineSpan) -> str:
        """Exact file text covering ``span`` (original line endings kept)."""
        if span.end > self.line_count:
            raise ValueError(f"span {span} outside {self.path} ({self.line_count} lines)")
        return "".join(self.lines[span.start - 1 : span.end])


@dataclass(frozen=True)
class RepoSnapshot:
    root: Path
    files: tuple[SourceFile, ...]
    commit_id: str | None = None
    warnings: tuple[str, ...] = ()
    _by_path: dict[str, SourceFile] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_path = {f.path: f for f in self.files}
        if len(by_path) != len(self.files):
            raise ValueError("duplicate file paths in snapshot")
        object.__setattr__(self, "_by_path", by_path)

    def __contains__(self, path: str) -> bool:
        return path in self._by_path

    def get(self, path: str) -> SourceFile | None:
        return self._by_path.get(path)

    def file(self, path: str) -> SourceFile:
        return self._by_path[path]

    @property
    def paths(self) -> list[str]:
        return [f.path for f in self.files]

    @cached_property
    def content_hash(self) -> str:
        h = hashlib.sha256()
        for f in self.files:
            h.update(f.path.encode())
            h.update(b"\0")
            h.update(f.content.encode("utf-8", "surrogatepass"))
            h.update(b"\0")
        return h.hexdigest()

    @classmethod
    def from_files(cls, files: Iterable[tuple[str, str]], root: Path | str = ".", commit_id: str | None = None) -> RepoSnapshot:
        """Build an in-memory snapshot, mostly for tests and fixtures."""
        items = sorted(files, key=lambda pc: pc[0].encode())
        return cls(root=Path(root), files=tuple(SourceFile(p, c) for p, c in items), commit_id=commit_id)


def _matches(path: str, patterns: Sequence[str]) -> bool:
    return any(fnmatch.fnmatchcase(path, pat) for pat in patterns)


def load_snapshot(
    root: Path | str,
    include_globs: Sequence[str] = DEFAULT_INCLUDE,
    exclude_globs: Sequence[str] = DEFAULT_EXCLUDE,
    commit_id: str | None = None,
) -> RepoSnapshot:
    """Read every file under ``root`` matching include minus exclude.

    Globs are matched against the POSIX-style relative path, so ``*.py``
    also matches ``sub/c.py``. Unreadable files are skipped and reported in
    ``RepoSnapshot.warnings``.
    """
    root = Path(root)
    if not root.is_dir():
        raise ConfigError(f"snapshot root is not a directory: {root}")

    rel_paths = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = [d for d in dirnames if d not in SKIP_DIRS]
        rel_dir = Path(dirpath).relative_to(root)
        for name in filenames:
            rel = (rel_dir / name).as_posix()
            if _matches(rel, include_globs) and not _matches(rel, exclude_globs):
                rel_paths.append(rel)
    rel_paths.sort(key=str.encode)

    files = []
    warnings = []
    for rel in rel_paths:
        try:
            data = (root / rel).read_bytes()
        except OSError as exc:
            log.warning("skipping unreadable file %s: %s", rel, exc)
            warnings.append(f"{rel}: {exc.strerror or exc}")
            continue
        files.append(SourceFile(rel, data.decode("utf-8", errors="replace")))
    return RepoSnapshot(root=root, files=tuple(files), commit_id=commit_id, warnings=tuple(warnings))
