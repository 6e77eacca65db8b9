"""Unified diff parsing (git flavoured) and re-serialization."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ctxlab.errors import PatchParseError

HUNK_HEADER = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@(.*)$")
DEV_NULL = "/dev/null"

_EXTENDED = (
    "old mode ",
    "new mode ",
    "deleted file mode ",
    "new file mode ",
    "similarity index ",
    "dissimilarity index ",
    "rename from ",
    "rename to ",
    "copy from ",
    "copy to ",
    "index ",
    "Binary files ",
    "GIT binary patch",
)


@dataclass
class Hunk:
    pre_start: int
    pre_len: int
    post_start: int
    post_len: int
    line_ops: list[tuple[str, str]] = field(default_factory=list)  # (op, text); op in " -+\\"
    section: str = ""

    def header(self) -> str:
        return f"@@ -{self.pre_start},{self.pre_len} +{self.post_start},{self.post_len} @@{self.section}"

    def counts(self) -> tuple[int, int]:
        pre = sum(1 for op, _ in self.line_ops if op in " -")
        post = sum(1 for op, _ in self.line_ops if op in " +")
        return pre, post

    def touched_pre_lines(self) -> tuple[list[int], list[int]]:
        """Pre-image line numbers of deletions, and insertion anchors.

        An anchor ``p`` means the insertion sits between pre-image lines
        ``p`` and ``p + 1``.
        """
        deleted, anchors = [], []
        # a zero-length pre side starts *after* pre_start
        line = self.pre_start if self.pre_len else self.pre_start + 1
        for op, _ in self.line_ops:
            if op == " ":
                line += 1
            elif op == "-":
                deleted.append(line)
                line += 1
            elif op == "+":
                if not anchors or anchors[-1] != line - 1:
                    anchors.append(line - 1)
        return deleted, anchors


@dataclass
class FileChange:
    path_before: str | None
    path_after: str | None
    hunks: list[Hunk] = field(default_factory=list)
    headers: list[str] = field(default_factory=list)  # extended git header lines, verbatim

    @property
    def is_addition(self) -> bool:
        return self.path_before is None

    @property
    def is_deletion(self) -> bool:
        return self.path_after is None

    @property
    def is_rename(self) -> bool:
        return None not in (self.path_before, self.path_after) and self.path_before != self.path_after


@dataclass
class GoldPatch:
    raw: str
    file_changes: list[FileChange] = field(default_factory=list)

    def to_unified_diff(self) -> str:
        out = []
        for fc in self.file_changes:
            a = fc.path_before or fc.path_after
            b = fc.path_after or fc.path_before
            out.append(f"diff --git a/{a} b/{b}")
            out.extend(fc.headers)
            if fc.hunks:
                out.append(f"--- {'a/' + fc.path_before if fc.path_before else DEV_NULL}")
                out.append(f"+++ {'b/' + fc.path_after if fc.path_after else DEV_NULL}")
            for hunk in fc.hunks:
                out.append(hunk.header())
                out.extend(op + text for op, text in hunk.line_ops)
        return "\n".join(out) + ("\n" if out else "")


def _strip_prefix(path: str) -> str | None:
    path = path.split("\t", 1)[0].rstrip()
    if len(path) >= 2 and path[0] == path[-1] == '"':
        path = path[1:-1].encode("latin-1", "backslashreplace").decode("unicode_escape").encode("latin-1").decode("utf-8", "replace")
    if path == DEV_NULL:
        return None
    if path[:2] in ("a/", "b/"):
        return path[2:]
    return path


def _git_header_paths(rest: str) -> tuple[str | None, str | None]:
    # "a/x b/x": with identical halves the split is unambiguous even with spaces
    if rest.startswith("a/"):
        n = len(rest)
        if n % 2 == 1:
            half = (n - 1) // 2
            left, right = rest[:half], rest[half + 1 :]
            if right.startswith("b/") and left[2:] == right[2:]:
                return left[2:], right[2:]
        idx = rest.rfind(" b/")
        if idx != -1:
            return rest[2:idx], rest[idx + 3 :]
    parts = rest.split(" ")
    if len(parts) == 2:
        return _strip_prefix(parts[0]), _strip_prefix(parts[1])
    return None, None


def parse_patch(diff_text: str) -> GoldPatch:
    """Parse unified diff text.

    Raises PatchParseError on malformed hunk headers or hunks whose bodies
    disagree with their line counts.
    """
    patch = GoldPatch(diff_text)
    lines = diff_text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    current: FileChange | None = None
    has_markers = False  # current section already saw its ---/+++ pair
    i = 0
    while i < len(lines):
        line = lines[i].rstrip("\r")
        lineno = i + 1
        if line.startswith("diff --git "):
            before, after = _git_header_paths(line[len("diff --git ") :])
            current = FileChange(before, after)
            patch.file_changes.append(current)
            has_markers = False
            i += 1
            continue
        if current is not None and not current.hunks and line.startswith(_EXTENDED):
            current.headers.append(line)
            if line.startswith("rename from "):
                current.path_before = line[len("rename from ") :]
            elif line.startswith("rename to "):
                current.path_after = line[len("rename to ") :]
            elif line.startswith("new file mode "):
                current.path_before = None
            elif line.startswith("deleted file mode "):
                current.path_after = None
            i += 1
            continue
        if line.startswith("--- ") and i + 1 < len(lines) and lines[i + 1].startswith("+++ "):
            before = _strip_prefix(line[4:])
            after = _strip_prefix(lines[i + 1].rstrip("\r")[4:])
            if current is None or current.hunks or has_markers:
                current = FileChange(before, after)
                patch.file_changes.append(current)
            else:
                current.path_before, current.path_after = before, after
            has_markers = True
            i += 2
            continue
        if line.startswith("@@"):
            m = HUNK_HEADER.match(line)
            if m is None:
                raise PatchParseError("malformed hunk header", lineno, line)
            if current is None:
                raise PatchParseError("hunk outside of a file section", lineno, line)
            pre_start, pre_len, post_start, post_len = (
                int(m.group(1)),
                int(m.group(2)) if m.group(2) is not None else 1,
                int(m.group(3)),
                int(m.group(4)) if m.group(4) is not None else 1,
            )
            hunk = Hunk(pre_start, pre_len, post_start, post_len, section=m.group(5))
            i = _read_hunk_body(lines, i + 1, hunk, lineno, line)
            current.hunks.append(hunk)
            continue
        # preamble, trailers, "index" lines after hunks, etc.
        i += 1
    return patch


def _read_hunk_body(lines: list[str], i: int, hunk: Hunk, header_no: int, header: str) -> int:
    pre_left, post_left = hunk.pre_len, hunk.post_len
    while pre_left > 0 or post_left > 0:
        if i >= len(lines):
            raise PatchParseError(f"hunk truncated ({pre_left} old / {post_left} new lines missing)", header_no, header)
        raw = lines[i]
        op, text = (raw[:1], raw[1:]) if raw else (" ", "")
        if op == " " and pre_left and post_left:
            pre_left -= 1
            post_left -= 1
        elif op == "-" and pre_left:
            pre_left -= 1
        elif op == "+" and post_left:
            post_left -= 1
        elif op == "\\":
            pass
        else:
            raise PatchParseError(f"hunk body disagrees with header {header!r}", i + 1, raw)
        hunk.line_ops.append((op, text))
        i += 1
    if i < len(lines) and lines[i].startswith("\\"):
        hunk.line_ops.append(("\\", lines[i][1:]))
        i += 1
    return i
