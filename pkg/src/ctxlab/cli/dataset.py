"""JSONL task instances."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from ctxlab.errors import ConfigError, PatchParseError
from ctxlab.evaluation import GoldPatch, parse_patch

FIELDS = ("instance_id", "repo", "base_commit", "problem_statement", "gold_patch")


@dataclass(frozen=True)
class TaskInstance:
    instance_id: str
    repo: str
    base_commit: str
    problem_statement: str
    gold_patch: str

    def parsed_patch(self) -> GoldPatch:
        return parse_patch(self.gold_patch)


def load_dataset(path: Path | str) -> list[TaskInstance]:
    """Read and validate a dataset file. Any bad line is fatal (ConfigError naming it)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read dataset {path}: {exc}") from exc
    instances = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{lineno}: malformed JSON: {exc.msg}") from exc
        if not isinstance(row, dict):
            raise ConfigError(f"{path}:{lineno}: expected a JSON object")
        missing = [f for f in FIELDS if not isinstance(row.get(f), str)]
        if missing:
            raise ConfigError(f"{path}:{lineno}: missing or non-string field(s): {', '.join(missing)}")
        inst = TaskInstance(**{f: row[f] for f in FIELDS})
        if inst.instance_id in seen:
            raise ConfigError(f"{path}:{lineno}: duplicate instance_id {inst.instance_id!r}")
        try:
            parse_patch(inst.gold_patch)
        except PatchParseError as exc:
            raise ConfigError(f"{path}:{lineno}: gold_patch of {inst.instance_id!r} does not parse: {exc}") from exc
        seen.add(inst.instance_id)
        instances.append(inst)
    return instances


def dataset_hash(path: Path | str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def safe_name(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in text)
