"""Materialize instance checkouts from local clones with the system git."""

from __future__ import annotations

import hashlib
import json
import logging
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ctxlab.cli.dataset import TaskInstance, safe_name
from ctxlab.errors import ConfigError

log = logging.getLogger(__name__)

INDEX_FILE = "workspaces.json"


@dataclass
class IngestReport:
    materialized: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    unavailable: dict[str, str] = field(default_factory=dict)


def _git(*args: str, cwd: Path | None = None) -> subprocess.CompletedProcess:
    try:
        return subprocess.run(["git", *args], cwd=cwd, capture_output=True, text=True)
    except FileNotFoundError as exc:
        raise ConfigError("git executable not found") from exc


def find_clone(repos_dir: Path, repo: str) -> Path | None:
    slug = repo.replace("/", "__")
    for candidate in (repos_dir / f"{slug}.git", repos_dir / slug):
        if candidate.is_dir():
            return candidate
    return None


def workspace_path(workspaces_dir: Path, repo: str, commit: str) -> Path:
    digest = hashlib.sha256(f"{repo}@{commit}".encode()).hexdigest()[:12]
    return workspaces_dir / f"{safe_name(repo.replace('/', '__'))}-{digest}"


def load_workspace_index(workspaces_dir: Path | str) -> dict[str, dict]:
    path = Path(workspaces_dir) / INDEX_FILE
    if not path.exists():
        raise ConfigError(f"no workspace index at {path}; run `ctxlab ingest` first")
    return json.loads(path.read_text(encoding="utf-8"))


def ingest(
    instances: Sequence[TaskInstance],
    repos_dir: Path | str,
    workspaces_dir: Path | str,
    clone_url_template: str | None = None,
) -> IngestReport:
    """Check every instance out at its base commit under a content-addressed path.

    ``repos_dir`` holds clones named ``owner__name.git`` (bare) or
    ``owner__name``. With ``clone_url_template`` (e.g.
    ``https://github.com/{repo}.git``) missing clones are fetched as bare
    clones first. Already materialized workspaces are left alone.
    """
    repos_dir, workspaces_dir = Path(repos_dir), Path(workspaces_dir)
    workspaces_dir.mkdir(parents=True, exist_ok=True)
    index_path = workspaces_dir / INDEX_FILE
    index = json.loads(index_path.read_text(encoding="utf-8")) if index_path.exists() else {}
    report = IngestReport()

    for inst in instances:
        target = workspace_path(workspaces_dir, inst.repo, inst.base_commit)
        entry = {"repo": inst.repo, "base_commit": inst.base_commit, "path": target.name}
        clone = find_clone(repos_dir, inst.repo)
        if clone is None and clone_url_template:
            repos_dir.mkdir(parents=True, exist_ok=True)
            dest = repos_dir / f"{inst.repo.replace('/', '__')}.git"
            res = _git("clone", "--bare", clone_url_template.format(repo=inst.repo), str(dest))
            if res.returncode == 0:
                clone = dest
        if clone is None:
            report.unavailable[inst.instance_id] = "no local clone"
            index[inst.instance_id] = {**entry, "status": "unavailable", "reason": "no local clone"}
            continue

        if target.is_dir():
            head = _git("rev-parse", "HEAD", cwd=target)
            want = _git("rev-parse", f"{inst.base_commit}^{{commit}}", cwd=target)
            if head.returncode == 0 and head.stdout.strip() == want.stdout.strip():
                report.skipped.append(inst.instance_id)
                index[inst.instance_id] = {**entry, "status": "ok"}
                continue

        if _git("--git-dir", str(_git_dir(clone)), "cat-file", "-e", f"{inst.base_commit}^{{commit}}").returncode != 0:
            reason = f"commit {inst.base_commit} not found in {clone.name}"
            log.warning("%s: %s", inst.instance_id, reason)
            report.unavailable[inst.instance_id] = reason
            index[inst.instance_id] = {**entry, "status": "unavailable", "reason": reason}
            continue
        res = _git("--git-dir", str(_git_dir(clone)), "worktree", "add", "--detach", "--force", str(target.resolve()), inst.base_commit)
        if res.returncode != 0:
            reason = f"worktree add failed: {res.stderr.strip()}"
            report.unavailable[inst.instance_id] = reason
            index[inst.instance_id] = {**entry, "status": "unavailable", "reason": reason}
            continue
        report.materialized.append(inst.instance_id)
        index[inst.instance_id] = {**entry, "status": "ok"}

    tmp = index_path.with_suffix(".tmp")
    tmp.write_text(json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    tmp.replace(index_path)
    return report


def _git_dir(clone: Path) -> Path:
    return clone / ".git" if (clone / ".git").exists() else clone
