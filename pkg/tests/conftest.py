"""Shared fixtures: a deterministic git repo built from the mini repo."""

from __future__ import annotations

import os
import shutil
import subprocess
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"

collect_ignore_glob = ["fixtures/*"]

GIT_ENV = {
    "GIT_AUTHOR_NAME": "Fixture",
    "GIT_AUTHOR_EMAIL": "fixture@example.invalid",
    "GIT_COMMITTER_NAME": "Fixture",
    "GIT_COMMITTER_EMAIL": "fixture@example.invalid",
    "GIT_AUTHOR_DATE": "2020-01-01T00:00:00+00:00",
    "GIT_COMMITTER_DATE": "2020-01-01T00:00:00+00:00",
    "GIT_CONFIG_NOSYSTEM": "1",
    "HOME": "/nonexistent",
}


def git(*args: str, cwd: Path) -> str:
    env = {**os.environ, **GIT_ENV}
    return subprocess.run(["git", *args], cwd=cwd, env=env, check=True, capture_output=True, text=True).stdout.strip()


def make_repo(dest: Path, source: Path = GOLDEN / "minirepo") -> str:
    """Copy ``source`` into a fresh repo at ``dest``; returns the commit id."""
    shutil.copytree(source, dest)
    git("init", "-q", "-b", "main", ".", cwd=dest)
    git("add", "-A", cwd=dest)
    git("commit", "-q", "-m", "fixture", cwd=dest)
    return git("rev-parse", "HEAD", cwd=dest)


def write_dataset(path: Path, commit: str) -> Path:
    text = (GOLDEN / "dataset.template.jsonl").read_text(encoding="utf-8")
    path.write_text(text.replace("{commit}", commit), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def golden_env(tmp_path_factory):
    """Repos dir, ingested workspaces and a dataset for the mini repo."""
    from ctxlab.cli.dataset import load_dataset
    from ctxlab.cli.ingest import ingest

    root = tmp_path_factory.mktemp("golden")
    commit = make_repo(root / "repos" / "fixture__shop")
    dataset = write_dataset(root / "shop.jsonl", commit)
    report = ingest(load_dataset(dataset), root / "repos", root / "workspaces")
    assert not report.unavailable
    return {"root": root, "commit": commit, "dataset": dataset, "repos": root / "repos", "workspaces": root / "workspaces"}


# acceptance criteria report: test_acceptance records outcomes here
CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        title, ok = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
