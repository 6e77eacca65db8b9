"""Experiment runs: one strategy over a dataset, with a manifest written last."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import os
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ctxlab import __version__
from ctxlab.agent import AgentRunAborted, RemotePolicy, ScriptedPolicySet, StrategyConfig, run_baseline, run_react
from ctxlab.agent.prompts import PROMPT_VERSION
from ctxlab.cli.dataset import TaskInstance, dataset_hash, load_dataset, safe_name
from ctxlab.cli.ingest import load_workspace_index
from ctxlab.corpus import EntityIndex, RepoSnapshot, TokenCounterConfig, load_snapshot
from ctxlab.errors import ConfigError
from ctxlab.retrieval import DEFAULT_LIMIT, DEFAULT_WINDOW, Bm25Index, acr_toolset, bm25_toolset, build_chunks
from ctxlab.retrieval.bm25 import cache_key

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"
RECORDS = "records.jsonl"
FAILURE_THRESHOLD = 0.5

# methodology choices recorded in every manifest
CHUNKING = f"entity chunks + {DEFAULT_WINDOW}-line remainder windows"
CL_COUNTING = "deduplicated context set"


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


@dataclass(frozen=True)
class Workspace:
    """Everything the tools need for one checkout."""

    snapshot: RepoSnapshot
    entities: EntityIndex

    @classmethod
    def load(cls, root: Path, commit: str | None = None) -> Workspace:
        snapshot = load_snapshot(root, commit_id=commit)
        return cls(snapshot, EntityIndex.build(snapshot))

    def bm25(self, cache_dir: Path | None = None) -> Bm25Index:
        cache = cache_dir / f"bm25-{cache_key(self.snapshot, DEFAULT_WINDOW)}.pkl" if cache_dir else None
        if cache is not None:
            cached = Bm25Index.load(cache, self.snapshot.content_hash)
            if cached is not None:
                return cached
        index = Bm25Index(build_chunks(self.snapshot, self.entities, DEFAULT_WINDOW))
        if cache is not None:
            cache_dir.mkdir(parents=True, exist_ok=True)
            index.save(cache, self.snapshot.content_hash)
        return index


class PolicySource:
    """Resolves ``--policy`` into a per-instance policy factory."""

    def __init__(self, spec: str, stopping: str):
        self.spec = spec
        if spec.startswith("scripted:"):
            self._scripted = ScriptedPolicySet(spec[len("scripted:") :])
            self._remote = None
        elif spec == "remote":
            self._scripted = None
            self._remote = RemotePolicy.from_env(stopping=stopping) if stopping != "baseline" else None
        else:
            raise ConfigError(f"bad policy {spec!r}; expected scripted:<path> or remote")

    def kind(self) -> str:
        return "scripted" if self._scripted else "remote"

    def describe(self) -> str:
        if self._scripted:
            return self._scripted.describe()
        return self._remote.describe() if self._remote else "remote:unused"

    def for_instance(self, instance_id: str):
        return self._scripted.for_instance(instance_id) if self._scripted else self._remote


def run_instance(
    inst: TaskInstance,
    workspace: Workspace,
    config: StrategyConfig,
    policies: PolicySource,
    counter: TokenCounterConfig,
    cache_dir: Path | None = None,
) -> dict:
    record = {"instance_id": inst.instance_id, "strategy": config.to_json()}
    record["diagnostics"] = {"parse_failures": workspace.entities.parse_failures, "snapshot_warnings": list(workspace.snapshot.warnings)}
    if config.stopping == "baseline":
        context = run_baseline(workspace.bm25(cache_dir), inst.problem_statement, config, counter)
        record.update(status="ok", stop_reason=None, context=context.to_json(), transcript=[])
        return record

    if config.toolset == "bm25":
        registry = bm25_toolset(workspace.bm25(cache_dir), config.top_k)
    else:
        registry = acr_toolset(workspace.snapshot, workspace.entities, DEFAULT_LIMIT)
    try:
        result = run_react(registry, inst.problem_statement, policies.for_instance(inst.instance_id), config, counter)
    except AgentRunAborted as exc:
        partial = exc.partial
        record.update(
            status="failed",
            error=f"policy transport: {exc}",
            stop_reason=None,
            context=partial.context.to_json(),
            transcript=[s.to_json() for s in partial.transcript],
        )
        return record
    record.update(
        status="ok",
        stop_reason=result.stop_reason.value,
        context=result.context.to_json(),
        transcript=[s.to_json() for s in result.transcript],
    )
    record["diagnostics"]["unparsed_verdicts"] = result.unparsed_verdicts
    return record


@dataclass
class RunOutcome:
    run_dir: Path
    n_ok: int
    n_failed: int

    @property
    def failure_rate(self) -> float:
        total = self.n_ok + self.n_failed
        return self.n_failed / total if total else 0.0

    @property
    def exit_code(self) -> int:
        return 2 if self.failure_rate > FAILURE_THRESHOLD else 0


def config_hash(dataset_digest: str, config: StrategyConfig, policy: str, counter: TokenCounterConfig) -> str:
    blob = dump_json(
        {
            "dataset": dataset_digest,
            "strategy": config.to_json(),
            "policy": policy,
            "counter": counter.describe(),
            "chunking": CHUNKING,
            "tool_limit": DEFAULT_LIMIT,
            "prompt_version": PROMPT_VERSION,
        }
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch else dt.datetime.now(dt.timezone.utc)
    return now.replace(microsecond=0).isoformat()


def run(
    dataset_path: Path | str,
    workspaces_dir: Path | str,
    config: StrategyConfig,
    policy_spec: str,
    counter: TokenCounterConfig,
    output_dir: Path | str,
    workers: int = 1,
    cache_dir: Path | str | None = None,
    instance_runner: Callable[..., dict] = run_instance,
) -> RunOutcome:
    """Execute one strategy over every instance of a dataset.

    Instance records are written to private files first; ``records.jsonl``
    and finally ``manifest.json`` (atomic rename) follow once every instance
    has finished, so a manifest marks a complete run.
    """
    dataset_path, workspaces_dir, output_dir = Path(dataset_path), Path(workspaces_dir), Path(output_dir)
    cache_dir = Path(cache_dir) if cache_dir else None
    instances = load_dataset(dataset_path)
    index = load_workspace_index(workspaces_dir)
    policies = PolicySource(policy_spec, config.stopping)
    digest = dataset_hash(dataset_path)
    chash = config_hash(digest, config, policies.describe(), counter)
    name = f"{safe_name(dataset_path.stem)}__{config.toolset}-{config.stopping}__{policies.kind()}__{chash[:10]}"
    run_dir = output_dir / name
    inst_dir = run_dir / "instances"
    if (run_dir / MANIFEST).exists():
        (run_dir / MANIFEST).unlink()
    if inst_dir.exists():
        shutil.rmtree(inst_dir)
    inst_dir.mkdir(parents=True)

    workspaces: dict[str, Workspace] = {}

    def workspace_for(inst: TaskInstance) -> Workspace:
        entry = index[inst.instance_id]
        key = entry["path"]
        if key not in workspaces:
            workspaces[key] = Workspace.load(workspaces_dir / key, inst.base_commit)
        return workspaces[key]

    def one(inst: TaskInstance) -> dict:
        entry = index.get(inst.instance_id)
        if entry is None or entry.get("status") != "ok":
            reason = entry.get("reason", "unavailable") if entry else "not ingested"
            record = {"instance_id": inst.instance_id, "status": "unavailable", "error": reason}
        else:
            try:
                record = instance_runner(inst, workspace_for(inst), config, policies, counter, cache_dir)
            except Exception as exc:  # isolate per-instance crashes
                log.exception("instance %s failed", inst.instance_id)
                record = {"instance_id": inst.instance_id, "status": "failed", "error": f"{type(exc).__name__}: {exc}"}
        (inst_dir / f"{safe_name(inst.instance_id)}.json").write_text(dump_json(record) + "\n", encoding="utf-8")
        return record

    # preload so worker threads never race on the workspace cache; a broken
    # checkout surfaces again as that instance's failure
    for inst in instances:
        if index.get(inst.instance_id, {}).get("status") == "ok":
            try:
                workspace_for(inst)
            except Exception:
                pass
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, instances))
    else:
        records = [one(inst) for inst in instances]

    (run_dir / RECORDS).write_text("".join(dump_json(r) + "\n" for r in records), encoding="utf-8")
    n_ok = sum(r["status"] == "ok" for r in records)
    outcome = RunOutcome(run_dir, n_ok, len(records) - n_ok)
    manifest = {
        "ctxlab_version": __version__,
        "dataset": str(dataset_path),
        "dataset_name": dataset_path.stem,
        "dataset_sha256": digest,
        "strategy": config.to_json(),
        "policy": policies.describe(),
        "counter": counter.describe(),
        "chunking": CHUNKING,
        "cl_counting": CL_COUNTING,
        "prompt_version": PROMPT_VERSION,
        "timestamp": _timestamp(),
        "output_dir": str(run_dir),
        "config_sha256": chash,
        "instances": {"ok": outcome.n_ok, "failed": outcome.n_failed},
    }
    tmp = run_dir / (MANIFEST + ".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    tmp.replace(run_dir / MANIFEST)
    return outcome
