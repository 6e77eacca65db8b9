"""Score run directories against gold patches and assemble reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from ctxlab.agent import ContextItem, ContextSet
from ctxlab.cli.dataset import load_dataset
from ctxlab.cli.ingest import load_workspace_index
from ctxlab.cli.runner import MANIFEST, RECORDS, Workspace, dump_json
from ctxlab.corpus import LineSpan
from ctxlab.errors import ConfigError
from ctxlab.evaluation import (
    AggregateReport,
    InstanceScores,
    aggregate,
    correlation_report,
    gold_entities,
    render_csv,
    render_markdown,
    retrieved_entities,
    retrieved_files,
    score_instance,
)
from ctxlab.errors import UndefinedCorrelationError

EVAL_DIR = "eval"
AGGREGATE = "aggregate.json"


def context_from_json(data: dict) -> ContextSet:
    items = tuple(
        ContextItem(i["file"], LineSpan(*i["span"]), i["content"], i["source_tool"], i["token_count"]) for i in data["items"]
    )
    return ContextSet(items)


def evaluate_run(run_dir: Path | str, dataset_path: Path | str, workspaces_dir: Path | str) -> tuple[list[InstanceScores], AggregateReport]:
    """Score one run; writes ``<run_dir>/eval/{metrics.jsonl,aggregate.*}``.

    Refuses runs without a manifest. Failed or unavailable instances are
    left out and tallied under ``excluded["run_failed"]``.
    """
    run_dir = Path(run_dir)
    manifest_path = run_dir / MANIFEST
    if not manifest_path.exists():
        raise ConfigError(f"{run_dir} has no {MANIFEST}; refusing to score an incomplete run")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    instances = {i.instance_id: i for i in load_dataset(dataset_path)}
    index = load_workspace_index(workspaces_dir)

    workspaces: dict[str, Workspace] = {}
    scores: list[InstanceScores] = []
    run_failed = 0
    for line in (run_dir / RECORDS).read_text(encoding="utf-8").splitlines():
        record = json.loads(line)
        if record["status"] != "ok":
            run_failed += 1
            continue
        inst = instances.get(record["instance_id"])
        if inst is None:
            raise ConfigError(f"run record {record['instance_id']!r} is not in {dataset_path}")
        key = index[inst.instance_id]["path"]
        if key not in workspaces:
            workspaces[key] = Workspace.load(Path(workspaces_dir) / key, inst.base_commit)
        ws = workspaces[key]

        gold = gold_entities(inst.parsed_patch(), ws.snapshot, ws.entities)
        context = context_from_json(record["context"])
        inst_scores = score_instance(
            inst.instance_id,
            context.total_tokens,
            {"file": retrieved_files(context), "entity": retrieved_entities(context, ws.entities)},
            {"file": gold.files, "entity": gold.entities},
        )
        if gold.missing_files:
            inst_scores.flags.append("gold_file_missing_from_snapshot")
        if gold.unattributed_changes:
            inst_scores.flags.append(f"module_level_changes={gold.unattributed_changes}")
        scores.append(inst_scores)

    strategy = manifest["strategy"]
    if scores:
        report = aggregate(scores, manifest["dataset_name"], strategy["toolset"], strategy["stopping"])
    else:
        report = AggregateReport(manifest["dataset_name"], strategy["toolset"], strategy["stopping"], None, None, 0.0, 0)
    report.excluded["run_failed"] = run_failed

    out = run_dir / EVAL_DIR
    out.mkdir(exist_ok=True)
    (out / "metrics.jsonl").write_text("".join(dump_json(s.to_json()) + "\n" for s in scores), encoding="utf-8")
    (out / AGGREGATE).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "aggregate.csv").write_text(render_csv([report]), encoding="utf-8")
    (out / "aggregate.md").write_text(_md_header(manifest) + render_markdown([report]), encoding="utf-8")
    return scores, report


def _md_header(manifest: dict) -> str:
    return (
        f"<!-- averaging: macro over instances; counter: {manifest['counter']}; "
        f"chunking: {manifest['chunking']}; CL counts: {manifest['cl_counting']} -->\n"
    )


def evaluate_runs(
    run_dirs: Sequence[Path | str], dataset_path: Path | str, workspaces_dir: Path | str, out_dir: Path | str | None = None
) -> list[AggregateReport]:
    reports = [evaluate_run(d, dataset_path, workspaces_dir)[1] for d in run_dirs]
    if len(reports) >= 2:
        out = Path(out_dir) if out_dir else Path(run_dirs[0]).parent / "summary"
        out.mkdir(parents=True, exist_ok=True)
        try:
            corr = correlation_report(reports)
        except UndefinedCorrelationError as exc:
            corr = {"error": str(exc)}
        (out / "correlations.json").write_text(json.dumps(corr, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        (out / "report.md").write_text(render_markdown(reports), encoding="utf-8")
        (out / "report.csv").write_text(render_csv(reports), encoding="utf-8")
    return reports


def load_reports(paths: Sequence[Path | str]) -> list[AggregateReport]:
    """Aggregate rows from eval dirs, run dirs, or aggregate JSON files.

    A JSON file may hold a single row or a list of rows, which is how
    externally produced results enter a combined report.
    """
    rows = []
    for p in map(Path, paths):
        if p.is_dir():
            candidates = [p / AGGREGATE, p / EVAL_DIR / AGGREGATE]
            p = next((c for c in candidates if c.exists()), None)
            if p is None:
                raise ConfigError(f"no {AGGREGATE} under {candidates[0].parent}")
        data = json.loads(p.read_text(encoding="utf-8"))
        rows.extend(AggregateReport.from_json(d) for d in (data if isinstance(data, list) else [data]))
    return rows


def report(paths: Sequence[Path | str]) -> str:
    return render_markdown(load_reports(paths))
