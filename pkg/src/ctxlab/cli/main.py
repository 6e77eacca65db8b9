"""``ctxlab`` command line: ingest, index, run, eval, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ctxlab.agent import StrategyConfig
from ctxlab.cli import evaluate, ingest as ingest_mod, runner
from ctxlab.cli.dataset import load_dataset
from ctxlab.corpus import TokenCounterConfig, snapshot_stats
from ctxlab.errors import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _cmd_ingest(args: argparse.Namespace) -> int:
    rep = ingest_mod.ingest(load_dataset(args.dataset), args.repos_dir, args.workspaces, args.clone_url)
    print(f"materialized {len(rep.materialized)}, skipped {len(rep.skipped)}, unavailable {len(rep.unavailable)}")
    for iid, reason in sorted(rep.unavailable.items()):
        print(f"  unavailable {iid}: {reason}")
    return EXIT_OK


def _cmd_index(args: argparse.Namespace) -> int:
    counter = TokenCounterConfig.parse(args.tokenizer)
    index = ingest_mod.load_workspace_index(args.workspaces)
    seen = set()
    for inst in load_dataset(args.dataset):
        entry = index.get(inst.instance_id)
        if not entry or entry["status"] != "ok" or entry["path"] in seen:
            continue
        seen.add(entry["path"])
        ws = runner.Workspace.load(Path(args.workspaces) / entry["path"], inst.base_commit)
        bm25 = ws.bm25(Path(args.cache_dir) if args.cache_dir else None)
        stats = snapshot_stats(ws.snapshot, counter)
        print(json.dumps({
            "workspace": entry["path"],
            "files": stats.file_count,
            "lines": stats.line_count,
            "tokens": stats.token_count,
            "counter": counter.describe(),
            "entities": len(ws.entities),
            "parse_failures": len(ws.entities.parse_failures),
            "documents": len(bm25),
        }, sort_keys=True))
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    config = StrategyConfig(
        toolset=args.toolset,
        stopping=args.stopping,
        context_threshold_tokens=args.threshold,
        max_steps=args.max_steps,
        top_k=args.top_k,
    )
    outcome = runner.run(
        args.dataset,
        args.workspaces,
        config,
        args.policy,
        TokenCounterConfig.parse(args.tokenizer),
        args.output,
        workers=args.workers,
        cache_dir=args.cache_dir,
    )
    print(f"{outcome.run_dir}: {outcome.n_ok} ok, {outcome.n_failed} failed")
    return outcome.exit_code


def _cmd_eval(args: argparse.Namespace) -> int:
    reports = evaluate.evaluate_runs(args.run_dirs, args.dataset, args.workspaces, args.out)
    sys.stdout.write(evaluate.render_markdown(reports))
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    text = evaluate.report(args.eval_dirs)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctxlab", description="Context-retrieval strategy experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="check out every instance at its base commit")
    p.add_argument("--dataset", required=True, help="JSONL with instance_id, repo, base_commit, problem_statement, gold_patch")
    p.add_argument("--repos-dir", required=True, help="directory of clones named owner__name(.git)")
    p.add_argument("--workspaces", required=True, help="where checkouts are materialized")
    p.add_argument("--clone-url", help="template for fetching missing clones, e.g. https://github.com/{repo}.git")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("index", help="build BM25 indices and print corpus statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--workspaces", required=True)
    p.add_argument("--cache-dir")
    p.add_argument("--tokenizer", default="approximate", help="approximate | bpe:<vocab>")
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("run", help="run one retrieval strategy over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--workspaces", required=True)
    p.add_argument("--toolset", choices=("bm25", "acr"), default="bm25")
    p.add_argument("--stopping", choices=("baseline", "cl", "tc", "sr"), default="tc")
    p.add_argument("--threshold", type=int, default=500, help="context threshold in tokens (baseline and cl)")
    p.add_argument("--max-steps", type=int, default=25)
    p.add_argument("--top-k", type=int, default=5, help="hits per bm25 tool call")
    p.add_argument("--policy", default="remote", help="scripted:<trace file or dir> | remote")
    p.add_argument("--tokenizer", default="approximate", help="approximate | bpe:<vocab>")
    p.add_argument("--output", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("eval", help="score run directories")
    p.add_argument("run_dirs", nargs="+")
    p.add_argument("--dataset", required=True)
    p.add_argument("--workspaces", required=True)
    p.add_argument("--out", help="where correlations and the combined table go (2+ runs)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("report", help="combine evaluated runs into one table")
    p.add_argument("eval_dirs", nargs="+", help="eval dirs, run dirs, or aggregate JSON files")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"ctxlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
