import json
import subprocess
import sys

import pytest

from conftest import GOLDEN, git, make_repo
from ctxlab.agent import StrategyConfig
from ctxlab.cli import evaluate, runner
from ctxlab.cli.dataset import load_dataset
from ctxlab.cli.ingest import ingest, load_workspace_index
from ctxlab.cli.main import main
from ctxlab.corpus import TokenCounterConfig
from ctxlab.errors import ConfigError

TRACES = GOLDEN / "traces"


def jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


def instance(iid, commit, repo="fixture/shop", patch="--- a/shop/cart.py\n+++ b/shop/cart.py\n@@ -1 +1 @@\n-x\n+y\n"):
    return {"instance_id": iid, "repo": repo, "base_commit": commit, "problem_statement": "p", "gold_patch": patch}


class TestDataset:
    def test_loads(self, golden_env):
        assert [i.instance_id for i in load_dataset(golden_env["dataset"])] == ["shop-1", "shop-2", "shop-3"]

    @pytest.mark.parametrize(
        "line,message",
        [
            ("{not json", "malformed JSON"),
            ('{"instance_id": "a"}', "missing"),
            (json.dumps(instance("a", "c", patch="@@ -x @@\n")), "does not parse"),
        ],
    )
    def test_bad_lines_name_the_line(self, tmp_path, line, message):
        path = tmp_path / "d.jsonl"
        path.write_text(json.dumps(instance("ok", "c")) + "\n" + line + "\n")
        with pytest.raises(ConfigError, match=rf"d.jsonl:2: .*{message}"):
            load_dataset(path)

    def test_duplicate_ids(self, tmp_path):
        with pytest.raises(ConfigError, match="duplicate"):
            load_dataset(jsonl(tmp_path / "d.jsonl", [instance("a", "c"), instance("a", "c")]))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_dataset(tmp_path / "nope.jsonl")


class TestIngest:
    @pytest.fixture
    def two_commits(self, tmp_path):
        clone = tmp_path / "repos" / "fixture__shop"
        first = make_repo(clone)
        (clone / "shop" / "new.py").write_text("def added():\n    return 1\n")
        git("add", "-A", cwd=clone)
        git("commit", "-q", "-m", "second", cwd=clone)
        second = git("rev-parse", "HEAD", cwd=clone)
        return tmp_path, first, second

    def test_two_worktrees_at_named_commits(self, two_commits):
        root, first, second = two_commits
        ds = load_dataset(jsonl(root / "d.jsonl", [instance("i1", first), instance("i2", second)]))
        report = ingest(ds, root / "repos", root / "ws")
        assert report.materialized == ["i1", "i2"]
        index = load_workspace_index(root / "ws")
        heads = {iid: git("rev-parse", "HEAD", cwd=root / "ws" / e["path"]) for iid, e in index.items()}
        assert heads == {"i1": first, "i2": second}
        assert not (root / "ws" / index["i1"]["path"] / "shop" / "new.py").exists()
        assert (root / "ws" / index["i2"]["path"] / "shop" / "new.py").exists()

        again = ingest(ds, root / "repos", root / "ws")
        assert again.materialized == [] and again.skipped == ["i1", "i2"]

    def test_unknown_commit(self, two_commits):
        root, first, _ = two_commits
        ds = load_dataset(jsonl(root / "d.jsonl", [instance("good", first), instance("bad", "f" * 40)]))
        report = ingest(ds, root / "repos", root / "ws")
        assert report.materialized == ["good"] and list(report.unavailable) == ["bad"]
        assert load_workspace_index(root / "ws")["bad"]["status"] == "unavailable"

    def test_unknown_repo(self, two_commits):
        root, first, _ = two_commits
        ds = load_dataset(jsonl(root / "d.jsonl", [instance("x", first, repo="other/repo")]))
        assert ingest(ds, root / "repos", root / "ws").unavailable == {"x": "no local clone"}


def run_config(env, out, toolset, stopping, traces=None, **kw):
    policy = f"scripted:{TRACES / traces}" if traces else "remote"
    return runner.run(env["dataset"], env["workspaces"], StrategyConfig(toolset, stopping), policy, TokenCounterConfig(), out, **kw)


class TestRun:
    def test_matches_committed_golden_records(self, golden_env, tmp_path):
        outcome = run_config(golden_env, tmp_path, "acr", "tc", "acr-react")
        assert (outcome.run_dir / "records.jsonl").read_text() == (GOLDEN / "expected" / "acr-tc.records.jsonl").read_text()

    def test_rerun_byte_identical(self, golden_env, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        a = run_config(golden_env, tmp_path, "bm25", "sr", "bm25-react")
        first = {p.name: p.read_bytes() for p in a.run_dir.rglob("*") if p.is_file()}
        b = run_config(golden_env, tmp_path, "bm25", "sr", "bm25-react", workers=3)
        assert a.run_dir == b.run_dir
        assert {p.name: p.read_bytes() for p in b.run_dir.rglob("*") if p.is_file()} == first

    def test_manifest_contents(self, golden_env, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "86400")
        outcome = run_config(golden_env, tmp_path, "bm25", "baseline")
        manifest = json.loads((outcome.run_dir / "manifest.json").read_text())
        assert manifest["timestamp"] == "1970-01-02T00:00:00+00:00"
        assert manifest["strategy"]["stopping"] == "baseline" and manifest["instances"] == {"ok": 3, "failed": 0}
        assert outcome.run_dir.name.startswith("shop__bm25-baseline__remote__")

    def test_baseline_with_acr_rejected_before_running(self, golden_env, tmp_path):
        code = main(["run", "--dataset", str(golden_env["dataset"]), "--workspaces", str(golden_env["workspaces"]),
                     "--toolset", "acr", "--stopping", "baseline", "--output", str(tmp_path / "o")])
        assert code == 1 and not (tmp_path / "o").exists()

    def test_interrupted_run_has_no_manifest(self, golden_env, tmp_path):
        calls = []

        def interrupt(inst, *args):
            calls.append(inst.instance_id)
            if len(calls) == 2:
                raise KeyboardInterrupt
            return runner.run_instance(inst, *args)

        with pytest.raises(KeyboardInterrupt):
            run_config(golden_env, tmp_path, "acr", "tc", "acr-react", instance_runner=interrupt)
        [run_dir] = tmp_path.iterdir()
        assert not (run_dir / "manifest.json").exists() and not (run_dir / "records.jsonl").exists()
        assert len(list((run_dir / "instances").iterdir())) == 1
        with pytest.raises(ConfigError, match="manifest"):
            evaluate.evaluate_run(run_dir, golden_env["dataset"], golden_env["workspaces"])

    def test_crashing_instances_isolated_and_exit_2(self, golden_env, tmp_path):
        def crash(inst, *args):
            if inst.instance_id != "shop-1":
                raise RuntimeError("boom")
            return runner.run_instance(inst, *args)

        outcome = run_config(golden_env, tmp_path, "acr", "tc", "acr-react", instance_runner=crash)
        assert (outcome.n_ok, outcome.n_failed, outcome.exit_code) == (1, 2, 2)
        _, report = evaluate.evaluate_run(outcome.run_dir, golden_env["dataset"], golden_env["workspaces"])
        assert report.n_instances == 1 and report.excluded["run_failed"] == 2

    def test_bad_policy_spec(self, golden_env, tmp_path):
        with pytest.raises(ConfigError):
            runner.run(golden_env["dataset"], golden_env["workspaces"], StrategyConfig("acr", "tc"), "oracle", TokenCounterConfig(), tmp_path)

    def test_bm25_cache_reused(self, golden_env, tmp_path):
        cache = tmp_path / "cache"
        run_config(golden_env, tmp_path / "a", "bm25", "baseline", cache_dir=cache)
        [pkl] = cache.iterdir()
        stamp = pkl.stat().st_mtime_ns
        run_config(golden_env, tmp_path / "b", "bm25", "baseline", cache_dir=cache)
        assert pkl.stat().st_mtime_ns == stamp


class TestEvalAndReport:
    def test_eval_twice_identical(self, golden_env, tmp_path):
        run_dir = run_config(golden_env, tmp_path, "acr", "sr", "acr-react").run_dir
        evaluate.evaluate_run(run_dir, golden_env["dataset"], golden_env["workspaces"])
        first = {p.name: p.read_bytes() for p in (run_dir / "eval").iterdir()}
        evaluate.evaluate_run(run_dir, golden_env["dataset"], golden_env["workspaces"])
        assert {p.name: p.read_bytes() for p in (run_dir / "eval").iterdir()} == first
        assert "averaging: macro" in first["aggregate.md"].decode()

    def test_two_runs_write_correlations(self, golden_env, tmp_path):
        dirs = [run_config(golden_env, tmp_path, "bm25", s, t).run_dir for s, t in [("tc", "bm25-react"), ("sr", "bm25-react")]]
        evaluate.evaluate_runs(dirs, golden_env["dataset"], golden_env["workspaces"], tmp_path / "summary")
        corr = json.loads((tmp_path / "summary" / "correlations.json").read_text())
        assert set(corr) >= {"precision_vs_reasoning", "recall_vs_reasoning", "precision_vs_ctxlen", "recall_vs_ctxlen"}

    def test_report_single_dir(self, golden_env, tmp_path):
        run_dir = run_config(golden_env, tmp_path, "acr", "tc", "acr-react").run_dir
        evaluate.evaluate_run(run_dir, golden_env["dataset"], golden_env["workspaces"])
        text = evaluate.report([run_dir / "eval"])
        assert len(text.strip().splitlines()) == 3 and "ReAct + TC" in text

    def test_report_accepts_external_rows(self, tmp_path):
        text = evaluate.report([GOLDEN.parent / "results_table_rows.json"])
        assert "ACR (custom)" in text and len(text.strip().splitlines()) == 18


class TestMain:
    def test_full_cli_flow(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        commit = make_repo(tmp_path / "repos" / "fixture__shop")
        ds = tmp_path / "shop.jsonl"
        ds.write_text((GOLDEN / "dataset.template.jsonl").read_text().replace("{commit}", commit))
        common = ["--dataset", str(ds), "--workspaces", str(tmp_path / "ws")]
        assert main(["ingest", *common, "--repos-dir", str(tmp_path / "repos")]) == 0
        assert main(["index", *common, "--cache-dir", str(tmp_path / "cache")]) == 0
        stats = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert stats["files"] == 10 and stats["parse_failures"] == 0
        out = tmp_path / "runs"
        assert main(["run", *common, "--toolset", "bm25", "--stopping", "baseline", "--output", str(out)]) == 0
        assert main(["run", *common, "--toolset", "acr", "--stopping", "tc", "--policy", f"scripted:{TRACES / 'acr-react'}", "--output", str(out)]) == 0
        capsys.readouterr()
        runs = sorted(str(p) for p in out.iterdir())
        assert main(["eval", *runs, *common, "--out", str(tmp_path / "summary")]) == 0
        assert "Baseline" in capsys.readouterr().out
        assert main(["report", *runs, "--out", str(tmp_path / "table.md")]) == 0
        assert (tmp_path / "table.md").read_text().count("\n") == 4

    def test_config_error_exit_code(self, tmp_path, capsys):
        assert main(["run", "--dataset", str(tmp_path / "missing.jsonl"), "--workspaces", str(tmp_path), "--output", str(tmp_path)]) == 1
        assert "configuration error" in capsys.readouterr().err

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "ctxlab", "--help"], capture_output=True, text=True)
        assert res.returncode == 0 and "ingest" in res.stdout
