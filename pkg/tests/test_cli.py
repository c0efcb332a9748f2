"""Command-line workflow tests.

The staged subcommands (train / infer / cluster / score) must compose into
exactly what a single ``run`` produces, so a long experiment can be
restarted at any stage without changing results.  Everything goes through
``senseforge.cli.main`` in-process; one subprocess test covers the
``python -m senseforge`` entry point.
"""

import json
import subprocess
import sys

import pytest

from senseforge.cli import build_parser, main, resolve_seed
from senseforge.corpus import Instance, Target, load_key_file

from conftest import four_sense_instances, write_gold_key, write_jsonl_corpus

# Small-but-structured settings shared by raw argv lists below.  Inference
# settings stay at their defaults so the models written by `train` (which
# takes no inference flags) behave exactly like the in-run ones.
FAST = ["--k", "8", "--iters", "150", "--restarts", "6"]


@pytest.fixture(scope="module")
def corpus_and_key(tmp_path_factory):
    """Two targets (a noun and a verb) with two planted senses each."""
    root = tmp_path_factory.mktemp("cli_corpus")
    instances_n, gold_n = four_sense_instances(
        "bank.n", n_per_sense=[8, 8, 0, 0], doc_len=30, seed=0
    )
    instances_v, gold_v = four_sense_instances(
        "run.v", n_per_sense=[7, 9, 0, 0], doc_len=30, seed=1
    )
    corpus = root / "corpus.jsonl"
    key = root / "gold.key"
    write_jsonl_corpus(corpus, instances_n + instances_v)
    write_gold_key(key, {"bank.n": gold_n, "run.v": gold_v})
    return corpus, key


def run_argv(corpus, key, out, seed="7"):
    argv = ["run", "--corpus", str(corpus), "--clusters", "gold", "--out", str(out)]
    if key is not None:
        argv += ["--gold", str(key)]
    if seed is not None:
        argv += ["--seed", seed]
    return argv + FAST


class TestSeedResolution:
    def test_flag_beats_environment(self, monkeypatch):
        monkeypatch.setenv("SENSEFORGE_SEED", "99")
        assert resolve_seed(5) == 5

    def test_environment_when_no_flag(self, monkeypatch):
        monkeypatch.setenv("SENSEFORGE_SEED", "99")
        assert resolve_seed(None) == 99

    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv("SENSEFORGE_SEED", raising=False)
        assert resolve_seed(None) == 1

    def test_non_integer_environment_rejected(self, monkeypatch):
        monkeypatch.setenv("SENSEFORGE_SEED", "lots")
        with pytest.raises(ValueError, match="SENSEFORGE_SEED"):
            resolve_seed(None)

    def test_bad_environment_is_a_config_error(
        self, corpus_and_key, tmp_path, monkeypatch, capsys
    ):
        corpus, key = corpus_and_key
        monkeypatch.setenv("SENSEFORGE_SEED", "lots")
        rc = main(run_argv(corpus, key, tmp_path / "out", seed=None))
        assert rc == 2
        assert "SENSEFORGE_SEED" in capsys.readouterr().err


class TestParser:
    def test_clusters_takes_int_or_gold(self):
        parser = build_parser()
        base = ["cluster", "--thetas", "t.jsonl", "--out", "o.key", "--clusters"]
        assert parser.parse_args(base + ["4"]).clusters == 4
        assert parser.parse_args(base + ["gold"]).clusters == "gold"
        with pytest.raises(SystemExit) as excinfo:
            parser.parse_args(base + ["few"])
        assert excinfo.value.code == 2

    def test_k_values_parse(self):
        parser = build_parser()
        base = [
            "sweep-k", "--corpus", "c.jsonl", "--gold", "g.key",
            "--clusters", "gold", "--out", "o", "--k-values",
        ]
        assert parser.parse_args(base + ["10,50,200"]).k_values == [10, 50, 200]
        with pytest.raises(SystemExit):
            parser.parse_args(base + ["10,lots"])

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "senseforge", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        for subcommand in ("train", "infer", "cluster", "score", "run", "sweep-k"):
            assert subcommand in proc.stdout


@pytest.fixture(scope="module")
def outputs(corpus_and_key, tmp_path_factory):
    """One end-to-end run plus the same work done stage by stage."""
    corpus, key = corpus_and_key
    root = tmp_path_factory.mktemp("staged")
    run_dir = root / "run"
    assert main(run_argv(corpus, key, run_dir)) == 0

    models = root / "models"
    thetas = root / "thetas.jsonl"
    system = root / "system.key"
    report = root / "report.json"
    corpus_args = ["--corpus", str(corpus)]
    assert main(
        ["train", *corpus_args, *FAST[:4], "--seed", "7", "--out", str(models)]
    ) == 0
    assert main(
        ["infer", "--models", str(models), *corpus_args, "--out", str(thetas)]
    ) == 0
    assert main(
        [
            "cluster", "--thetas", str(thetas), "--clusters", "gold",
            "--gold", str(key), "--restarts", "6", "--seed", "7",
            "--out", str(system),
        ]
    ) == 0
    assert main(
        ["score", "--system", str(system), "--gold", str(key), "--out", str(report)]
    ) == 0
    return root, run_dir


class TestStagedEqualsRun:
    def test_system_keys_byte_identical(self, outputs):
        root, run_dir = outputs
        assert (root / "system.key").read_bytes() == (run_dir / "system.key").read_bytes()

    def test_theta_files_byte_identical(self, outputs):
        root, run_dir = outputs
        assert (root / "thetas.jsonl").read_bytes() == (run_dir / "thetas.jsonl").read_bytes()

    def test_scores_match_run_report(self, outputs):
        root, run_dir = outputs
        staged = json.loads((root / "report.json").read_text())
        full = json.loads((run_dir / "report.json").read_text())
        assert staged["aggregates"] == full["aggregates"]
        for target, entry in staged["targets"].items():
            assert entry["scores"] == full["targets"][target]["scores"]

    def test_models_equivalent(self, outputs):
        from senseforge.lda import load_model

        root, run_dir = outputs
        for name in ("bank.n", "run.v"):
            a = load_model(root / "models" / f"{name}.model.npz")
            b = load_model(run_dir / "models" / f"{name}.model.npz")
            assert a.vocab.words == b.vocab.words
            assert a.config == b.config
            assert (a.n_kw == b.n_kw).all()

    def test_score_tsv_written_beside_json(self, outputs):
        root, _ = outputs
        tsv = (root / "report.tsv").read_text()
        assert tsv.startswith("metric\tall\tverbs\tnouns\n")
        assert "v_measure" in tsv and "f_score" in tsv


class TestSeedEnvironment:
    def test_env_seed_matches_flag_seed(
        self, corpus_and_key, tmp_path, monkeypatch, capsys
    ):
        corpus, key = corpus_and_key
        assert main(run_argv(corpus, key, tmp_path / "flag", seed="7")) == 0
        monkeypatch.setenv("SENSEFORGE_SEED", "7")
        assert main(run_argv(corpus, key, tmp_path / "env", seed=None)) == 0
        # flag wins even when the environment disagrees
        monkeypatch.setenv("SENSEFORGE_SEED", "5")
        assert main(run_argv(corpus, key, tmp_path / "both", seed="7")) == 0
        capsys.readouterr()

        flag = (tmp_path / "flag" / "system.key").read_bytes()
        assert (tmp_path / "env" / "system.key").read_bytes() == flag
        assert (tmp_path / "both" / "system.key").read_bytes() == flag


class TestExitCodes:
    def test_missing_corpus_is_config_error(self, tmp_path, capsys):
        rc = main(run_argv(tmp_path / "nope.jsonl", None, tmp_path / "out"))
        assert rc == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_failing_word_exits_one_but_run_continues(
        self, corpus_and_key, tmp_path, capsys
    ):
        corpus, key = corpus_and_key
        # A target whose every token is digits yields an empty vocabulary,
        # which kills training for that word only.
        broken = [
            Instance(Target.parse("void.v"), f"void.v.{i}", "404 500 301")
            for i in range(3)
        ]
        instances, _ = four_sense_instances("bank.n", n_per_sense=[8, 8, 0, 0], doc_len=30)
        mixed = tmp_path / "mixed.jsonl"
        write_jsonl_corpus(mixed, instances + broken)

        out = tmp_path / "out"
        rc = main(run_argv(mixed, key, out))
        captured = capsys.readouterr()
        assert rc == 1
        assert "void.v" in captured.err
        report = json.loads((out / "report.json").read_text())
        assert "bank.n" in report["targets"]
        assert [f["target"] for f in report["failures"]] == ["void.v"]

    def test_train_reports_per_word_failures(self, tmp_path, capsys):
        broken = [Instance(Target.parse("void.v"), "void.v.1", "404 500")]
        corpus = tmp_path / "broken.jsonl"
        write_jsonl_corpus(corpus, broken)
        rc = main(
            ["train", "--corpus", str(corpus), *FAST[:4], "--out", str(tmp_path / "m")]
        )
        assert rc == 1
        assert "void.v" in capsys.readouterr().err

    def test_cluster_gold_policy_needs_gold_file(self, tmp_path, capsys):
        thetas = tmp_path / "thetas.jsonl"
        thetas.write_text('{"target": "bank.n", "id": "bank.n.1", "theta": [1.0]}\n')
        rc = main(
            ["cluster", "--thetas", str(thetas), "--clusters", "gold",
             "--out", str(tmp_path / "s.key")]
        )
        assert rc == 2
        assert "--gold" in capsys.readouterr().err

    def test_infer_without_model_is_config_error(
        self, corpus_and_key, tmp_path, capsys
    ):
        corpus, _ = corpus_and_key
        (tmp_path / "empty").mkdir()
        rc = main(
            ["infer", "--models", str(tmp_path / "empty"), "--corpus", str(corpus),
             "--out", str(tmp_path / "t.jsonl")]
        )
        assert rc == 2
        assert "bank.n" in capsys.readouterr().err

    def test_score_with_no_shared_targets_fails(self, tmp_path, capsys):
        system = tmp_path / "system.key"
        gold = tmp_path / "gold.key"
        system.write_text("bank.n bank.n.1 bank.n.cluster0\n")
        gold.write_text("run.v run.v.1 sense0\n")
        rc = main(
            ["score", "--system", str(system), "--gold", str(gold),
             "--out", str(tmp_path / "r.json")]
        )
        assert rc == 2


class TestScoreCommand:
    def test_gold_against_itself_is_perfect(self, corpus_and_key, tmp_path, capsys):
        _, key = corpus_and_key
        out = tmp_path / "self.json"
        rc = main(["score", "--system", str(key), "--gold", str(key), "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        for subset in ("all", "verbs", "nouns"):
            agg = report["aggregates"][subset]
            assert agg["instance_weighted"]["v_measure"] == 1.0
            assert agg["instance_weighted"]["f_score"] == 1.0
        assert "metric\tall\tverbs\tnouns" in capsys.readouterr().out


class TestSweepCommand:
    def test_sweep_writes_table(self, corpus_and_key, tmp_path, capsys):
        corpus, key = corpus_and_key
        out = tmp_path / "sweep"
        rc = main(
            ["sweep-k", "--corpus", str(corpus), "--gold", str(key),
             "--k-values", "2,6", "--iters", "120", "--clusters", "gold",
             "--restarts", "4", "--seed", "3", "--out", str(out)]
        )
        assert rc == 0
        sweep = json.loads((out / "sweep.json").read_text())
        assert sweep["format"] == "senseforge-sweep"
        assert [row["k"] for row in sweep["rows"]] == [2, 6]
        tsv = (out / "sweep.tsv").read_text()
        assert tsv.startswith("k\t2\t6\n")
        assert tsv in capsys.readouterr().out

    def test_single_k_rejected(self, corpus_and_key, tmp_path, capsys):
        corpus, key = corpus_and_key
        rc = main(
            ["sweep-k", "--corpus", str(corpus), "--gold", str(key),
             "--k-values", "6", "--clusters", "gold", "--out", str(tmp_path / "s")]
        )
        assert rc == 2
        capsys.readouterr()
