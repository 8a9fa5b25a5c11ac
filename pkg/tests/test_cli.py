"""Команды CLI: артефакты, коды завершения и воспроизводимость."""

import argparse
import json
import os

import numpy as np
import pandas as pd

import handlers.diagnostics as diagnostics
from cli import main
from dataset.generator import generate_corpus
from dataset.samples import CorpusHeader, TripletSample
from handlers.common import resolve_run_config
from losses.config import LossKind
from losses.evaluator import LossEvaluator
from model.prior import build_frequency_prior
from model.trainer import train
from storage.artifacts import CorpusStore, ModelStore
from utils.errors import EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION
from utils.file_handler import file_sha256


def _run(command, out_dir, config_path, *extra):
    return main([command, "--out", str(out_dir), "--config", config_path, "--seed", "5", *extra])


def _prepare(out_dir, config_path):
    for command in ("gen", "train-baseline", "build-lattice"):
        assert _run(command, out_dir, config_path) == EXIT_OK


def _error_record(captured) -> dict:
    lines = [line for line in captured.err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


class TestCommands:

    def test_full_sequence(self, tmp_path, run_config_file):
        out = tmp_path / "run"
        _prepare(out, run_config_file)
        assert _run("train-fgpl", out, run_config_file) == EXIT_OK
        assert _run("eval", out, run_config_file) == EXIT_OK
        assert _run("compare", out, run_config_file) == EXIT_OK

        for name in ("train_corpus.txt", "test_corpus.txt", "model_ce.txt", "lattice.txt",
                     "model_cdl_edl.txt", "report_cdl_edl.json", "metrics_cdl_edl.csv",
                     "rings_cdl_edl.csv", "compare.csv", "compare.json", "compare_manifest.json"):
            assert (out / name).exists(), name

        table = pd.read_csv(out / "compare.csv")
        assert list(table["method"]) == ["CE", "Re-weight", "FGPL"]
        assert {"mR@50", "R@50", "DP@1", "tail@50"} <= set(table.columns)

    def test_manifest_records_inputs(self, tmp_path, run_config_file):
        out = tmp_path / "run"
        _prepare(out, run_config_file)
        manifest = json.loads((out / "build_lattice_manifest.json").read_text(encoding="utf-8"))
        assert manifest["inputs"]["model_ce.txt"] == file_sha256(str(out / "model_ce.txt"))
        assert manifest["inputs"]["train_corpus.txt"] == file_sha256(str(out / "train_corpus.txt"))
        assert manifest["config"]["seed"] == 5
        assert manifest["config"]["generator"]["num_classes"] == 6

    def test_loss_kind_flag(self, tmp_path, run_config_file):
        out = tmp_path / "run"
        _prepare(out, run_config_file)
        assert _run("train-fgpl", out, run_config_file, "--loss-kind", "EDL", "--epochs", "1") == EXIT_OK
        assert (out / "model_edl.txt").exists()

    def test_ablation_table(self, tmp_path, run_config_file):
        out = tmp_path / "run"
        _prepare(out, run_config_file)
        assert _run("ablate", out, run_config_file, "--epochs", "1") == EXIT_OK
        table = pd.read_csv(out / "ablation.csv")
        assert list(table["table"]) == ["CDL"] * 3 + ["EDL"] * 4

    def test_pipeline_over_seeds(self, tmp_path, run_config_file):
        out = tmp_path / "sweep"
        code = main(["pipeline", "--out", str(out), "--config", run_config_file,
                     "--seeds", "1", "2", "--epochs", "1", "--baseline-epochs", "1"])
        assert code == EXIT_OK
        summary = pd.read_csv(out / "pipeline_summary.csv")
        assert len(summary) == 6
        assert sorted(set(summary["seed"])) == [1, 2]
        assert (out / "seed_1" / "compare.csv").exists()
        manifest = json.loads((out / "pipeline_manifest.json").read_text(encoding="utf-8"))
        assert manifest["config"]["seeds"] == [1, 2]
        assert manifest["inputs"]["seed_2/compare.csv"] == file_sha256(str(out / "seed_2" / "compare.csv"))
        assert manifest["outputs"]["pipeline_summary.csv"] == file_sha256(str(out / "pipeline_summary.csv"))

    def test_gradcheck(self, tmp_path):
        out = tmp_path / "grad"
        assert main(["gradcheck", "--out", str(out), "--vectors", "40", "--classes", "8"]) == EXIT_OK
        table = pd.read_csv(out / "gradcheck.csv")
        assert (table["max_relative_error"] <= 1e-4).all()
        manifest = json.loads((out / "gradcheck_manifest.json").read_text(encoding="utf-8"))
        assert manifest["config"]["gradcheck"] == {"vectors": 40, "classes": 8}
        assert manifest["outputs"]["gradcheck.csv"] == file_sha256(str(out / "gradcheck.csv"))


class TestReproducibility:

    def test_gen_is_byte_identical(self, tmp_path, run_config_file):
        first, second = tmp_path / "a", tmp_path / "b"
        assert _run("gen", first, run_config_file) == EXIT_OK
        assert _run("gen", second, run_config_file) == EXIT_OK
        for name in ("train_corpus.txt", "test_corpus.txt", "gen_manifest.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_compare_is_byte_identical(self, tmp_path, run_config_file):
        out = tmp_path / "run"
        _prepare(out, run_config_file)
        assert _run("compare", out, run_config_file) == EXIT_OK
        snapshot = {name: (out / name).read_bytes()
                    for name in ("compare.csv", "compare.json", "report_cdl_edl.json", "compare_manifest.json")}
        assert _run("compare", out, run_config_file) == EXIT_OK
        for name, content in snapshot.items():
            assert (out / name).read_bytes() == content, name

    def test_disk_pipeline_matches_in_process(self, tmp_path, run_config_file):
        out = tmp_path / "run"
        assert _run("gen", out, run_config_file) == EXIT_OK
        assert _run("train-baseline", out, run_config_file) == EXIT_OK

        config = resolve_run_config(argparse.Namespace(config=run_config_file, seed=5))
        spec = config.generator
        train_samples, _ = generate_corpus(spec)
        prior = build_frequency_prior(train_samples, spec.num_classes, spec.num_objects)
        train_config = config.train.model_copy(update={"epochs": config.baseline_epochs})
        model = train(train_samples, train_config, LossEvaluator(LossKind.CE, num_classes=spec.num_classes),
                      prior_log=prior.log_table())

        loaded = ModelStore.load_model(str(out / "model_ce.txt"))
        np.testing.assert_array_equal(loaded.weights, model.weights)
        np.testing.assert_array_equal(loaded.bias, model.bias)


class TestExitCodes:

    def test_missing_input_is_io_error(self, tmp_path, run_config_file, capsys):
        code = _run("train-baseline", tmp_path / "empty", run_config_file)
        assert code == EXIT_IO
        record = _error_record(capsys.readouterr())
        assert record["exit_code"] == EXIT_IO
        assert record["path"].endswith("train_corpus.txt")

    def test_invalid_config_lists_every_field(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"train": {"epochs": -1, "learning_rate": 0}}), encoding="utf-8")
        code = main(["gen", "--out", str(tmp_path / "x"), "--config", str(path)])
        assert code == EXIT_VALIDATION
        record = _error_record(capsys.readouterr())
        assert {"train.epochs", "train.learning_rate"} <= set(record["fields"])

    def test_bad_flag_value_emits_error_record(self, tmp_path, capsys):
        code = main(["gen", "--out", str(tmp_path / "x"), "--seed", "abc"])
        assert code == EXIT_VALIDATION
        record = _error_record(capsys.readouterr())
        assert record["exit_code"] == EXIT_VALIDATION
        assert record["fields"] == ["argv"]
        assert "--seed" in record["error"]

    def test_unknown_command_emits_error_record(self, capsys):
        assert main(["no-such-command"]) == EXIT_VALIDATION
        assert _error_record(capsys.readouterr())["type"] == "ConfigValidationError"

    def test_malformed_config_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["gen", "--out", str(tmp_path / "x"), "--config", str(path)]) == EXIT_VALIDATION

    def test_dimension_mismatch_names_both_sizes(self, tmp_path, run_config_file, capsys):
        out = tmp_path / "run"
        _prepare(out, run_config_file)
        other = str(tmp_path / "other.txt")
        CorpusStore.save_corpus([TripletSample(0, 0, 0, (0.5, 0.5, 0.5), 1)], other, CorpusHeader(6, 5, 3))
        capsys.readouterr()
        code = _run("eval", out, run_config_file, "--model", str(out / "model_ce.txt"), "--corpus", other)
        assert code == EXIT_VALIDATION
        record = _error_record(capsys.readouterr())
        assert (record["dimension"], record["expected"], record["actual"]) == ("D", 4, 3)

    def test_fgpl_without_lattice(self, tmp_path, run_config_file):
        out = tmp_path / "run"
        assert _run("gen", out, run_config_file) == EXIT_OK
        assert _run("train-fgpl", out, run_config_file) == EXIT_IO

    def test_numeric_failure(self, tmp_path, monkeypatch):
        monkeypatch.setattr(diagnostics, "check_gradients", lambda *args, **kwargs: [
            {"loss_kind": "CDL", "checked": 1, "skipped": 0, "max_relative_error": 1.0},
        ])
        assert main(["gradcheck", "--out", str(tmp_path / "g"), "--vectors", "1"]) == EXIT_NUMERIC
        assert os.path.exists(tmp_path / "g" / "gradcheck.csv")
