"""Текстовые форматы корпусов, моделей, решеток и отчетов."""

import json

import numpy as np
import pytest

from dataset.samples import CorpusHeader, TripletSample
from lattice.predicate_lattice import synthetic_lattice
from model.classifier import Classifier
from storage.artifacts import CorpusStore, LatticeStore, ModelStore
from storage.formats import format_decimal, parse_header
from storage.reports import ReportStore
from utils.errors import ArtifactIOError, CorpusFormatError, DataValidationError
from utils.file_handler import file_sha256


class TestCorpusStore:

    def test_save_then_load_equal_samples(self, tmp_path, small_spec, small_corpus):
        path = str(tmp_path / "corpus.txt")
        CorpusStore.save_corpus(small_corpus[0], path, small_spec.header)
        header, loaded = CorpusStore.load_corpus_with_header(path)
        assert header == small_spec.header
        assert loaded == small_corpus[0]

    def test_negative_label_names_line(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("# C=3 O=2 D=2\n0,0,1,1,0.5,0.25\n0,1,1,-1,0.5,0.25\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError) as excinfo:
            CorpusStore.load_corpus(str(path))
        assert excinfo.value.line_number == 3

    def test_label_beyond_classes(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("# C=3 O=2 D=1\n0,0,1,3,0.5\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError) as excinfo:
            CorpusStore.load_corpus(str(path))
        assert excinfo.value.line_number == 2

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("# C=3 O=2 D=2\n0,0,1,1,0.5\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            CorpusStore.load_corpus(str(path))

    def test_empty_file_is_empty_corpus(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("", encoding="utf-8")
        assert CorpusStore.load_corpus(str(path)) == []

    def test_missing_class_rejected_for_training(self, tmp_path):
        path = str(tmp_path / "corpus.txt")
        header = CorpusHeader(3, 2, 1)
        samples = [TripletSample(0, 0, 0, (1.0,), 0), TripletSample(0, 1, 0, (2.0,), 2)]
        CorpusStore.save_corpus(samples, path, header)
        assert len(CorpusStore.load_corpus(path)) == 2
        with pytest.raises(DataValidationError):
            CorpusStore.load_corpus_with_header(path, require_all_classes=True)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ArtifactIOError) as excinfo:
            CorpusStore.load_corpus(str(tmp_path / "absent.txt"))
        assert "absent.txt" in str(excinfo.value)

    def test_save_is_byte_stable(self, tmp_path, small_spec, small_corpus):
        first = str(tmp_path / "a.txt")
        second = str(tmp_path / "b.txt")
        CorpusStore.save_corpus(small_corpus[1], first, small_spec.header)
        CorpusStore.save_corpus(small_corpus[1], second, small_spec.header)
        assert file_sha256(first) == file_sha256(second)


class TestModelStore:

    def test_weights_restored_exactly(self, tmp_path):
        rng = np.random.default_rng(0)
        model = Classifier(
            weights=rng.normal(size=(4, 3)),
            bias=rng.normal(size=4),
            prior_log=np.log(rng.dirichlet(np.ones(4), size=(2, 2))),
        )
        path = str(tmp_path / "model.txt")
        ModelStore.save_model(model, path)
        loaded = ModelStore.load_model(path)
        np.testing.assert_array_equal(loaded.weights, model.weights)
        np.testing.assert_array_equal(loaded.bias, model.bias)
        np.testing.assert_array_equal(loaded.prior_log, model.prior_log)

    def test_model_without_prior(self, tmp_path):
        model = Classifier(weights=np.ones((2, 2)), bias=np.zeros(2))
        path = str(tmp_path / "model.txt")
        ModelStore.save_model(model, path)
        assert ModelStore.load_model(path).prior_log is None

    def test_truncated_model(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("# C=3 D=2 O=0 has_prior=0\n# weights\n1,2\n3,4\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            ModelStore.load_model(str(path))


class TestLatticeStore:

    def test_lattice_restored(self, tmp_path):
        lattice = synthetic_lattice(7, seed=1, num_neighbors=3)
        path = str(tmp_path / "lattice.txt")
        LatticeStore.save_lattice(lattice, path)
        loaded = LatticeStore.load_lattice(path)
        np.testing.assert_array_equal(loaded.s, lattice.s)
        assert loaded.n == lattice.n
        assert loaded.neighbors == lattice.neighbors
        assert loaded.num_neighbors == 3

    def test_self_neighbor_rejected(self, tmp_path):
        path = tmp_path / "lattice.txt"
        path.write_text("# C=2 M=1\n1,0\n0,1\n5,5\n0\n0\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError) as excinfo:
            LatticeStore.load_lattice(str(path))
        assert excinfo.value.line_number == 5


class TestFormats:

    def test_header_missing_field(self):
        with pytest.raises(CorpusFormatError):
            parse_header("# C=3 O=2", ["C", "O", "D"])

    def test_header_values(self):
        assert parse_header("# C=50 O=30 D=16", ["C", "O", "D"]) == {"C": 50, "O": 30, "D": 16}

    def test_decimal_restores_value(self):
        for value in (0.1, -1.0 / 3.0, 1e-7, 12345.678):
            assert float(format_decimal(value)) == value


class TestReportStore:

    def test_json_sorted_and_strict(self, tmp_path):
        path = str(tmp_path / "report.json")
        ReportStore.write_json(path, {"b": 1, "a": 2})
        text = (tmp_path / "report.json").read_text(encoding="utf-8")
        assert text.index('"a"') < text.index('"b"')
        with pytest.raises(ValueError):
            ReportStore.write_json(path, {"x": float("nan")})

    def test_manifest_embeds_hashes(self, tmp_path):
        artifact = tmp_path / "out.txt"
        artifact.write_text("data\n", encoding="utf-8")
        manifest = ReportStore.write_manifest(str(tmp_path), "train-baseline", {"seed": 1},
                                              {"in.txt": "abc"}, [str(artifact)])
        payload = json.loads(open(manifest, encoding="utf-8").read())
        assert manifest.endswith("train_baseline_manifest.json")
        assert payload["outputs"]["out.txt"] == file_sha256(str(artifact))
        assert payload["config"] == {"seed": 1}
        assert payload["version"]

    def test_table_columns(self, tmp_path):
        path = str(tmp_path / "table.csv")
        ReportStore.write_table(path, [{"metric": "R@K", "value": 0.5}], ["metric", "value"])
        assert (tmp_path / "table.csv").read_text(encoding="utf-8") == "metric,value\nR@K,0.5\n"
