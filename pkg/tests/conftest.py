"""Общие фикстуры: маленькие корпуса и конфигурация CLI."""

import json

import pytest

from dataset.generator import GeneratorSpec, generate_corpus
from model.classifier import PredictionRecord


@pytest.fixture
def small_spec() -> GeneratorSpec:
    return GeneratorSpec(
        num_classes=6,
        num_objects=5,
        feature_dim=4,
        num_scenes=200,
        scene_size=4,
        zipf_exponent=1.0,
        confusable_pairs=[(4, 0, 0.9)],
        seed=3,
    )


@pytest.fixture
def small_corpus(small_spec):
    return generate_corpus(small_spec)


@pytest.fixture
def run_config_file(tmp_path):
    """JSON-конфигурация запуска для быстрых прогонов CLI"""
    payload = {
        "generator": {
            "num_classes": 6,
            "num_objects": 5,
            "feature_dim": 4,
            "num_scenes": 200,
            "scene_size": 4,
            "zipf_exponent": 1.0,
            "class_separation": 1.5,
            "confusable_pairs": [[4, 0, 0.9]],
        },
        "train": {"epochs": 3},
        "baseline_epochs": 3,
        "loss": {"num_neighbors": 2},
        "eval": {"dp_ks": [1, 2]},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def make_record(scene_id: int, gt_label: int, predicted: int, confidence: float) -> PredictionRecord:
    return PredictionRecord(
        scene_id=scene_id,
        subject_id=0,
        object_id=0,
        gt_label=gt_label,
        predicted=predicted,
        confidence=confidence,
    )
