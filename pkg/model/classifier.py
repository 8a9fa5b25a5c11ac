"""
Линейный классификатор предикатов со смещением логитов от частотной модели.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from dataset.samples import CorpusHeader, SampleArrays, TripletSample, stack_samples
from utils.errors import DimensionMismatchError

logger = logging.getLogger(__name__)

INIT_SCALE = 0.01


@dataclass
class Classifier:
    """
    Параметры классификатора

    weights: C×D, bias: C, prior_log: O×O×C логарифмы частотной модели (или None).
    prior_log не обучается.
    """
    weights: np.ndarray
    bias: np.ndarray
    prior_log: Optional[np.ndarray] = None

    @property
    def num_classes(self) -> int:
        return int(self.weights.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.weights.shape[1])

    @property
    def num_objects(self) -> Optional[int]:
        return None if self.prior_log is None else int(self.prior_log.shape[0])

    def check_compatible(self, header: CorpusHeader):
        """Сверка размерностей модели с заголовком корпуса"""
        if self.num_classes != header.num_classes:
            raise DimensionMismatchError("C", self.num_classes, header.num_classes)
        if self.feature_dim != header.feature_dim:
            raise DimensionMismatchError("D", self.feature_dim, header.feature_dim)
        if self.prior_log is not None and self.num_objects != header.num_objects:
            raise DimensionMismatchError("O", self.num_objects, header.num_objects)


@dataclass(frozen=True)
class PredictionRecord:
    """Предсказание для одной пары субъект-объект"""
    scene_id: int
    subject_id: int
    object_id: int
    gt_label: int
    predicted: int
    confidence: float


def init_classifier(num_classes: int, feature_dim: int, seed: int,
                    prior_log: Optional[np.ndarray] = None) -> Classifier:
    """Нулевое смещение, веса равномерно из [-0.01, 0.01]"""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    weights = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(num_classes, feature_dim))
    return Classifier(weights=weights, bias=np.zeros(num_classes), prior_log=prior_log)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax по последней оси с вычитанием максимума"""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def batch_logits(model: Classifier, features: np.ndarray, subjects: np.ndarray,
                 objects: np.ndarray) -> np.ndarray:
    """Логиты η для пакета (B×C)"""
    if features.shape[1] != model.feature_dim:
        raise DimensionMismatchError("D", model.feature_dim, features.shape[1])
    logits = features @ model.weights.T + model.bias
    if model.prior_log is not None:
        logits = logits + model.prior_log[subjects, objects]
    return logits


def forward_logits(model: Classifier, sample: TripletSample) -> np.ndarray:
    """η = W·x + b (+ log prior(·|s, o))"""
    if len(sample.features) != model.feature_dim:
        raise DimensionMismatchError("D", model.feature_dim, len(sample.features))
    logits = model.weights @ np.asarray(sample.features, dtype=np.float64) + model.bias
    if model.prior_log is not None:
        if not (0 <= sample.subject_id < model.num_objects and 0 <= sample.object_id < model.num_objects):
            raise DimensionMismatchError("O", model.num_objects, max(sample.subject_id, sample.object_id) + 1)
        logits = logits + model.prior_log[sample.subject_id, sample.object_id]
    return logits


def predict_scores(model: Classifier, sample: TripletSample) -> Tuple[int, np.ndarray]:
    """Top-1 класс (наименьший индекс при равенстве) и вероятности φ"""
    probabilities = softmax(forward_logits(model, sample))
    return int(np.argmax(probabilities)), probabilities


def predict_arrays(model: Classifier, arrays: SampleArrays) -> Tuple[np.ndarray, np.ndarray]:
    """Top-1 и уверенность для всех примеров"""
    if len(arrays) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    probabilities = softmax(batch_logits(model, arrays.features, arrays.subjects, arrays.objects))
    predicted = np.argmax(probabilities, axis=1)
    confidence = probabilities[np.arange(len(arrays)), predicted]
    return predicted, confidence


def predict_corpus(model: Classifier, samples: Sequence[TripletSample]) -> List[PredictionRecord]:
    """Пакетный вывод по корпусу"""
    arrays = stack_samples(samples, model.feature_dim)
    predicted, confidence = predict_arrays(model, arrays)
    return [
        PredictionRecord(
            scene_id=s.scene_id,
            subject_id=s.subject_id,
            object_id=s.object_id,
            gt_label=s.label,
            predicted=int(p),
            confidence=float(c),
        )
        for s, p, c in zip(samples, predicted, confidence)
    ]
