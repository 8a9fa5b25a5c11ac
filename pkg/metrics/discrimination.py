"""
Различающая способность DP@K и кольцевые распределения предсказаний.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from dataset.samples import ClassFrequencies
from lattice.predicate_lattice import (
    confusion_from_predictions,
    neighbor_sets,
    normalize_confusion,
    row_neighbors,
)
from model.classifier import PredictionRecord
from utils.errors import DataValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RingRecord:
    """Распределение предсказаний для примеров одного класса"""
    gt_class: int
    slices: Tuple[Tuple[str, float], ...]

    def total(self) -> float:
        return float(sum(p for _, p in self.slices))


def confusion_prime(records: Sequence[PredictionRecord],
                    num_classes: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Нормированная матрица ошибок S′ по предсказаниям на тестовой выборке

    Returns:
        (S′ C×C, маска присутствующих классов)
    """
    labels = np.asarray([r.gt_label for r in records], dtype=np.int64)
    predicted = np.asarray([r.predicted for r in records], dtype=np.int64)
    counts = confusion_from_predictions(labels, predicted, num_classes)
    frequencies = ClassFrequencies(tuple(int(c) for c in np.bincount(labels, minlength=num_classes)))
    lattice = normalize_confusion(counts, frequencies, num_neighbors=1, allow_empty_rows=True)
    return lattice.s, lattice.present()


def top_confusers(s_prime: np.ndarray, k: int) -> Tuple[Tuple[int, ...], ...]:
    """V′_i: k недиагональных столбцов с наибольшим s′_ij"""
    return neighbor_sets(s_prime, k)


def _check_dp_k(k: int, num_classes: int):
    if not 1 <= k <= num_classes - 1:
        raise DataValidationError(f"k={k} вне диапазона [1, {num_classes - 1}]")


def dp_at_k(s_prime: np.ndarray, k: int, present: Optional[np.ndarray] = None) -> float:
    """
    DP@k в процентах

    Среднее по классам от (1/k) Σ_{j∈V′_i} (s′_ii − s′_ij); отрицательные
    слагаемые строк сохраняются. Отсутствующие в выборке классы не учитываются.
    """
    num_classes = s_prime.shape[0]
    _check_dp_k(k, num_classes)
    if present is None:
        present = np.ones(num_classes, dtype=bool)

    confusers = top_confusers(s_prime, k)
    terms = []
    for i in range(num_classes):
        if not present[i]:
            continue
        neighbors = list(confusers[i])
        terms.append(float(np.mean(s_prime[i, i] - s_prime[i, neighbors])))
    if not terms:
        return 0.0
    value = float(np.clip(np.mean(terms), -1.0, 1.0))
    return 100.0 * value


def prediction_distribution(s_prime: np.ndarray, gt_class: int, k: int) -> RingRecord:
    """Доли: сам класс, k главных «путающих» классов и остаток"""
    num_classes = s_prime.shape[0]
    _check_dp_k(k, num_classes)
    if not 0 <= gt_class < num_classes:
        raise DataValidationError(f"Класс {gt_class} вне диапазона [0, {num_classes})")

    row = s_prime[gt_class]
    slices: List[Tuple[str, float]] = [("self", float(row[gt_class]))]
    for j in row_neighbors(row, gt_class, k):
        slices.append((f"class_{j}", float(row[j])))
    used = sum(p for _, p in slices)
    slices.append(("other", max(0.0, 1.0 - used)))
    return RingRecord(gt_class=gt_class, slices=tuple(slices))
