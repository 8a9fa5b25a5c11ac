"""
Типы данных корпуса: тройки субъект-предикат-объект и частоты классов.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import DataValidationError, DimensionMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusHeader:
    """Размерности корпуса: C предикатов, O объектов, D признаков"""
    num_classes: int
    num_objects: int
    feature_dim: int

    def __post_init__(self):
        if self.num_classes < 1 or self.num_objects < 1 or self.feature_dim < 1:
            raise DataValidationError(
                f"Размерности должны быть положительными: C={self.num_classes}, "
                f"O={self.num_objects}, D={self.feature_dim}"
            )


@dataclass(frozen=True)
class TripletSample:
    """Один экземпляр (субъект, объект, признаки, предикат) внутри сцены"""
    scene_id: int
    subject_id: int
    object_id: int
    features: Tuple[float, ...]
    label: int

    def validate(self, header: CorpusHeader):
        """Проверка инвариантов относительно заголовка корпуса"""
        if not 0 <= self.label < header.num_classes:
            raise DataValidationError(f"Метка {self.label} вне диапазона [0, {header.num_classes})")
        if not 0 <= self.subject_id < header.num_objects:
            raise DataValidationError(f"subject_id {self.subject_id} вне диапазона [0, {header.num_objects})")
        if not 0 <= self.object_id < header.num_objects:
            raise DataValidationError(f"object_id {self.object_id} вне диапазона [0, {header.num_objects})")
        if len(self.features) != header.feature_dim:
            raise DataValidationError(
                f"Ожидалось {header.feature_dim} признаков, получено {len(self.features)}"
            )
        if not all(math.isfinite(value) for value in self.features):
            raise DataValidationError("Признаки должны быть конечными числами")


@dataclass(frozen=True)
class ClassFrequencies:
    """Количество обучающих примеров n_i для каждого предиката"""
    counts: Tuple[int, ...]

    @property
    def num_classes(self) -> int:
        return len(self.counts)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.float64)

    def missing_classes(self) -> List[int]:
        return [i for i, n in enumerate(self.counts) if n == 0]

    def require_positive(self) -> "ClassFrequencies":
        """n_i участвует в знаменателях, поэтому пустые классы недопустимы"""
        missing = self.missing_classes()
        if missing:
            raise DataValidationError(f"Классы без обучающих примеров: {missing}")
        return self


@dataclass(frozen=True)
class SampleArrays:
    """Корпус в виде массивов numpy для пакетных вычислений"""
    features: np.ndarray
    subjects: np.ndarray
    objects: np.ndarray
    labels: np.ndarray
    scene_ids: np.ndarray

    def __len__(self) -> int:
        return int(self.labels.shape[0])


def class_frequencies(samples: Sequence[TripletSample], num_classes: int) -> ClassFrequencies:
    """
    Подсчет частот классов

    Args:
        samples: Непустой список примеров
        num_classes: Число предикатов C

    Returns:
        ClassFrequencies с counts[i] = числу примеров с меткой i
    """
    if not samples:
        raise DataValidationError("Нельзя считать частоты по пустому корпусу")
    labels = np.fromiter((s.label for s in samples), dtype=np.int64, count=len(samples))
    if labels.min() < 0 or labels.max() >= num_classes:
        raise DataValidationError(f"Метки вне диапазона [0, {num_classes})")
    counts = np.bincount(labels, minlength=num_classes)
    return ClassFrequencies(tuple(int(c) for c in counts))


def stack_samples(samples: Sequence[TripletSample], feature_dim: Optional[int] = None) -> SampleArrays:
    """Перевод списка примеров в массивы"""
    n = len(samples)
    if n == 0:
        dim = feature_dim or 0
        empty_int = np.zeros(0, dtype=np.int64)
        return SampleArrays(np.zeros((0, dim)), empty_int, empty_int.copy(), empty_int.copy(), empty_int.copy())

    features = np.asarray([s.features for s in samples], dtype=np.float64)
    if feature_dim is not None and features.shape[1] != feature_dim:
        raise DimensionMismatchError("D", feature_dim, features.shape[1])
    return SampleArrays(
        features=features,
        subjects=np.fromiter((s.subject_id for s in samples), dtype=np.int64, count=n),
        objects=np.fromiter((s.object_id for s in samples), dtype=np.int64, count=n),
        labels=np.fromiter((s.label for s in samples), dtype=np.int64, count=n),
        scene_ids=np.fromiter((s.scene_id for s in samples), dtype=np.int64, count=n),
    )
