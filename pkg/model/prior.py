"""
Частотная модель контекста: Pr(r | subject, object) со сглаживанием Лапласа.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dataset.samples import TripletSample, stack_samples
from utils.errors import DataValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrequencyPrior:
    """Таблица O×O×C вероятностей предикатов для каждой пары субъект-объект"""
    table: np.ndarray
    smoothing: float

    @property
    def num_objects(self) -> int:
        return int(self.table.shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.table.shape[2])

    def distribution(self, subject_id: int, object_id: int) -> np.ndarray:
        return self.table[subject_id, object_id]

    def log_table(self) -> np.ndarray:
        """Логарифмы вероятностей: смещение логитов классификатора"""
        return np.log(self.table)


def build_frequency_prior(train_samples: Sequence[TripletSample], num_classes: int,
                          num_objects: int, smoothing: float = 1.0) -> FrequencyPrior:
    """
    Построение частотной модели по обучающему корпусу

    Args:
        train_samples: Непустой обучающий корпус
        num_classes: Число предикатов C
        num_objects: Число классов объектов O
        smoothing: Псевдосчет ε > 0

    Returns:
        FrequencyPrior с prior(r|s,o) = (count(s,r,o) + ε) / (Σ_r count(s,r,o) + Cε)
    """
    if smoothing <= 0:
        raise DataValidationError(f"Сглаживание должно быть положительным, получено {smoothing}")
    if not train_samples:
        raise DataValidationError("Нельзя строить частотную модель по пустому корпусу")

    arrays = stack_samples(train_samples)
    counts = np.zeros((num_objects, num_objects, num_classes), dtype=np.float64)
    np.add.at(counts, (arrays.subjects, arrays.objects, arrays.labels), 1.0)

    smoothed = counts + smoothing
    table = smoothed / smoothed.sum(axis=2, keepdims=True)
    seen = int(np.count_nonzero(counts.sum(axis=2)))
    logger.info(f"Частотная модель построена: {seen} из {num_objects * num_objects} контекстов встречались")
    return FrequencyPrior(table=table, smoothing=smoothing)
