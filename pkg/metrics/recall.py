"""
Recall@K по сценам, mean Recall@K по классам и групповой mean recall.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dataset.samples import ClassFrequencies
from model.classifier import PredictionRecord
from utils.errors import DataValidationError

logger = logging.getLogger(__name__)

# Фиксированные размеры групп для 50 предикатов
FIXED_GROUP_SIZES = {50: (16, 17, 17)}
GROUP_NAMES = ("head", "body", "tail")


@dataclass(frozen=True)
class GroupSplit:
    """Разбиение классов по убыванию частоты на head/body/tail"""
    head: Tuple[int, ...]
    body: Tuple[int, ...]
    tail: Tuple[int, ...]

    def groups(self) -> Dict[str, Tuple[int, ...]]:
        return {"head": self.head, "body": self.body, "tail": self.tail}

    @property
    def sizes(self) -> Tuple[int, int, int]:
        return len(self.head), len(self.body), len(self.tail)


def _check_k(k: int):
    if k < 1:
        raise DataValidationError(f"K должно быть не меньше 1, получено {k}")


def recalled_mask(records: Sequence[PredictionRecord], k: int) -> np.ndarray:
    """
    Отметка отозванных триплетов

    В каждой сцене предсказания ранжируются по уверенности (при равенстве по порядку),
    сохраняются первые K; триплет отозван, если его пара попала в top-K
    и предикат совпал с разметкой.
    Сопоставление идет по экземпляру: одинаковые (subject, object) в сцене
    не засчитывают друг другу чужое предсказание.
    """
    _check_k(k)
    scenes = defaultdict(list)
    for index, record in enumerate(records):
        scenes[record.scene_id].append(index)

    mask = np.zeros(len(records), dtype=bool)
    for indices in scenes.values():
        ranked = sorted(indices, key=lambda idx: (-records[idx].confidence, idx))
        for idx in ranked[:k]:
            mask[idx] = records[idx].predicted == records[idx].gt_label
    return mask


def recall_at_k(records: Sequence[PredictionRecord], k: int) -> float:
    """Микро-усредненный recall по всем триплетам всех сцен"""
    mask = recalled_mask(records, k)
    if mask.shape[0] == 0:
        return 0.0
    return float(mask.sum()) / mask.shape[0]


def mean_recall_at_k(records: Sequence[PredictionRecord], k: int,
                     num_classes: int) -> Tuple[float, List[float]]:
    """
    Макро-усредненный recall

    Returns:
        (mR@K по классам, присутствующим в выборке; recall каждого класса, nan для отсутствующих)
    """
    mask = recalled_mask(records, k)
    hits = np.zeros(num_classes)
    totals = np.zeros(num_classes)
    for record, recalled in zip(records, mask):
        totals[record.gt_label] += 1
        hits[record.gt_label] += float(recalled)

    per_class = [float(hits[c] / totals[c]) if totals[c] > 0 else math.nan for c in range(num_classes)]
    present = [value for value in per_class if not math.isnan(value)]
    mean = float(sum(present) / len(present)) if present else 0.0
    return mean, per_class


def group_split(frequencies: ClassFrequencies,
                sizes: Optional[Tuple[int, int, int]] = None) -> GroupSplit:
    """
    Классы по убыванию n_i (при равенстве по индексу), разрезанные на три группы

    По умолчанию: ⌈C/3⌉, ⌈(C−⌈C/3⌉)/2⌉, остаток; для C=50: (16, 17, 17).
    """
    num_classes = frequencies.num_classes
    if sizes is None:
        if num_classes in FIXED_GROUP_SIZES:
            sizes = FIXED_GROUP_SIZES[num_classes]
        else:
            head = math.ceil(num_classes / 3)
            body = math.ceil((num_classes - head) / 2)
            sizes = (head, body, num_classes - head - body)
    if sum(sizes) != num_classes or min(sizes) < 0:
        raise DataValidationError(f"Размеры групп {tuple(sizes)} не покрывают {num_classes} классов")

    order = sorted(range(num_classes), key=lambda c: (-frequencies.counts[c], c))
    head_size, body_size, _ = sizes
    return GroupSplit(
        head=tuple(order[:head_size]),
        body=tuple(order[head_size:head_size + body_size]),
        tail=tuple(order[head_size + body_size:]),
    )


def group_mean_recall(per_class: Sequence[float], split: GroupSplit) -> Dict[str, float]:
    """Макро-среднее внутри каждой группы (отсутствующие классы пропускаются)"""
    result = {}
    for name, members in split.groups().items():
        values = [per_class[c] for c in members if not math.isnan(per_class[c])]
        result[name] = float(sum(values) / len(values)) if values else math.nan
    return result
