"""
Сборка отчета об оценке модели на тестовой выборке.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from dataset.samples import ClassFrequencies, TripletSample
from metrics.discrimination import RingRecord, confusion_prime, dp_at_k, prediction_distribution
from metrics.recall import GroupSplit, group_mean_recall, group_split, mean_recall_at_k, recall_at_k
from model.classifier import Classifier, predict_corpus

logger = logging.getLogger(__name__)

NOMINAL_RECALL_KS = (20, 50, 100)
NOMINAL_SCENE_SIZE = 50


class EvalConfig(BaseModel):
    """Параметры оценки"""

    model_config = ConfigDict(extra="forbid")

    nominal_ks: List[int] = Field(default_factory=lambda: list(NOMINAL_RECALL_KS))
    recall_ks: Optional[List[int]] = None
    dp_ks: List[int] = Field(default_factory=lambda: [1, 5, 10])
    ring_neighbors: int = Field(3, ge=1)
    group_sizes: Optional[Tuple[int, int, int]] = None

    @field_validator("nominal_ks", "dp_ks")
    @classmethod
    def _positive(cls, values: List[int]) -> List[int]:
        if not values or min(values) < 1:
            raise ValueError("значения K должны быть положительными")
        return values

    @field_validator("recall_ks")
    @classmethod
    def _positive_optional(cls, values: Optional[List[int]]) -> Optional[List[int]]:
        if values is not None and (not values or min(values) < 1):
            raise ValueError("значения K должны быть положительными")
        return values


def scaled_recall_ks(scene_size: int, nominal_ks: Sequence[int] = NOMINAL_RECALL_KS) -> Dict[int, int]:
    """Номинальные K, пересчитанные на размер сцены: max(1, round(k·G/50))"""
    return {k: max(1, int(round(k * scene_size / NOMINAL_SCENE_SIZE))) for k in nominal_ks}


def resolve_recall_ks(config: EvalConfig, scene_size: int) -> Dict[str, int]:
    """Подписи метрик -> фактический K"""
    if config.recall_ks is not None:
        return {str(k): k for k in config.recall_ks}
    return {str(label): k for label, k in scaled_recall_ks(scene_size, config.nominal_ks).items()}


@dataclass
class EvalReport:
    """Все метрики одной модели на одной выборке"""
    k_labels: Dict[str, int]
    r_at_k: Dict[str, float]
    mr_at_k: Dict[str, float]
    per_class_recall: Dict[str, List[float]]
    group_mr: Dict[str, Dict[str, float]]
    dp_at_k: Dict[int, float]
    confusion_prime: np.ndarray
    present: List[int]
    split: GroupSplit
    rings: List[RingRecord] = field(default_factory=list)
    num_samples: int = 0

    def to_dict(self) -> Dict[str, Any]:
        """Структура для JSON-отчета (nan -> None)"""
        def clean(value):
            return None if isinstance(value, float) and math.isnan(value) else value

        return {
            "num_samples": self.num_samples,
            "k_labels": self.k_labels,
            "r_at_k": self.r_at_k,
            "mr_at_k": self.mr_at_k,
            "per_class_recall": {k: [clean(v) for v in values] for k, values in self.per_class_recall.items()},
            "group_mr": {k: {g: clean(v) for g, v in groups.items()} for k, groups in self.group_mr.items()},
            "group_split": {name: list(members) for name, members in self.split.groups().items()},
            "dp_at_k": {str(k): v for k, v in self.dp_at_k.items()},
            "present_classes": self.present,
            "confusion_prime": self.confusion_prime.tolist(),
        }

    def metric_rows(self) -> List[Dict[str, Any]]:
        """Плоская таблица: одна строка на метрику"""
        rows = []
        for label, k in self.k_labels.items():
            rows.append({"metric": "R@K", "label": label, "k": k, "value": self.r_at_k[label]})
            rows.append({"metric": "mR@K", "label": label, "k": k, "value": self.mr_at_k[label]})
            for group, value in self.group_mr[label].items():
                rows.append({"metric": f"mR@K.{group}", "label": label, "k": k, "value": value})
        for k, value in self.dp_at_k.items():
            rows.append({"metric": "DP@K", "label": str(k), "k": k, "value": value})
        return rows

    def ring_rows(self) -> List[Dict[str, Any]]:
        return [
            {"gt_class": ring.gt_class, "slice_label": label, "proportion": proportion}
            for ring in self.rings
            for label, proportion in ring.slices
        ]


def evaluate(model: Classifier, samples: Sequence[TripletSample], train_frequencies: ClassFrequencies,
             config: Optional[EvalConfig] = None, scene_size: int = 8) -> EvalReport:
    """
    Оценка модели

    Args:
        model: Классификатор
        samples: Тестовая выборка
        train_frequencies: Частоты обучающей выборки (для групп head/body/tail)
        config: Параметры оценки
        scene_size: G, для пересчета K

    Returns:
        EvalReport
    """
    config = config or EvalConfig()
    num_classes = model.num_classes
    records = predict_corpus(model, samples)
    k_labels = resolve_recall_ks(config, scene_size)
    split = group_split(train_frequencies, config.group_sizes)

    r_at_k, mr_at_k, per_class, group_mr = {}, {}, {}, {}
    for label, k in k_labels.items():
        r_at_k[label] = recall_at_k(records, k)
        mr_at_k[label], per_class[label] = mean_recall_at_k(records, k, num_classes)
        group_mr[label] = group_mean_recall(per_class[label], split)

    s_prime, present_mask = confusion_prime(records, num_classes)
    dp = {}
    for k in config.dp_ks:
        if k > num_classes - 1:
            logger.warning(f"DP@{k} пропущен: k больше C-1={num_classes - 1}")
            continue
        dp[k] = dp_at_k(s_prime, k, present_mask)

    present = [int(c) for c in np.nonzero(present_mask)[0]]
    ring_k = min(config.ring_neighbors, num_classes - 1)
    rings = [prediction_distribution(s_prime, c, ring_k) for c in present] if ring_k >= 1 else []

    logger.info(
        "Оценка: " + ", ".join(f"mR@{label}={value:.4f}" for label, value in mr_at_k.items())
        + "; " + ", ".join(f"DP@{k}={value:.2f}%" for k, value in dp.items())
    )
    return EvalReport(
        k_labels=k_labels,
        r_at_k=r_at_k,
        mr_at_k=mr_at_k,
        per_class_recall=per_class,
        group_mr=group_mr,
        dp_at_k=dp,
        confusion_prime=s_prime,
        present=present,
        split=split,
        rings=rings,
        num_samples=len(records),
    )
