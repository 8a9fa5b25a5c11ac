"""
Генератор синтетических корпусов с длинным хвостом.
Частоты предикатов следуют закону Ципфа, часть пар предикатов намеренно сближена.
"""

import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dataset.samples import CorpusHeader, TripletSample, class_frequencies
from utils.errors import DataValidationError

logger = logging.getLogger(__name__)

# Независимые потоки случайности внутри одного seed
_STREAM_MEANS = 0
_STREAM_CONTEXTS = 1
_STREAM_LABELS = 2
_STREAM_SPLIT = 3
_STREAM_SCENES = 4


class GeneratorSpec(BaseModel):
    """Параметры синтетического корпуса"""

    model_config = ConfigDict(extra="forbid")

    num_classes: int = Field(50, ge=1)
    num_objects: int = Field(30, ge=1)
    feature_dim: int = Field(16, ge=1)
    num_scenes: int = Field(3000, ge=1)
    scene_size: int = Field(8, ge=1)
    zipf_exponent: float = Field(1.5, gt=0)
    confusable_pairs: List[Tuple[int, int, float]] = Field(default_factory=list)
    class_separation: float = Field(0.6, gt=0)
    contexts_per_class: int = Field(2, ge=1)
    context_noise: float = Field(0.1, ge=0, le=1)
    train_fraction: float = Field(0.7, gt=0, lt=1)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_pairs(self):
        problems = []
        for index, (first, second, overlap) in enumerate(self.confusable_pairs):
            if first == second:
                problems.append(f"пара {index}: одинаковые классы {first}")
            if not (0 <= first < self.num_classes and 0 <= second < self.num_classes):
                problems.append(f"пара {index}: классы ({first}, {second}) вне [0, {self.num_classes})")
            if not 0.0 <= overlap <= 1.0:
                problems.append(f"пара {index}: overlap={overlap} вне [0, 1]")
        if self.num_scenes * self.scene_size < self.num_classes:
            problems.append("корпус меньше числа классов: каждому классу нужен хотя бы один пример")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @property
    def header(self) -> CorpusHeader:
        return CorpusHeader(self.num_classes, self.num_objects, self.feature_dim)


# (редкий a, частый b, overlap)
DEFAULT_CONFUSABLE_PAIRS = [
    (12, 0, 0.8),
    (20, 1, 0.8),
    (27, 2, 0.85),
    (33, 3, 0.8),
    (38, 5, 0.9),
    (41, 7, 0.8),
    (45, 9, 0.85),
    (48, 11, 0.9),
]


def default_generator_spec(seed: int = 0) -> GeneratorSpec:
    """Корпус по умолчанию: 50 предикатов, Ципф 1.5, восемь пар хвост-голова"""
    return GeneratorSpec(confusable_pairs=list(DEFAULT_CONFUSABLE_PAIRS), seed=seed)


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *stream]))


def zipf_probabilities(num_classes: int, exponent: float) -> np.ndarray:
    """Вероятности классов по рангу: класс 0 самый частый"""
    weights = np.arange(1, num_classes + 1, dtype=np.float64) ** (-exponent)
    return weights / weights.sum()


def allocate_label_counts(total: int, probabilities: np.ndarray) -> np.ndarray:
    """
    Квоты меток методом наибольших остатков

    Каждый класс получает хотя бы один пример; излишек снимается с самого частого.
    Результат не возрастает по рангу.
    """
    num_classes = probabilities.shape[0]
    quotas = total * probabilities
    counts = np.floor(quotas).astype(np.int64)
    remainder = int(total - counts.sum())
    order = np.lexsort((np.arange(num_classes), -(quotas - counts)))
    counts[order[:remainder]] += 1

    counts[counts == 0] = 1
    excess = int(counts.sum() - total)
    counts[0] -= excess
    if counts[0] < 1:
        raise DataValidationError(f"Недостаточно примеров ({total}) для {num_classes} классов")
    return counts


def class_means(spec: GeneratorSpec) -> np.ndarray:
    """
    Средние классов (C×D) с учетом сближенных пар

    Средние пары (a, b) сдвигаются к их середине на долю overlap;
    при overlap=1 распределения признаков совпадают.
    """
    rng = _rng(spec.seed, _STREAM_MEANS)
    means = rng.normal(0.0, spec.class_separation, size=(spec.num_classes, spec.feature_dim))
    for first, second, overlap in spec.confusable_pairs:
        middle = 0.5 * (means[first] + means[second])
        means[first] = means[first] + overlap * (middle - means[first])
        means[second] = means[second] + overlap * (middle - means[second])
    return means


def class_contexts(spec: GeneratorSpec) -> List[np.ndarray]:
    """Предпочтительные контексты (subject * O + object) для каждого класса"""
    rng = _rng(spec.seed, _STREAM_CONTEXTS)
    num_contexts = spec.num_objects * spec.num_objects
    per_class = min(spec.contexts_per_class, num_contexts)
    contexts = [
        np.sort(rng.choice(num_contexts, size=per_class, replace=False))
        for _ in range(spec.num_classes)
    ]
    # Сближенные предикаты описывают одни и те же пары субъект-объект
    for first, second, _ in spec.confusable_pairs:
        contexts[first] = contexts[second].copy()
    return contexts


def _scene_samples(spec: GeneratorSpec, scene_id: int, labels: np.ndarray,
                   means: np.ndarray, contexts: List[np.ndarray]) -> List[TripletSample]:
    """Примеры одной сцены; зависят только от (seed, scene_id) и меток"""
    rng = _rng(spec.seed, _STREAM_SCENES, scene_id)
    size = labels.shape[0]
    num_contexts = spec.num_objects * spec.num_objects

    use_noise = rng.random(size) < spec.context_noise
    noise_contexts = rng.integers(0, num_contexts, size=size)
    picks = rng.random(size)
    features = means[labels] + rng.standard_normal((size, spec.feature_dim))

    samples = []
    for k in range(size):
        label = int(labels[k])
        if use_noise[k]:
            context = int(noise_contexts[k])
        else:
            options = contexts[label]
            context = int(options[int(picks[k] * options.shape[0])])
        samples.append(TripletSample(
            scene_id=scene_id,
            subject_id=context // spec.num_objects,
            object_id=context % spec.num_objects,
            features=tuple(float(x) for x in features[k]),
            label=label,
        ))
    return samples


def generate_corpus(spec: GeneratorSpec) -> Tuple[List[TripletSample], List[TripletSample]]:
    """
    Генерация обучающего и тестового корпусов

    Args:
        spec: Параметры генерации

    Returns:
        (train, test): списки примеров, упорядоченные по scene_id
    """
    total = spec.num_scenes * spec.scene_size
    counts = allocate_label_counts(total, zipf_probabilities(spec.num_classes, spec.zipf_exponent))
    labels = np.repeat(np.arange(spec.num_classes), counts)
    labels = _rng(spec.seed, _STREAM_LABELS).permutation(labels)

    means = class_means(spec)
    contexts = class_contexts(spec)

    scene_order = _rng(spec.seed, _STREAM_SPLIT).permutation(spec.num_scenes)
    num_train = int(round(spec.train_fraction * spec.num_scenes))
    if spec.num_scenes > 1:
        num_train = min(max(num_train, 1), spec.num_scenes - 1)
    train_scenes = set(int(s) for s in scene_order[:num_train])

    train, test = [], []
    for scene_id in range(spec.num_scenes):
        chunk = labels[scene_id * spec.scene_size:(scene_id + 1) * spec.scene_size]
        scene = _scene_samples(spec, scene_id, chunk, means, contexts)
        (train if scene_id in train_scenes else test).extend(scene)

    missing = class_frequencies(train, spec.num_classes).missing_classes()
    if missing:
        raise DataValidationError(
            f"В обучающей части нет классов {missing}; увеличьте num_scenes или уменьшите zipf_exponent"
        )

    logger.info(
        f"Сгенерирован корпус: {len(train)} обучающих и {len(test)} тестовых примеров, "
        f"C={spec.num_classes}, seed={spec.seed}"
    )
    return train, test
