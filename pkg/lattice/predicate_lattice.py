"""
Решетка предикатов: корреляции s_ij из смещенных предсказаний базовой модели.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from dataset.samples import ClassFrequencies, TripletSample, stack_samples
from model.classifier import Classifier, predict_arrays
from utils.errors import DataValidationError, DimensionMismatchError

logger = logging.getLogger(__name__)

DEFAULT_NUM_NEIGHBORS = 5


@dataclass(frozen=True)
class ConfusionCounts:
    """counts[i, j]: примеры с меткой i, предсказанные как j"""
    counts: np.ndarray

    @property
    def num_classes(self) -> int:
        return int(self.counts.shape[0])


@dataclass(frozen=True)
class PredicateLattice:
    """
    Нормированные корреляции предикатов

    s: C×C, строки суммируются в 1 для классов с примерами;
    n: частоты классов; neighbors: V_i, до M самых коррелированных классов.
    """
    s: np.ndarray
    n: ClassFrequencies
    neighbors: Tuple[Tuple[int, ...], ...]
    num_neighbors: int

    @property
    def num_classes(self) -> int:
        return int(self.s.shape[0])

    def present(self) -> np.ndarray:
        """Маска классов, у которых есть хотя бы один пример"""
        return self.n.as_array() > 0

    def neighbor_matrix(self) -> np.ndarray:
        """V_i в виде матрицы C×min(M, C-1)"""
        width = min(self.num_neighbors, self.num_classes - 1)
        return np.asarray(self.neighbors, dtype=np.int64).reshape(self.num_classes, width)


def confusion_from_predictions(labels: np.ndarray, predictions: np.ndarray,
                               num_classes: int) -> ConfusionCounts:
    """Единый путь подсчета матрицы ошибок (решетка и оценка)"""
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (labels, predictions), 1)
    return ConfusionCounts(counts)


def collect_biased_predictions(baseline: Classifier,
                               train_samples: Sequence[TripletSample]) -> ConfusionCounts:
    """
    Top-1 предсказания базовой модели на всем обучающем корпусе

    Args:
        baseline: Модель, обученная обычной кросс-энтропией
        train_samples: Обучающий корпус (все контексты)

    Returns:
        ConfusionCounts
    """
    arrays = stack_samples(train_samples, baseline.feature_dim)
    if len(arrays) and arrays.labels.max() >= baseline.num_classes:
        raise DimensionMismatchError("C", baseline.num_classes, int(arrays.labels.max()) + 1)
    predicted, _ = predict_arrays(baseline, arrays)
    confusion = confusion_from_predictions(arrays.labels, predicted, baseline.num_classes)
    accuracy = float(np.trace(confusion.counts)) / max(len(arrays), 1)
    logger.info(f"Смещенные предсказания собраны: {len(arrays)} примеров, точность {accuracy:.4f}")
    return confusion


def row_neighbors(row: np.ndarray, i: int, width: int) -> Tuple[int, ...]:
    """Первые width столбцов строки по убыванию значения, при равенстве меньший индекс; i исключен"""
    others = [j for j in range(row.shape[0]) if j != i]
    others.sort(key=lambda j: (-row[j], j))
    return tuple(others[:width])


def neighbor_sets(s: np.ndarray, num_neighbors: int) -> Tuple[Tuple[int, ...], ...]:
    """V_i для всех классов: до M соседей"""
    num_classes = s.shape[0]
    width = min(num_neighbors, num_classes - 1)
    return tuple(row_neighbors(s[i], i, width) for i in range(num_classes))


def normalize_confusion(counts: ConfusionCounts, n: ClassFrequencies,
                        num_neighbors: int = DEFAULT_NUM_NEIGHBORS,
                        allow_empty_rows: bool = False) -> PredicateLattice:
    """
    s_ij = counts(i, j) / n_i и множества соседей

    Args:
        counts: Матрица ошибок
        n: Частоты классов той же выборки
        num_neighbors: M
        allow_empty_rows: Оставлять нулевые строки для отсутствующих классов
                          (оценка на тестовой выборке)
    """
    if num_neighbors < 1:
        raise DataValidationError(f"M должно быть положительным, получено {num_neighbors}")
    if counts.num_classes != n.num_classes:
        raise DimensionMismatchError("C", counts.num_classes, n.num_classes)
    if not allow_empty_rows:
        n.require_positive()

    row_sums = counts.counts.sum(axis=1)
    frequencies = np.asarray(n.counts, dtype=np.int64)
    if not np.array_equal(row_sums, frequencies):
        raise DataValidationError("Суммы строк матрицы ошибок не совпадают с частотами классов")

    denominators = np.where(frequencies > 0, frequencies, 1).astype(np.float64)
    s = counts.counts.astype(np.float64) / denominators[:, None]
    return PredicateLattice(s=s, n=n, neighbors=neighbor_sets(s, num_neighbors),
                            num_neighbors=num_neighbors)


def correlation_ratio(lattice: PredicateLattice, i: int, j: int) -> float:
    """
    φ_ij = s_ij / s_ii

    При s_ii = 0 и s_ij > 0 возвращается +inf (класс i никогда не распознается),
    при s_ij = 0 ноль.
    """
    if i == j:
        raise DataValidationError("correlation_ratio определено только для i != j")
    size = lattice.num_classes
    if not (0 <= i < size and 0 <= j < size):
        raise DataValidationError(f"Классы ({i}, {j}) вне диапазона [0, {size})")
    s_ij = float(lattice.s[i, j])
    s_ii = float(lattice.s[i, i])
    if s_ij == 0.0:
        return 0.0
    if s_ii == 0.0:
        return math.inf
    return s_ij / s_ii


def correlation_ratio_matrix(lattice: PredicateLattice) -> np.ndarray:
    """φ для всех пар; на диагонали 1"""
    s = lattice.s
    diagonal = np.diag(s)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(diagonal > 0, s / np.where(diagonal > 0, diagonal, 1.0), np.inf)
    ratio = np.where(s == 0.0, 0.0, ratio)
    np.fill_diagonal(ratio, 1.0)
    return ratio


def strongly_correlated_pairs(lattice: PredicateLattice, xi: float) -> List[Tuple[int, int]]:
    """Пары (i, j), для которых φ_ij > ξ"""
    ratio = correlation_ratio_matrix(lattice)
    np.fill_diagonal(ratio, -np.inf)
    rows, cols = np.nonzero(ratio > xi)
    return [(int(i), int(j)) for i, j in zip(rows, cols)]


def synthetic_lattice(num_classes: int, seed: int,
                      num_neighbors: int = DEFAULT_NUM_NEIGHBORS,
                      zipf_exponent: float = 1.5, total: int = 20000) -> PredicateLattice:
    """
    Решетка без обучения: частоты по Ципфу и случайная матрица ошибок

    Нужна для проверки градиентов и тестов потерь.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    weights = np.arange(1, num_classes + 1, dtype=np.float64) ** (-zipf_exponent)
    frequencies = np.maximum(1, np.round(total * weights / weights.sum())).astype(np.int64)
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    for i in range(num_classes):
        concentration = np.full(num_classes, 0.3)
        concentration[i] = 3.0
        counts[i] = rng.multinomial(int(frequencies[i]), rng.dirichlet(concentration))
    n = ClassFrequencies(tuple(int(c) for c in frequencies))
    return normalize_confusion(ConfusionCounts(counts), n, num_neighbors)
