"""
Мини-пакетный SGD для линейного классификатора с подключаемой функцией потерь.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dataset.samples import TripletSample, stack_samples
from losses.config import LossKind
from losses.evaluator import LossEvaluator
from model.classifier import Classifier, batch_logits, init_classifier
from utils.errors import ConfigurationError, DataValidationError, DimensionMismatchError, NumericError

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    """Параметры обучения: lr 0.01 и пакет 16 как у базовых моделей"""

    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(0.01, gt=0)
    batch_size: int = Field(16, ge=1)
    epochs: int = Field(20, ge=0)
    seed: int = Field(0, ge=0)
    loss_kind: LossKind = LossKind.CE


def train(samples: Sequence[TripletSample], config: TrainConfig, loss: LossEvaluator,
          prior_log: Optional[np.ndarray] = None, feature_dim: Optional[int] = None) -> Classifier:
    """
    Обучение классификатора

    Args:
        samples: Обучающий корпус
        config: Параметры SGD
        loss: Вычислитель потерь; его вид должен совпадать с config.loss_kind
        prior_log: Логарифмы частотной модели O×O×C (не обучаются)
        feature_dim: D, если корпус пуст

    Returns:
        Обученный Classifier
    """
    if loss.kind != config.loss_kind:
        raise ConfigurationError(
            f"Вид потери {loss.kind.value} не совпадает с конфигурацией {config.loss_kind.value}"
        )
    if loss.kind.needs_lattice and loss.lattice is None:
        raise ConfigurationError(f"Для потери {loss.kind.value} нужна решетка предикатов")

    arrays = stack_samples(samples, feature_dim)
    if len(arrays) == 0 and feature_dim is None:
        raise DataValidationError("Пустой обучающий корпус без заданной размерности признаков")
    dim = arrays.features.shape[1] if len(arrays) else feature_dim
    num_classes = loss.num_classes
    if len(arrays) and arrays.labels.max() >= num_classes:
        raise DimensionMismatchError("C", num_classes, int(arrays.labels.max()) + 1)
    if prior_log is not None and prior_log.shape[2] != num_classes:
        raise DimensionMismatchError("C", num_classes, prior_log.shape[2])

    model = init_classifier(num_classes, dim, config.seed, prior_log)
    shuffle_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1]))
    total = len(arrays)

    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(total)
        epoch_loss = 0.0
        for start in range(0, total, config.batch_size):
            index = order[start:start + config.batch_size]
            features = arrays.features[index]
            logits = batch_logits(model, features, arrays.subjects[index], arrays.objects[index])
            values, grads = loss(logits, arrays.labels[index])

            grads = grads / index.shape[0]
            model.weights -= config.learning_rate * (grads.T @ features)
            model.bias -= config.learning_rate * grads.sum(axis=0)
            epoch_loss += float(values.sum())

        if not (np.all(np.isfinite(model.weights)) and np.all(np.isfinite(model.bias))):
            raise NumericError(f"Параметры стали нечисловыми на эпохе {epoch + 1}")
        logger.info(
            f"Эпоха {epoch + 1}/{config.epochs} ({loss.kind.value}): "
            f"средняя потеря {epoch_loss / max(total, 1):.6f}"
        )

    return model
