"""
Пакетный вычислитель потерь для тренера.
Связывает вид потери, гиперпараметры, решетку и частоты классов.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from dataset.samples import ClassFrequencies
from lattice.predicate_lattice import PredicateLattice
from losses.config import LossConfig, LossKind
from losses.kernels import (
    cdl_log_weight_matrix,
    edl_balance_matrix,
    edl_batch,
    edl_neighbor_matrix,
    weighted_ce_batch,
)
from utils.errors import ConfigurationError, DimensionMismatchError

logger = logging.getLogger(__name__)


class LossEvaluator:
    """Потеря и градиенты по логитам для пакета примеров"""

    def __init__(self, kind: LossKind, config: Optional[LossConfig] = None,
                 lattice: Optional[PredicateLattice] = None,
                 frequencies: Optional[ClassFrequencies] = None,
                 num_classes: Optional[int] = None):
        self.kind = LossKind(kind)
        self.config = config or LossConfig()
        self.lattice = lattice

        if self.kind.needs_lattice and lattice is None:
            raise ConfigurationError(f"Для потери {self.kind.value} нужна решетка предикатов")
        if frequencies is None and lattice is not None:
            frequencies = lattice.n
        if self.kind == LossKind.REWEIGHT and frequencies is None:
            raise ConfigurationError("Для REWEIGHT нужны частоты классов")
        self.frequencies = frequencies

        if num_classes is None:
            if frequencies is None:
                raise ConfigurationError("Для CE без частот нужно указать число классов")
            num_classes = frequencies.num_classes
        if frequencies is not None and frequencies.num_classes != num_classes:
            raise DimensionMismatchError("C", num_classes, frequencies.num_classes)
        self.num_classes = num_classes

        self.log_weights = self._build_log_weights()
        self.neighbors = None
        self.balance = None
        if self.kind.uses_edl:
            self.neighbors = edl_neighbor_matrix(lattice, self.config)
            self.balance = edl_balance_matrix(frequencies, self.config)

        logger.info(f"Потеря {self.kind.value} готова: C={self.num_classes}")

    def _build_log_weights(self) -> np.ndarray:
        if self.kind in (LossKind.CE, LossKind.EDL):
            return np.zeros((self.num_classes, self.num_classes))
        if self.kind == LossKind.REWEIGHT:
            seesaw = self.config.model_copy(update={"cdl_pc": False, "cdl_rf": True})
            return cdl_log_weight_matrix(self.frequencies, None, seesaw)
        return cdl_log_weight_matrix(self.frequencies, self.lattice, self.config)

    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Args:
            logits: B×C
            labels: B

        Returns:
            (значения B, градиенты B×C)
        """
        if logits.shape[1] != self.num_classes:
            raise DimensionMismatchError("C", self.num_classes, logits.shape[1])
        values, grads = weighted_ce_batch(logits, labels, self.log_weights)
        if self.kind.uses_edl:
            edl_values, edl_grads = edl_batch(logits, labels, self.neighbors, self.balance,
                                              self.config.delta)
            values = values + self.config.lam * edl_values
            grads = grads + self.config.lam * edl_grads
        return values, grads
