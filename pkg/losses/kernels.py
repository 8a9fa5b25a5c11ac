"""
Замкнутые формулы потерь и градиентов по логитам.
CE, перевзвешенный softmax (CDL) и маржинальная потеря по соседям (EDL).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from dataset.samples import ClassFrequencies
from lattice.predicate_lattice import (
    PredicateLattice,
    correlation_ratio,
    correlation_ratio_matrix,
    neighbor_sets,
)
from losses.config import LossConfig
from model.classifier import softmax
from utils.errors import ConfigurationError, DataValidationError, NumericError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossOutput:
    """Значение потери и ∂loss/∂η"""
    value: float
    grad: np.ndarray


def _check_logits(logits: np.ndarray):
    if not np.all(np.isfinite(logits)):
        raise NumericError("Логиты содержат нечисловые значения")


def _check_label(label: int, num_classes: int):
    if not 0 <= label < num_classes:
        raise DataValidationError(f"Метка {label} вне диапазона [0, {num_classes})")


# --- веса CDL -----------------------------------------------------------------

def cdl_weight(i: int, j: int, lattice: PredicateLattice, config: LossConfig) -> float:
    """
    Коэффициент w_ij для отрицательного класса j при положительном i

    μ = n_j / n_i, φ = s_ij / s_ii:
      μ ≥ 1, φ > ξ → μ^β;  μ ≥ 1, φ ≤ ξ → 1;
      μ < 1, φ > ξ → 1;    μ < 1, φ ≤ ξ → μ^α.
    Без PC: μ^α при μ > 1, иначе 1. Без RF: 1.
    """
    size = lattice.num_classes
    if not (0 <= i < size and 0 <= j < size):
        raise DataValidationError(f"Классы ({i}, {j}) вне диапазона [0, {size})")
    if not config.cdl_rf or i == j:
        return 1.0

    n_i = lattice.n.counts[i]
    n_j = lattice.n.counts[j]
    if n_i == 0 or n_j == 0:
        raise DataValidationError(f"Нулевая частота класса в паре ({i}, {j})")
    mu = n_j / n_i

    if not config.cdl_pc:
        return mu ** config.alpha if mu > 1 else 1.0

    strong = correlation_ratio(lattice, i, j) > config.xi
    if mu >= 1:
        return mu ** config.beta if strong else 1.0
    return 1.0 if strong else mu ** config.alpha


def cdl_log_weight_matrix(frequencies: ClassFrequencies, lattice: Optional[PredicateLattice],
                          config: LossConfig) -> np.ndarray:
    """
    log w_ij для всех пар (C×C), диагональ нулевая

    Логарифмическая форма не переполняется при больших μ^β.
    """
    num_classes = frequencies.num_classes
    if not config.cdl_rf:
        return np.zeros((num_classes, num_classes))

    n = frequencies.require_positive().as_array()
    log_n = np.log(n)
    log_mu = log_n[None, :] - log_n[:, None]
    mu = n[None, :] / n[:, None]

    if not config.cdl_pc:
        log_weights = np.where(mu > 1, config.alpha * log_mu, 0.0)
    else:
        if lattice is None:
            raise ConfigurationError("Для CDL с учетом корреляций нужна решетка предикатов")
        strong = correlation_ratio_matrix(lattice) > config.xi
        log_weights = np.where(
            mu >= 1,
            np.where(strong, config.beta * log_mu, 0.0),
            np.where(strong, 0.0, config.alpha * log_mu),
        )
    np.fill_diagonal(log_weights, 0.0)
    return log_weights


# --- пакетные ядра ------------------------------------------------------------

def weighted_ce_batch(logits: np.ndarray, labels: np.ndarray,
                      log_weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    −log φ̂_i, φ̂_i = e^{η_i} / Σ_j w_ij e^{η_j}, для пакета B×C

    Returns:
        (значения B, градиенты B×C)
    """
    _check_logits(logits)
    rows = np.arange(logits.shape[0])
    shifted = logits + log_weights[labels]
    peak = np.max(shifted, axis=1, keepdims=True)
    log_norm = peak[:, 0] + np.log(np.sum(np.exp(shifted - peak), axis=1))
    values = log_norm - logits[rows, labels]
    grads = np.exp(shifted - log_norm[:, None])
    grads[rows, labels] -= 1.0
    return values, grads


def edl_batch(logits: np.ndarray, labels: np.ndarray, neighbors: np.ndarray,
              balance: np.ndarray, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    (1/|V_i|) Σ_{j∈V_i} max(0, φ_j − φ_i + δ)·b_ij для пакета

    Args:
        neighbors: C×W, множества V_i одинаковой длины W
        balance: C×C, коэффициенты b_ij (n_j/n_i или 1)
        delta: Граница δ

    Returns:
        (значения B, градиенты по логитам B×C); субградиент в изломе равен 0
    """
    _check_logits(logits)
    width = neighbors.shape[1]
    if width == 0:
        raise ConfigurationError("Пустое множество соседей V_i")

    rows = np.arange(logits.shape[0])
    probs = softmax(logits)
    chosen = neighbors[labels]
    p_label = probs[rows, labels][:, None]
    p_neighbors = np.take_along_axis(probs, chosen, axis=1)

    margins = p_neighbors - p_label + delta
    active = margins > 0
    factors = balance[labels[:, None], chosen]
    values = np.sum(np.where(active, margins * factors, 0.0), axis=1) / width

    coef = np.where(active, factors, 0.0) / width
    grad_probs = np.zeros_like(probs)
    np.put_along_axis(grad_probs, chosen, coef, axis=1)
    grad_probs[rows, labels] = -np.sum(coef, axis=1)
    # Якобиан softmax: ∂φ_k/∂η_m = φ_k(δ_km − φ_m)
    grads = probs * (grad_probs - np.sum(grad_probs * probs, axis=1, keepdims=True))
    return values, grads


def edl_neighbor_matrix(lattice: PredicateLattice, config: LossConfig) -> np.ndarray:
    """V_i из решетки (PC) или все остальные классы (без PC)"""
    num_classes = lattice.num_classes
    if not config.edl_pc:
        return np.asarray(
            [[j for j in range(num_classes) if j != i] for i in range(num_classes)],
            dtype=np.int64,
        ).reshape(num_classes, num_classes - 1)
    if config.num_neighbors == lattice.num_neighbors:
        matrix = lattice.neighbor_matrix()
    else:
        sets = neighbor_sets(lattice.s, config.num_neighbors)
        matrix = np.asarray(sets, dtype=np.int64).reshape(num_classes, -1)
    if matrix.shape[1] == 0:
        raise ConfigurationError("Пустое множество соседей V_i при включенном PC")
    return matrix


def edl_balance_matrix(frequencies: ClassFrequencies, config: LossConfig) -> np.ndarray:
    """b_ij = n_j / n_i (BF) или 1"""
    num_classes = frequencies.num_classes
    if not config.edl_bf:
        return np.ones((num_classes, num_classes))
    n = frequencies.require_positive().as_array()
    return n[None, :] / n[:, None]


# --- операции над одним примером ---------------------------------------------

def _single(logits, label: int, num_classes: int) -> Tuple[np.ndarray, np.ndarray]:
    eta = np.asarray(logits, dtype=np.float64)
    if eta.shape != (num_classes,):
        raise DataValidationError(f"Ожидался вектор логитов длины {num_classes}, получено {eta.shape}")
    _check_label(label, num_classes)
    return eta[None, :], np.asarray([label], dtype=np.int64)


def ce_loss_grad(logits, label: int) -> LossOutput:
    """Обычная кросс-энтропия softmax"""
    eta = np.asarray(logits, dtype=np.float64)
    batch, labels = _single(eta, label, eta.shape[0])
    values, grads = weighted_ce_batch(batch, labels, np.zeros((eta.shape[0], eta.shape[0])))
    return LossOutput(float(values[0]), grads[0])


def cdl_loss_grad(logits, label: int, lattice: PredicateLattice, config: LossConfig) -> LossOutput:
    """Category Discriminating Loss для одного примера"""
    batch, labels = _single(logits, label, lattice.num_classes)
    log_weights = cdl_log_weight_matrix(lattice.n, lattice, config)
    values, grads = weighted_ce_batch(batch, labels, log_weights)
    return LossOutput(float(values[0]), grads[0])


def edl_loss_grad(logits, label: int, lattice: PredicateLattice, config: LossConfig) -> LossOutput:
    """Entity Discriminating Loss для одного примера"""
    batch, labels = _single(logits, label, lattice.num_classes)
    values, grads = edl_batch(
        batch, labels,
        edl_neighbor_matrix(lattice, config),
        edl_balance_matrix(lattice.n, config),
        config.delta,
    )
    return LossOutput(float(values[0]), grads[0])


def fgpl_loss_grad(logits, label: int, lattice: PredicateLattice, config: LossConfig) -> LossOutput:
    """CDL + λ·EDL"""
    cdl = cdl_loss_grad(logits, label, lattice, config)
    edl = edl_loss_grad(logits, label, lattice, config)
    return LossOutput(cdl.value + config.lam * edl.value, cdl.grad + config.lam * edl.grad)
