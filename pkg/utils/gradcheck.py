"""
Проверка аналитических градиентов центральными конечными разностями.
"""

import logging
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
RELATIVE_FLOOR = 1e-6


def finite_difference(func: Callable, x: np.ndarray, step: float = DEFAULT_STEP,
                      vectorized: bool = False) -> np.ndarray:
    """
    Центральная разностная оценка градиента

    Args:
        func: Скалярная функция от вектора; при vectorized=True принимает
              матрицу (2n, n) возмущенных точек и возвращает (2n,) значений
        x: Точка
        step: Шаг h

    Returns:
        Вектор оценок градиента той же длины, что и x
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    eye = np.eye(n) * step
    if vectorized:
        points = np.concatenate([x[None, :] + eye, x[None, :] - eye], axis=0)
        values = np.asarray(func(points), dtype=np.float64)
        return (values[:n] - values[n:]) / (2 * step)

    grad = np.zeros(n)
    for j in range(n):
        fplus = func(x + eye[j])
        fminus = func(x - eye[j])
        grad[j] = (fplus - fminus) / (2 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray,
                   floor: float = RELATIVE_FLOOR) -> float:
    """Максимальное отклонение, отнесенное к масштабу градиента (с нижней границей floor)"""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric)) / scale)
