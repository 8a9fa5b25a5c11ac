"""
Разбор заголовков и чисел в текстовых артефактах.
Использует регулярные выражения для строк вида '# C=50 O=30 D=16'.
"""

import math
import re
import logging
from typing import Dict, List, Optional

import numpy as np

from utils.errors import CorpusFormatError

logger = logging.getLogger(__name__)

HEADER_PATTERN = re.compile(r"^#\s*(?P<body>(?:[A-Za-z_]+=\S+\s*)+)$")
FIELD_PATTERN = re.compile(r"([A-Za-z_]+)=(\S+)")
INT_PATTERN = re.compile(r"^[+-]?\d+$")


def format_real(value: float) -> str:
    """17 значащих цифр: точное восстановление float64"""
    return format(float(value), ".17g")


def format_decimal(value: float) -> str:
    """Кратчайшая десятичная запись без экспоненты, восстанавливающая значение"""
    return np.format_float_positional(float(value), unique=True, trim="0")


def parse_header(line: str, required: List[str], line_number: int = 1,
                 path: Optional[str] = None) -> Dict[str, int]:
    """
    Разбор строки заголовка

    Args:
        line: Строка вида '# C=50 O=30 D=16'
        required: Обязательные ключи

    Returns:
        Словарь ключ -> целое
    """
    match = HEADER_PATTERN.match(line.strip())
    if not match:
        raise CorpusFormatError(line_number, f"ожидался заголовок вида '# {'=.. '.join(required)}=..'", path)
    fields = dict(FIELD_PATTERN.findall(match.group("body")))
    values = {}
    for key in required:
        if key not in fields:
            raise CorpusFormatError(line_number, f"в заголовке нет поля {key}", path)
        values[key] = parse_int(fields[key], line_number, key, path)
    return values


def parse_int(text: str, line_number: int, name: str, path: Optional[str] = None) -> int:
    """Целое из текстового поля"""
    text = text.strip()
    if not INT_PATTERN.match(text):
        raise CorpusFormatError(line_number, f"поле {name}: '{text}' не целое число", path)
    return int(text)


def parse_real(text: str, line_number: int, name: str, path: Optional[str] = None) -> float:
    """Конечное вещественное из текстового поля"""
    try:
        value = float(text)
    except ValueError:
        raise CorpusFormatError(line_number, f"поле {name}: '{text.strip()}' не число", path)
    if not math.isfinite(value):
        raise CorpusFormatError(line_number, f"поле {name}: нечисловое значение", path)
    return value


def split_fields(line: str) -> List[str]:
    """Поля строки через запятую; пустая строка -> пустой список"""
    line = line.strip()
    return line.split(",") if line else []
