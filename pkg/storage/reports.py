"""
Запись отчетов: JSON с отсортированными ключами и плоские таблицы pandas.
"""

import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd

from utils.config import APP_NAME, APP_VERSION
from utils.file_handler import file_sha256, write_text_atomic

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


class ReportStore:
    """Класс для записи отчетов и манифестов"""

    @staticmethod
    def write_json(path: str, payload: Dict[str, Any]):
        """JSON с фиксированным порядком ключей"""
        text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
        write_text_atomic(path, text + "\n")
        logger.info(f"Отчет записан: {path}")

    @staticmethod
    def write_table(path: str, rows: List[Dict[str, Any]], columns: Optional[List[str]] = None):
        """Плоская CSV-таблица"""
        frame = pd.DataFrame(rows, columns=columns)
        text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        write_text_atomic(path, text)
        logger.info(f"Таблица записана: {path} ({len(frame)} строк)")

    @staticmethod
    def render_table(rows: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
        """Текстовое представление таблицы для консоли"""
        frame = pd.DataFrame(rows, columns=columns)
        return frame.to_string(index=False, float_format=lambda x: f"{x:.4f}")

    @staticmethod
    def write_manifest(out_dir: str, command: str, config: Dict[str, Any],
                       inputs: Dict[str, str], outputs: Iterable[str]) -> str:
        """
        Манифест запуска: версия, разрешенная конфигурация, хеши входов и выходов

        Returns:
            Путь к манифесту
        """
        path = os.path.join(out_dir, f"{command.replace('-', '_')}_manifest.json")
        payload = {
            "tool": APP_NAME,
            "version": APP_VERSION,
            "command": command,
            "config": config,
            "inputs": inputs,
            "outputs": {os.path.basename(p): file_sha256(p) for p in sorted(outputs)},
        }
        ReportStore.write_json(path, payload)
        return path
