"""
Модуль конфигурации процесса.
Читает настройки окружения (.env) для логирования и путей вывода.
"""

import os
import logging
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

APP_NAME = "fgpl-desk"
APP_VERSION = "1.0.0"

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Config:
    """Настройки процесса, не влияющие на результаты экспериментов"""

    def __init__(self):
        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
        self.LOG_FILE = os.getenv("LOG_FILE", "")
        self.OUTPUT_DIR = os.getenv("OUTPUT_DIR", "runs")
        self.DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "0"))

    def validate_config(self) -> bool:
        """Проверка корректности настроек"""
        if self.LOG_LEVEL not in VALID_LOG_LEVELS:
            logger.error(f"Неизвестный уровень логирования: {self.LOG_LEVEL}")
            return False
        if self.DEFAULT_SEED < 0:
            logger.error("DEFAULT_SEED должен быть неотрицательным")
            return False
        if not self.OUTPUT_DIR.strip():
            logger.error("OUTPUT_DIR не может быть пустым")
            return False
        return True
