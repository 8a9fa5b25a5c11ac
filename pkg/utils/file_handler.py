"""
Модуль для работы с файлами артефактов.
Создает директории, считает хеши содержимого и атомарно записывает текст.
"""

import os
import hashlib
import logging
from typing import Dict, Iterable

from utils.errors import ArtifactIOError

logger = logging.getLogger(__name__)


def ensure_dir(path: str) -> str:
    """
    Создание директории, если ее нет

    Args:
        path: Путь к директории

    Returns:
        Тот же путь
    """
    try:
        if path and not os.path.exists(path):
            os.makedirs(path)
            logger.info(f"Создана директория: {path}")
    except OSError as e:
        raise ArtifactIOError(path, f"не удалось создать директорию ({e})")
    return path


def require_file(path: str) -> str:
    """Проверка, что входной файл существует"""
    if not os.path.isfile(path):
        raise ArtifactIOError(path, "файл не найден")
    return path


def write_text_atomic(path: str, text: str):
    """
    Запись текста через временный файл

    Args:
        path: Итоговый путь
        text: Содержимое (UTF-8, переводы строк '\\n')
    """
    ensure_dir(os.path.dirname(path))
    temp_path = path + ".tmp"
    try:
        with open(temp_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(temp_path, path)
    except OSError as e:
        raise ArtifactIOError(path, f"ошибка записи ({e})")
    logger.debug(f"Файл записан: {path}")


def read_text(path: str) -> str:
    """Чтение текстового артефакта"""
    require_file(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ArtifactIOError(path, f"ошибка чтения ({e})")


def file_sha256(path: str) -> str:
    """Хеш содержимого файла (hex)"""
    require_file(path)
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as e:
        raise ArtifactIOError(path, f"ошибка чтения ({e})")
    return digest.hexdigest()


def hash_inputs(paths: Iterable[str]) -> Dict[str, str]:
    """Хеши набора входных файлов по базовому имени"""
    return {os.path.basename(p): file_sha256(p) for p in sorted(paths)}
