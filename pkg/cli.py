"""
Командная строка конвейера FGPL.
Собирает argparse-диспетчер из групп обработчиков и запускает выбранную команду.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from handlers.diagnostics import setup_diagnostics_handlers
from handlers.evaluation import setup_evaluation_handlers
from handlers.generation import setup_generation_handlers
from handlers.lattice_builder import setup_lattice_handlers
from handlers.pipeline import setup_pipeline_handlers
from handlers.training import setup_training_handlers
from utils.config import APP_NAME, APP_VERSION, Config
from utils.errors import EXIT_IO, EXIT_OK, EXIT_VALIDATION, ConfigValidationError, PipelineError
from utils.logger import setup_logger


class CommandLineParser(argparse.ArgumentParser):
    """Ошибки разбора флагов как ConfigValidationError"""

    def error(self, message: str):
        raise ConfigValidationError(["argv"], [f"{self.prog}: {message}"])


def build_parser() -> CommandLineParser:
    """Парсер со всеми командами"""
    parser = CommandLineParser(
        prog=APP_NAME,
        description="Fine-grained predicates learning на синтетическом корпусе",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    setup_generation_handlers(subparsers)
    setup_training_handlers(subparsers)
    setup_lattice_handlers(subparsers)
    setup_evaluation_handlers(subparsers)
    setup_pipeline_handlers(subparsers)
    setup_diagnostics_handlers(subparsers)
    return parser


def emit_error(record: dict):
    """Машиночитаемая запись об ошибке в stderr одной строкой"""
    print(json.dumps(record, sort_keys=True, ensure_ascii=False), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Запуск команды

    Returns:
        Код завершения: 0 успех, 2 валидация, 3 ввод-вывод, 4 численная ошибка
    """
    setup_logger()
    logger = logging.getLogger(__name__)

    config = Config()
    if not config.validate_config():
        emit_error({"error": "некорректные настройки окружения", "type": "ConfigError",
                    "exit_code": EXIT_VALIDATION})
        return EXIT_VALIDATION

    try:
        args = build_parser().parse_args(argv)
    except ConfigValidationError as e:
        logger.error(f"Некорректные аргументы командной строки: {e}")
        emit_error(e.to_record())
        return e.exit_code

    try:
        return args.handler(args)
    except PipelineError as e:
        logger.error(f"Команда {args.command} завершилась ошибкой: {e}")
        emit_error(e.to_record())
        return e.exit_code
    except OSError as e:
        logger.error(f"Ошибка ввода-вывода: {e}")
        emit_error({"error": str(e), "type": type(e).__name__, "exit_code": EXIT_IO,
                    "path": getattr(e, "filename", None)})
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main() or EXIT_OK)
