"""
Обработчик команды gen: генерация и сохранение корпусов.
"""

import argparse
import logging
import os
from typing import List

from dataset.generator import generate_corpus
from handlers.common import (
    TEST_CORPUS,
    TRAIN_CORPUS,
    RunConfig,
    add_common_arguments,
    output_dir,
    resolve_run_config,
)
from storage.artifacts import CorpusStore
from storage.reports import ReportStore
from utils.file_handler import ensure_dir
from utils.logger import log_step

logger = logging.getLogger(__name__)


def cmd_gen(config: RunConfig, out_dir: str) -> List[str]:
    """
    Генерация обучающего и тестового корпусов

    Returns:
        Пути к записанным корпусам
    """
    ensure_dir(out_dir)
    spec = config.generator
    train, test = generate_corpus(spec)
    train_path = os.path.join(out_dir, TRAIN_CORPUS)
    test_path = os.path.join(out_dir, TEST_CORPUS)
    CorpusStore.save_corpus(train, train_path, spec.header)
    CorpusStore.save_corpus(test, test_path, spec.header)
    ReportStore.write_manifest(out_dir, "gen", config.dump(), {}, [train_path, test_path])
    return [train_path, test_path]


def gen_handler(args: argparse.Namespace) -> int:
    """Команда gen"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("gen", "start", f"out={out_dir}, seed={config.generator.seed}")
    paths = cmd_gen(config, out_dir)
    log_step("gen", "done", ", ".join(paths))
    return 0


def setup_generation_handlers(subparsers):
    """Регистрация команды gen"""
    parser = subparsers.add_parser("gen", help="сгенерировать синтетический корпус")
    add_common_arguments(parser)
    parser.set_defaults(handler=gen_handler)
