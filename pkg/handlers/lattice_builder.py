"""
Обработчик команды build-lattice: построение решетки предикатов по базовой модели.
"""

import argparse
import logging
import os

from dataset.samples import class_frequencies
from handlers.common import (
    LATTICE_FILE,
    TRAIN_CORPUS,
    RunConfig,
    add_common_arguments,
    load_model,
    load_training_corpus,
    model_file,
    output_dir,
    resolve_run_config,
)
from lattice.predicate_lattice import collect_biased_predictions, normalize_confusion, strongly_correlated_pairs
from losses.config import LossKind
from storage.artifacts import LatticeStore
from storage.reports import ReportStore
from utils.file_handler import hash_inputs
from utils.logger import log_step

logger = logging.getLogger(__name__)


def cmd_build_lattice(config: RunConfig, out_dir: str) -> str:
    """
    Контекстные ассоциации -> смещенные предсказания -> ассоциации предикатов

    Returns:
        Путь к файлу решетки
    """
    header, samples = load_training_corpus(out_dir)
    baseline_path = os.path.join(out_dir, model_file(LossKind.CE))
    baseline = load_model(baseline_path)
    baseline.check_compatible(header)

    counts = collect_biased_predictions(baseline, samples)
    frequencies = class_frequencies(samples, header.num_classes)
    lattice = normalize_confusion(counts, frequencies, config.loss.num_neighbors)
    strong = strongly_correlated_pairs(lattice, config.loss.xi)
    logger.info(f"Сильно коррелированных пар (φ > ξ={config.loss.xi}): {len(strong)}")

    path = os.path.join(out_dir, LATTICE_FILE)
    LatticeStore.save_lattice(lattice, path)
    inputs = hash_inputs([os.path.join(out_dir, TRAIN_CORPUS), baseline_path])
    ReportStore.write_manifest(out_dir, "build-lattice", config.dump(), inputs, [path])
    return path


def build_lattice_handler(args: argparse.Namespace) -> int:
    """Команда build-lattice"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("build-lattice", "start", f"M={config.loss.num_neighbors}")
    path = cmd_build_lattice(config, out_dir)
    log_step("build-lattice", "done", path)
    return 0


def setup_lattice_handlers(subparsers):
    """Регистрация команды build-lattice"""
    parser = subparsers.add_parser("build-lattice", help="построить решетку предикатов")
    add_common_arguments(parser)
    parser.set_defaults(handler=build_lattice_handler)
