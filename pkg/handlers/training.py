"""
Обработчики обучения: базовая модель (CE) и модели с FGPL-потерями.
"""

import argparse
import logging
import os

from handlers.common import (
    LATTICE_FILE,
    TRAIN_CORPUS,
    RunConfig,
    add_common_arguments,
    load_lattice,
    load_training_corpus,
    model_file,
    output_dir,
    resolve_run_config,
    train_with_loss,
)
from losses.config import LossKind
from storage.artifacts import ModelStore
from storage.reports import ReportStore
from utils.file_handler import hash_inputs
from utils.logger import log_step

logger = logging.getLogger(__name__)


def cmd_train_baseline(config: RunConfig, out_dir: str) -> str:
    """Базовая модель с обычной кросс-энтропией"""
    header, samples = load_training_corpus(out_dir)
    model = train_with_loss(config, LossKind.CE, header, samples, epochs=config.baseline_epochs)
    path = os.path.join(out_dir, model_file(LossKind.CE))
    ModelStore.save_model(model, path)
    inputs = hash_inputs([os.path.join(out_dir, TRAIN_CORPUS)])
    ReportStore.write_manifest(out_dir, "train-baseline", config.dump(), inputs, [path])
    return path


def cmd_train_fgpl(config: RunConfig, out_dir: str) -> str:
    """Модель с потерей config.fgpl_loss_kind (по умолчанию CDL + λ·EDL)"""
    kind = config.fgpl_loss_kind
    header, samples = load_training_corpus(out_dir)
    input_paths = [os.path.join(out_dir, TRAIN_CORPUS)]
    lattice = None
    if kind.needs_lattice:
        lattice = load_lattice(out_dir)
        input_paths.append(os.path.join(out_dir, LATTICE_FILE))
    model = train_with_loss(config, kind, header, samples, lattice=lattice)
    path = os.path.join(out_dir, model_file(kind))
    ModelStore.save_model(model, path)
    ReportStore.write_manifest(out_dir, f"train-{kind.value.lower()}", config.dump(),
                               hash_inputs(input_paths), [path])
    return path


def train_baseline_handler(args: argparse.Namespace) -> int:
    """Команда train-baseline"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("train-baseline", "start", f"epochs={config.baseline_epochs}")
    path = cmd_train_baseline(config, out_dir)
    log_step("train-baseline", "done", path)
    return 0


def train_fgpl_handler(args: argparse.Namespace) -> int:
    """Команда train-fgpl"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("train-fgpl", "start", f"loss={config.fgpl_loss_kind.value}")
    path = cmd_train_fgpl(config, out_dir)
    log_step("train-fgpl", "done", path)
    return 0


def setup_training_handlers(subparsers):
    """Регистрация команд обучения"""
    baseline = subparsers.add_parser("train-baseline", help="обучить базовую модель (CE)")
    add_common_arguments(baseline)
    baseline.add_argument("--baseline-epochs", type=int, default=None, help="эпохи базовой модели")
    baseline.set_defaults(handler=train_baseline_handler)

    fgpl = subparsers.add_parser("train-fgpl", help="обучить модель с CDL/EDL")
    add_common_arguments(fgpl)
    fgpl.add_argument("--loss-kind", choices=[k.value for k in LossKind], default=None,
                      help="вид потери (по умолчанию CDL_EDL)")
    fgpl.add_argument("--epochs", type=int, default=None, help="число эпох")
    fgpl.add_argument("--lambda", dest="lam", type=float, default=None, help="вес EDL")
    fgpl.set_defaults(handler=train_fgpl_handler)
