"""
Общие части обработчиков команд.
Разрешение конфигурации запуска, имена артефактов и общие флаги.
"""

import argparse
import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from dataset.generator import GeneratorSpec, default_generator_spec
from dataset.samples import CorpusHeader, TripletSample, class_frequencies
from lattice.predicate_lattice import PredicateLattice
from losses.config import LossConfig, LossKind
from losses.evaluator import LossEvaluator
from metrics.report import EvalConfig
from model.classifier import Classifier
from model.prior import build_frequency_prior
from model.trainer import TrainConfig, train
from storage.artifacts import CorpusStore, LatticeStore, ModelStore
from utils.config import Config
from utils.errors import ArtifactIOError, CorpusFormatError, DimensionMismatchError, from_pydantic
from utils.file_handler import read_text, require_file

logger = logging.getLogger(__name__)

TRAIN_CORPUS = "train_corpus.txt"
TEST_CORPUS = "test_corpus.txt"
LATTICE_FILE = "lattice.txt"


def model_file(kind: LossKind) -> str:
    """Имя файла модели для вида потери"""
    return f"model_{LossKind(kind).value.lower()}.txt"


class RunConfig(BaseModel):
    """Полная конфигурация запуска; сериализуется в каждый манифест"""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(0, ge=0)
    generator: GeneratorSpec = Field(default_factory=default_generator_spec)
    train: TrainConfig = Field(default_factory=TrainConfig)
    baseline_epochs: int = Field(20, ge=0)
    fgpl_loss_kind: LossKind = LossKind.CDL_EDL
    loss: LossConfig = Field(default_factory=LossConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    prior_smoothing: float = Field(1.0, gt=0)
    use_prior: bool = True

    def dump(self) -> Dict[str, Any]:
        """Сериализуемое представление (ключ 'lambda' сохраняется как в файлах)"""
        return self.model_dump(mode="json", by_alias=True)

    def with_seed(self, seed: int) -> "RunConfig":
        """Копия с единым seed для генерации и обучения"""
        data = self.dump()
        data["seed"] = seed
        data["generator"]["seed"] = seed
        data["train"]["seed"] = seed
        return validate_run_config(data)


def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def validate_run_config(data: Dict[str, Any]) -> RunConfig:
    """Валидация со сбором всех нарушенных полей"""
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise from_pydantic(e)


def load_config_file(path: str) -> Dict[str, Any]:
    """JSON-файл конфигурации"""
    require_file(path)
    try:
        data = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise CorpusFormatError(e.lineno, f"некорректный JSON ({e.msg})", path)
    if not isinstance(data, dict):
        raise CorpusFormatError(1, "ожидался JSON-объект", path)
    return data


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Конфигурация: значения по умолчанию <- файл --config <- флаги

    Args:
        args: Разобранные аргументы командной строки

    Returns:
        RunConfig
    """
    base = RunConfig().dump()
    default_seed = Config().DEFAULT_SEED
    base["seed"] = base["generator"]["seed"] = base["train"]["seed"] = default_seed

    data = base
    if getattr(args, "config", None):
        data = _deep_merge(base, load_config_file(args.config))

    overrides: Dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        overrides = {"seed": args.seed, "generator": {"seed": args.seed}, "train": {"seed": args.seed}}
    if getattr(args, "epochs", None) is not None:
        overrides = _deep_merge(overrides, {"train": {"epochs": args.epochs}})
    if getattr(args, "baseline_epochs", None) is not None:
        overrides["baseline_epochs"] = args.baseline_epochs
    if getattr(args, "loss_kind", None) is not None:
        overrides["fgpl_loss_kind"] = args.loss_kind
    if getattr(args, "lam", None) is not None:
        overrides = _deep_merge(overrides, {"loss": {"lambda": args.lam}})
    return validate_run_config(_deep_merge(data, overrides))


def output_dir(args: argparse.Namespace) -> str:
    """Каталог артефактов: --out или OUTPUT_DIR"""
    return getattr(args, "out", None) or Config().OUTPUT_DIR


def add_common_arguments(parser: argparse.ArgumentParser):
    """Флаги, общие для всех команд"""
    parser.add_argument("--config", type=str, default=None, help="JSON-файл конфигурации RunConfig")
    parser.add_argument("--seed", type=int, default=None, help="seed генерации и обучения")
    parser.add_argument("--out", type=str, default=None, help="каталог артефактов")


def load_training_corpus(out_dir: str) -> Tuple[CorpusHeader, List[TripletSample]]:
    """Обучающий корпус; все классы обязаны иметь примеры"""
    path = require_file(os.path.join(out_dir, TRAIN_CORPUS))
    header, samples = CorpusStore.load_corpus_with_header(path, require_all_classes=True)
    if header is None:
        raise ArtifactIOError(path, "пустой обучающий корпус")
    return header, samples


def load_lattice(out_dir: str) -> PredicateLattice:
    return LatticeStore.load_lattice(require_file(os.path.join(out_dir, LATTICE_FILE)))


def load_model(path: str) -> Classifier:
    return ModelStore.load_model(require_file(path))


def train_with_loss(config: RunConfig, kind: LossKind, header: CorpusHeader,
                    samples: Sequence[TripletSample], lattice: Optional[PredicateLattice] = None,
                    loss_config: Optional[LossConfig] = None,
                    epochs: Optional[int] = None) -> Classifier:
    """
    Обучение модели с заданной потерей по загруженному корпусу

    Частотная модель пересчитывается из корпуса и остается фиксированной.
    """
    frequencies = class_frequencies(samples, header.num_classes).require_positive()
    if lattice is not None and lattice.num_classes != header.num_classes:
        raise DimensionMismatchError("C", header.num_classes, lattice.num_classes)

    prior_log = None
    if config.use_prior:
        prior = build_frequency_prior(samples, header.num_classes, header.num_objects,
                                      config.prior_smoothing)
        prior_log = prior.log_table()

    update = {"loss_kind": kind}
    if epochs is not None:
        update["epochs"] = epochs
    train_config = config.train.model_copy(update=update)
    loss = LossEvaluator(kind, loss_config or config.loss, lattice=lattice,
                         frequencies=frequencies, num_classes=header.num_classes)
    return train(samples, train_config, loss, prior_log=prior_log, feature_dim=header.feature_dim)
