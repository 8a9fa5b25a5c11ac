"""
Обработчики оценки: eval, compare и ablate.
Сводные таблицы повторяют раскладку таблиц сравнения и абляции.
"""

import argparse
import logging
import math
import os
from collections import Counter
from typing import Any, Dict, List, Optional, Sequence, Tuple

from dataset.samples import CorpusHeader, TripletSample, class_frequencies
from handlers.common import (
    LATTICE_FILE,
    TEST_CORPUS,
    TRAIN_CORPUS,
    RunConfig,
    add_common_arguments,
    load_lattice,
    load_model,
    load_training_corpus,
    model_file,
    output_dir,
    resolve_run_config,
    train_with_loss,
)
from losses.config import LossKind
from metrics.report import EvalReport, evaluate
from model.classifier import Classifier
from storage.artifacts import CorpusStore, ModelStore
from storage.reports import ReportStore
from utils.errors import ArtifactIOError
from utils.file_handler import hash_inputs, require_file
from utils.logger import log_step

logger = logging.getLogger(__name__)

COMPARE_METHODS = (
    ("CE", LossKind.CE),
    ("Re-weight", LossKind.REWEIGHT),
    ("FGPL", LossKind.CDL_EDL),
)

# (таблица, вид потери, переключатели)
CDL_ABLATION = (
    ("CDL", LossKind.CDL, {"cdl_pc": False, "cdl_rf": False}),
    ("CDL", LossKind.CDL, {"cdl_pc": False, "cdl_rf": True}),
    ("CDL", LossKind.CDL, {"cdl_pc": True, "cdl_rf": True}),
)
EDL_ABLATION = (
    ("EDL", LossKind.EDL, {"edl_pc": False, "edl_bf": False}),
    ("EDL", LossKind.EDL, {"edl_pc": True, "edl_bf": False}),
    ("EDL", LossKind.EDL, {"edl_pc": False, "edl_bf": True}),
    ("EDL", LossKind.EDL, {"edl_pc": True, "edl_bf": True}),
)


def model_tag(path: str) -> str:
    """model_cdl_edl.txt -> cdl_edl"""
    name = os.path.splitext(os.path.basename(path))[0]
    return name[len("model_"):] if name.startswith("model_") else name


def infer_scene_size(samples: Sequence[TripletSample], fallback: int) -> int:
    """G как наибольшее число примеров в одной сцене"""
    if not samples:
        return fallback
    return max(Counter(sample.scene_id for sample in samples).values())


def load_test_corpus(path: str) -> Tuple[CorpusHeader, List[TripletSample]]:
    header, samples = CorpusStore.load_corpus_with_header(require_file(path))
    if header is None:
        raise ArtifactIOError(path, "пустой тестовый корпус")
    return header, samples


def summary_row(report: EvalReport) -> Dict[str, Any]:
    """Одна строка сводной таблицы: R@K, mR@K, группы и DP@k"""
    row: Dict[str, Any] = {}
    for label in report.k_labels:
        row[f"R@{label}"] = report.r_at_k[label]
        row[f"mR@{label}"] = report.mr_at_k[label]
    for label in report.k_labels:
        for group, value in report.group_mr[label].items():
            row[f"{group}@{label}"] = value
    for k, value in report.dp_at_k.items():
        row[f"DP@{k}"] = value
    return {key: None if isinstance(value, float) and math.isnan(value) else value
            for key, value in row.items()}


def evaluate_and_write(model: Classifier, tag: str, samples: Sequence[TripletSample],
                       train_samples: Sequence[TripletSample], config: RunConfig,
                       out_dir: str) -> Tuple[EvalReport, List[str]]:
    """Оценка модели и запись report_/metrics_/rings_ файлов"""
    train_frequencies = class_frequencies(train_samples, model.num_classes)
    scene_size = infer_scene_size(samples, config.generator.scene_size)
    report = evaluate(model, samples, train_frequencies, config.eval, scene_size)

    report_path = os.path.join(out_dir, f"report_{tag}.json")
    metrics_path = os.path.join(out_dir, f"metrics_{tag}.csv")
    rings_path = os.path.join(out_dir, f"rings_{tag}.csv")
    payload = report.to_dict()
    payload["model"] = tag
    ReportStore.write_json(report_path, payload)
    ReportStore.write_table(metrics_path, report.metric_rows(), ["metric", "label", "k", "value"])
    ReportStore.write_table(rings_path, report.ring_rows(), ["gt_class", "slice_label", "proportion"])
    return report, [report_path, metrics_path, rings_path]


def cmd_eval(config: RunConfig, out_dir: str, model_path: Optional[str] = None,
             corpus_path: Optional[str] = None) -> List[str]:
    """
    Оценка сохраненной модели на корпусе

    Args:
        config: Конфигурация запуска
        out_dir: Каталог артефактов
        model_path: Файл модели (по умолчанию модель FGPL из out_dir)
        corpus_path: Корпус для оценки (по умолчанию тестовый)

    Returns:
        Пути к отчетам
    """
    model_path = model_path or os.path.join(out_dir, model_file(config.fgpl_loss_kind))
    corpus_path = corpus_path or os.path.join(out_dir, TEST_CORPUS)
    model = load_model(model_path)
    header, samples = load_test_corpus(corpus_path)
    model.check_compatible(header)
    _, train_samples = load_training_corpus(out_dir)

    _, outputs = evaluate_and_write(model, model_tag(model_path), samples, train_samples, config, out_dir)
    inputs = hash_inputs([model_path, corpus_path, os.path.join(out_dir, TRAIN_CORPUS)])
    ReportStore.write_manifest(out_dir, "eval", config.dump(), inputs, outputs)
    return outputs


def cmd_compare(config: RunConfig, out_dir: str) -> List[Dict[str, Any]]:
    """
    CE против Re-weight против FGPL

    Базовая модель берется с диска; Re-weight и FGPL обучаются заново
    из тех же артефактов, так что повторный запуск дает те же байты.

    Returns:
        Строки сводной таблицы
    """
    header, train_samples = load_training_corpus(out_dir)
    test_path = os.path.join(out_dir, TEST_CORPUS)
    test_header, test_samples = load_test_corpus(test_path)
    lattice = load_lattice(out_dir)
    baseline_path = os.path.join(out_dir, model_file(LossKind.CE))

    rows = []
    outputs = []
    for method, kind in COMPARE_METHODS:
        if kind == LossKind.CE:
            model = load_model(baseline_path)
        else:
            model = train_with_loss(config, kind, header, train_samples,
                                    lattice=lattice if kind.needs_lattice else None)
            path = os.path.join(out_dir, model_file(kind))
            ModelStore.save_model(model, path)
            outputs.append(path)
        model.check_compatible(test_header)
        report, written = evaluate_and_write(model, kind.value.lower(), test_samples,
                                             train_samples, config, out_dir)
        outputs.extend(written)
        rows.append({"method": method, "loss_kind": kind.value, **summary_row(report)})
        logger.info(f"{method}: " + ", ".join(f"mR@{l}={v:.4f}" for l, v in report.mr_at_k.items()))

    csv_path = os.path.join(out_dir, "compare.csv")
    json_path = os.path.join(out_dir, "compare.json")
    ReportStore.write_table(csv_path, rows)
    ReportStore.write_json(json_path, {"rows": rows, "config": config.dump()})
    outputs.extend([csv_path, json_path])

    inputs = hash_inputs([os.path.join(out_dir, TRAIN_CORPUS), test_path,
                          os.path.join(out_dir, LATTICE_FILE), baseline_path])
    ReportStore.write_manifest(out_dir, "compare", config.dump(), inputs, outputs)
    return rows


def cmd_ablate(config: RunConfig, out_dir: str) -> List[Dict[str, Any]]:
    """
    Абляция переключателей: CDL (PC, RF) и EDL (PC, BF)

    Модели абляции не сохраняются; в таблицу попадают только метрики.
    """
    header, train_samples = load_training_corpus(out_dir)
    test_path = os.path.join(out_dir, TEST_CORPUS)
    test_header, test_samples = load_test_corpus(test_path)
    lattice = load_lattice(out_dir)
    train_frequencies = class_frequencies(train_samples, header.num_classes)
    scene_size = infer_scene_size(test_samples, config.generator.scene_size)

    rows = []
    for table, kind, switches in CDL_ABLATION + EDL_ABLATION:
        loss_config = config.loss.model_copy(update=switches)
        model = train_with_loss(config, kind, header, train_samples, lattice=lattice,
                                loss_config=loss_config)
        model.check_compatible(test_header)
        report = evaluate(model, test_samples, train_frequencies, config.eval, scene_size)
        flags = {"pc": None, "rf": None, "bf": None}
        for key, value in switches.items():
            flags[key.split("_", 1)[1]] = int(value)
        rows.append({"table": table, "loss_kind": kind.value, **flags, **summary_row(report)})
        logger.info(f"Абляция {table} {switches}: " +
                    ", ".join(f"mR@{l}={v:.4f}" for l, v in report.mr_at_k.items()))

    csv_path = os.path.join(out_dir, "ablation.csv")
    json_path = os.path.join(out_dir, "ablation.json")
    ReportStore.write_table(csv_path, rows)
    ReportStore.write_json(json_path, {"rows": rows, "config": config.dump()})

    inputs = hash_inputs([os.path.join(out_dir, TRAIN_CORPUS), test_path,
                          os.path.join(out_dir, LATTICE_FILE)])
    ReportStore.write_manifest(out_dir, "ablate", config.dump(), inputs, [csv_path, json_path])
    return rows


def eval_handler(args: argparse.Namespace) -> int:
    """Команда eval"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("eval", "start", f"model={args.model or 'default'}")
    outputs = cmd_eval(config, out_dir, args.model, args.corpus)
    log_step("eval", "done", ", ".join(outputs))
    return 0


def compare_handler(args: argparse.Namespace) -> int:
    """Команда compare"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("compare", "start", f"out={out_dir}")
    rows = cmd_compare(config, out_dir)
    print(ReportStore.render_table(rows))
    log_step("compare", "done", f"{len(rows)} строк")
    return 0


def ablate_handler(args: argparse.Namespace) -> int:
    """Команда ablate"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("ablate", "start", f"out={out_dir}")
    rows = cmd_ablate(config, out_dir)
    print(ReportStore.render_table(rows))
    log_step("ablate", "done", f"{len(rows)} строк")
    return 0


def setup_evaluation_handlers(subparsers):
    """Регистрация команд eval, compare и ablate"""
    eval_parser = subparsers.add_parser("eval", help="оценить модель")
    add_common_arguments(eval_parser)
    eval_parser.add_argument("--model", type=str, default=None, help="файл модели")
    eval_parser.add_argument("--corpus", type=str, default=None, help="корпус для оценки")
    eval_parser.set_defaults(handler=eval_handler)

    compare = subparsers.add_parser("compare", help="сравнить CE, Re-weight и FGPL")
    add_common_arguments(compare)
    compare.add_argument("--epochs", type=int, default=None, help="число эпох")
    compare.add_argument("--lambda", dest="lam", type=float, default=None, help="вес EDL")
    compare.set_defaults(handler=compare_handler)

    ablate = subparsers.add_parser("ablate", help="абляция переключателей CDL и EDL")
    add_common_arguments(ablate)
    ablate.add_argument("--epochs", type=int, default=None, help="число эпох")
    ablate.set_defaults(handler=ablate_handler)
