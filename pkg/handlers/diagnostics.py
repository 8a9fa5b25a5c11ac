"""
Обработчик команды gradcheck: сверка аналитических градиентов потерь
с центральными конечными разностями на случайных логитах.
"""

import argparse
import logging
import os
from typing import Any, Dict, List

import numpy as np

from handlers.common import RunConfig, add_common_arguments, output_dir, resolve_run_config
from lattice.predicate_lattice import PredicateLattice, synthetic_lattice
from losses.config import LossConfig, LossKind
from losses.evaluator import LossEvaluator
from model.classifier import softmax
from storage.reports import ReportStore
from utils.errors import NumericError
from utils.file_handler import ensure_dir
from utils.gradcheck import DEFAULT_STEP, finite_difference, relative_error
from utils.logger import log_step

logger = logging.getLogger(__name__)

GRADCHECK_KINDS = (LossKind.CDL, LossKind.EDL, LossKind.CDL_EDL)
TOLERANCE = 1e-4
KINK_WIDTH = 1e-3


def near_hinge_kink(logits: np.ndarray, label: int, neighbors: np.ndarray, delta: float) -> bool:
    """|φ_j − φ_i + δ| < KINK_WIDTH хотя бы для одного j ∈ V_i"""
    probs = softmax(logits[None, :])[0]
    margins = probs[neighbors[label]] - probs[label] + delta
    return bool(np.any(np.abs(margins) < KINK_WIDTH))


def check_gradients(lattice: PredicateLattice, loss_config: LossConfig, num_vectors: int,
                    seed: int, scale: float = 3.0) -> List[Dict[str, Any]]:
    """
    Максимальная относительная ошибка градиента по каждому виду потери

    Returns:
        Строки отчета: loss_kind, checked, skipped, max_relative_error
    """
    num_classes = lattice.num_classes
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    logits = rng.normal(0.0, scale, size=(num_vectors, num_classes))
    labels = rng.integers(0, num_classes, size=num_vectors)

    rows = []
    for kind in GRADCHECK_KINDS:
        evaluator = LossEvaluator(kind, loss_config, lattice=lattice, frequencies=lattice.n)
        _, analytic = evaluator(logits, labels)
        worst = 0.0
        checked = skipped = 0
        for index, (x, label) in enumerate(zip(logits, labels)):
            if kind.uses_edl and near_hinge_kink(x, label, evaluator.neighbors, loss_config.delta):
                skipped += 1
                continue
            repeated = np.full(2 * num_classes, label)
            numeric = finite_difference(lambda points: evaluator(points, repeated)[0], x,
                                        DEFAULT_STEP, vectorized=True)
            worst = max(worst, relative_error(analytic[index], numeric))
            checked += 1
        rows.append({"loss_kind": kind.value, "checked": checked, "skipped": skipped,
                     "max_relative_error": worst})
        logger.info(f"{kind.value}: проверено {checked}, пропущено {skipped}, ошибка {worst:.2e}")
    return rows


def cmd_gradcheck(config: RunConfig, out_dir: str, num_vectors: int = 1000,
                  num_classes: int = 50) -> List[Dict[str, Any]]:
    """Проверка градиентов на синтетической решетке; NumericError при превышении допуска"""
    ensure_dir(out_dir)
    lattice = synthetic_lattice(num_classes, config.seed, config.loss.num_neighbors)
    rows = check_gradients(lattice, config.loss, num_vectors, config.seed)
    table_path = os.path.join(out_dir, "gradcheck.csv")
    ReportStore.write_table(table_path, rows)
    manifest_config = {**config.dump(), "gradcheck": {"vectors": num_vectors, "classes": num_classes}}
    ReportStore.write_manifest(out_dir, "gradcheck", manifest_config, {}, [table_path])
    failed = [row["loss_kind"] for row in rows if row["max_relative_error"] > TOLERANCE]
    if failed:
        raise NumericError(f"Градиенты расходятся с конечными разностями: {', '.join(failed)}")
    return rows


def gradcheck_handler(args: argparse.Namespace) -> int:
    """Команда gradcheck"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("gradcheck", "start", f"N={args.vectors}, C={args.classes}")
    rows = cmd_gradcheck(config, out_dir, args.vectors, args.classes)
    print(ReportStore.render_table(rows))
    log_step("gradcheck", "done", "ok")
    return 0


def setup_diagnostics_handlers(subparsers):
    """Регистрация команды gradcheck"""
    parser = subparsers.add_parser("gradcheck", help="сверить градиенты с конечными разностями")
    add_common_arguments(parser)
    parser.add_argument("--vectors", type=int, default=1000, help="число случайных векторов логитов")
    parser.add_argument("--classes", type=int, default=50, help="число классов C")
    parser.set_defaults(handler=gradcheck_handler)
