"""
Обработчик команды pipeline: полный прогон по одному или нескольким seed.
"""

import argparse
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

from handlers.common import RunConfig, add_common_arguments, output_dir, resolve_run_config
from handlers.evaluation import cmd_ablate, cmd_compare
from handlers.generation import cmd_gen
from handlers.lattice_builder import cmd_build_lattice
from handlers.training import cmd_train_baseline
from storage.reports import ReportStore
from utils.file_handler import ensure_dir, file_sha256
from utils.logger import log_step

logger = logging.getLogger(__name__)

HEADLINE_MR = "mR@50"
HEADLINE_DP = "DP@10"


def seed_dir(out_dir: str, seed: int) -> str:
    return os.path.join(out_dir, f"seed_{seed}")


def run_single_seed(config: RunConfig, out_dir: str, ablate: bool = False) -> Dict[str, List[Dict[str, Any]]]:
    """gen -> train-baseline -> build-lattice -> compare [-> ablate]"""
    ensure_dir(out_dir)
    cmd_gen(config, out_dir)
    cmd_train_baseline(config, out_dir)
    cmd_build_lattice(config, out_dir)
    result = {"compare": cmd_compare(config, out_dir)}
    if ablate:
        result["ablation"] = cmd_ablate(config, out_dir)
    return result


def count_wins(summary: Sequence[Dict[str, Any]], method: str, rival: str, metric: str) -> int:
    """Число seed, в которых method строго лучше rival по metric"""
    by_seed: Dict[int, Dict[str, Any]] = {}
    for row in summary:
        by_seed.setdefault(row["seed"], {})[row["method"]] = row.get(metric)
    wins = 0
    for values in by_seed.values():
        ours, theirs = values.get(method), values.get(rival)
        if ours is not None and theirs is not None and ours > theirs:
            wins += 1
    return wins


def cmd_pipeline(config: RunConfig, out_dir: str, seeds: Optional[Sequence[int]] = None,
                 ablate: bool = False) -> List[Dict[str, Any]]:
    """
    Прогон конвейера для каждого seed в отдельном подкаталоге seed_<s>

    Returns:
        Строки сводной таблицы (seed × метод)
    """
    seeds = list(seeds) if seeds else [config.seed]
    ensure_dir(out_dir)
    summary = []
    for seed in seeds:
        log_step("pipeline", "seed", str(seed))
        result = run_single_seed(config.with_seed(seed), seed_dir(out_dir, seed), ablate)
        for row in result["compare"]:
            summary.append({"seed": seed, **row})

    for rival in ("CE", "Re-weight"):
        for metric in (HEADLINE_MR, HEADLINE_DP):
            wins = count_wins(summary, "FGPL", rival, metric)
            logger.info(f"FGPL > {rival} по {metric}: {wins} из {len(seeds)} seed")

    csv_path = os.path.join(out_dir, "pipeline_summary.csv")
    json_path = os.path.join(out_dir, "pipeline_summary.json")
    ReportStore.write_table(csv_path, summary)
    ReportStore.write_json(json_path, {"seeds": seeds, "rows": summary, "config": config.dump()})
    # Входы сводки: таблицы compare каждого seed
    inputs = {f"seed_{seed}/compare.csv": file_sha256(os.path.join(seed_dir(out_dir, seed), "compare.csv"))
              for seed in seeds}
    ReportStore.write_manifest(out_dir, "pipeline", {**config.dump(), "seeds": seeds, "ablate": ablate},
                               inputs, [csv_path, json_path])
    return summary


def pipeline_handler(args: argparse.Namespace) -> int:
    """Команда pipeline"""
    config = resolve_run_config(args)
    out_dir = output_dir(args)
    log_step("pipeline", "start", f"seeds={args.seeds or [config.seed]}, ablate={args.ablate}")
    summary = cmd_pipeline(config, out_dir, args.seeds, args.ablate)
    print(ReportStore.render_table(summary))
    log_step("pipeline", "done", f"{len(summary)} строк")
    return 0


def setup_pipeline_handlers(subparsers):
    """Регистрация команды pipeline"""
    parser = subparsers.add_parser("pipeline", help="полный прогон: gen -> ... -> compare")
    add_common_arguments(parser)
    parser.add_argument("--seeds", type=int, nargs="+", default=None, help="список seed")
    parser.add_argument("--ablate", action="store_true", help="добавить таблицу абляции")
    parser.add_argument("--epochs", type=int, default=None, help="число эпох")
    parser.add_argument("--baseline-epochs", type=int, default=None, help="эпохи базовой модели")
    parser.set_defaults(handler=pipeline_handler)
