"""Упорядочение методов и абляции на корпусе по умолчанию (долгий тест)."""

import json
import os

import pytest

from handlers.common import RunConfig
from handlers.pipeline import count_wins, cmd_pipeline, seed_dir

SEEDS = [0, 1, 2, 3, 4]
METRIC = "mR@50"


def _ablation_score(rows, table, **flags):
    for row in rows:
        if row["table"] == table and all(row[key] == value for key, value in flags.items()):
            return row[METRIC]
    raise KeyError(f"{table} {flags}")


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    out_dir = str(tmp_path_factory.mktemp("pipeline"))
    summary = cmd_pipeline(RunConfig(), out_dir, SEEDS, ablate=True)
    ablations = {}
    for seed in SEEDS:
        with open(os.path.join(seed_dir(out_dir, seed), "ablation.json"), encoding="utf-8") as f:
            ablations[seed] = json.load(f)["rows"]
    return summary, ablations


@pytest.mark.slow
def test_fgpl_beats_cross_entropy_on_most_seeds(default_run):
    summary, _ = default_run
    assert len(summary) == 3 * len(SEEDS)
    assert count_wins(summary, "FGPL", "CE", "mR@50") >= 4
    assert count_wins(summary, "FGPL", "CE", "DP@10") >= 4


@pytest.mark.slow
def test_fgpl_beats_reweighting_on_discrimination(default_run):
    summary, _ = default_run
    assert count_wins(summary, "FGPL", "Re-weight", "DP@10") >= 4


@pytest.mark.slow
def test_edl_switches_both_help(default_run):
    _, ablations = default_run
    holds = 0
    for rows in ablations.values():
        full = _ablation_score(rows, "EDL", pc=1, bf=1)
        holds += int(full >= _ablation_score(rows, "EDL", pc=0, bf=1)
                     and full >= _ablation_score(rows, "EDL", pc=1, bf=0))
    assert holds >= 4


@pytest.mark.slow
def test_cdl_correlations_help(default_run):
    _, ablations = default_run
    holds = sum(
        int(_ablation_score(rows, "CDL", pc=1, rf=1) >= _ablation_score(rows, "CDL", pc=0, rf=1))
        for rows in ablations.values()
    )
    assert holds >= 4
