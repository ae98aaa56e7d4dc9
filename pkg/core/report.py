"""
Corpus Verification Report

For every instance and every setting it supports: the dimensions, the
default learner's mistakes against the tree and exhaustive adversaries,
the oracle value, and whether the mistake bound held. Rows go to CSV for
reading and JSON for tooling.
"""

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional

from core.adversary import ExhaustiveAdversary, TreeAdversary
from core.constants import DEFAULT_LEARNER, DEFAULT_SEED, DEFAULT_TIE_POLICY
from core.dimensions import KIND_FOR_SETTING, DimensionKind, calculator_for
from core.engine import GameConfig, run_game
from core.errors import ResourceLimitError
from core.instance_io import load_instance, write_json
from core.learners import BanditReduction, build_learner, price_of_bandit_bound
from core.model import Instance
from core.oracle import certify_dimension

log = logging.getLogger(__name__)

ROW_FIELDS = (
    "instance",
    "setting",
    "hypotheses",
    "max_degree",
    "ldim",
    "kind",
    "dimension",
    "learner",
    "tree_mistakes",
    "exhaustive_mistakes",
    "oracle_value",
    "bound_satisfied",
    "certified",
    "log2_h",
    "prior_bound",
    "reduction_mistakes",
    "reduction_bound",
)


def settings_for(instance: Instance) -> List[str]:
    settings = []
    if instance.labels.k == 2:
        settings.append("binary")
    settings += ["multiclass-full", "multiclass-bandit"]
    if instance.graph.is_weighted:
        settings.append("weighted-full")
    return settings


def _mistakes(instance: Instance, setting: str, adversary_name: str) -> Optional[int]:
    world = instance.for_setting(setting)
    learner = build_learner(DEFAULT_LEARNER[setting], world)
    if adversary_name == "tree":
        adversary = TreeAdversary(world, setting)
    else:
        adversary = ExhaustiveAdversary(world, setting, learner, DEFAULT_TIE_POLICY)
    config = GameConfig(setting=setting, tie_policy=DEFAULT_TIE_POLICY, seed=DEFAULT_SEED)
    try:
        return run_game(learner, adversary, config).mistakes
    except ResourceLimitError as exc:
        log.info("%s/%s vs %s skipped: %s", instance.name, setting, adversary_name, exc)
        return None


def evaluate(instance: Instance, setting: str) -> dict:
    """One report row."""
    world = instance.for_setting(setting)
    calc = calculator_for(world)
    kind = KIND_FOR_SETTING[setting]
    dim = calc.dimension(kind, world.full())
    n_hyps = len(instance.hypotheses)
    log2_h = math.log2(n_hyps) if n_hyps else 0.0

    row = {
        "instance": instance.name,
        "setting": setting,
        "hypotheses": n_hyps,
        "max_degree": world.graph.max_degree,
        "ldim": calc.dimension(DimensionKind.LITTLESTONE, world.full()),
        "kind": kind.value,
        "dimension": dim,
        "learner": DEFAULT_LEARNER[setting],
        "tree_mistakes": _mistakes(instance, setting, "tree"),
        "exhaustive_mistakes": _mistakes(instance, setting, "exhaustive"),
        "oracle_value": None,
        "certified": None,
        "log2_h": round(log2_h, 6),
        "prior_bound": round((world.graph.max_degree + 1) * log2_h, 6),
        "reduction_mistakes": None,
        "reduction_bound": None,
    }

    try:
        verdict = certify_dimension(instance, setting)
        row["oracle_value"] = verdict["value"]
        row["certified"] = verdict["equal"]
    except ResourceLimitError as exc:
        log.info("%s/%s oracle skipped: %s", instance.name, setting, exc)

    if setting == "multiclass-bandit":
        full_dim = calc.dimension(DimensionKind.IL_MULTICLASS, world.full())
        reduction = BanditReduction(world)
        try:
            transcript = run_game(reduction, TreeAdversary(world, setting), GameConfig(setting=setting))
            row["reduction_mistakes"] = transcript.mistakes
        except ResourceLimitError as exc:
            log.info("%s reduction skipped: %s", instance.name, exc)
        row["reduction_bound"] = round(
            price_of_bandit_bound(world.labels.k, world.graph.max_degree, full_dim), 6
        )

    played = [m for m in (row["tree_mistakes"], row["exhaustive_mistakes"]) if m is not None]
    row["bound_satisfied"] = all(m <= dim for m in played)
    if row["reduction_mistakes"] is not None:
        row["bound_satisfied"] = row["bound_satisfied"] and row["reduction_mistakes"] <= row["reduction_bound"]
    return row


def row_ok(row: dict) -> bool:
    return bool(row["bound_satisfied"]) and row["certified"] is not False


def _evaluate_path(path: str) -> List[dict]:
    instance = load_instance(path)
    return [evaluate(instance, setting) for setting in settings_for(instance)]


# ============================================================
# CORPUS
# ============================================================

def corpus_files(corpus) -> List[Path]:
    corpus = Path(corpus)
    if corpus.is_file():
        return [corpus]
    files = sorted(corpus.glob("*.json"))
    if not files:
        raise ValueError(f"'corpus' has no instance files: {corpus}")
    return files


def verify_corpus(corpus, workers: int = 1) -> List[dict]:
    paths = [str(p) for p in corpus_files(corpus)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_evaluate_path, paths))
    else:
        batches = [_evaluate_path(p) for p in paths]

    rows = [row for batch in batches for row in batch]
    for row in rows:
        if not row_ok(row):
            log.warning("verify %s/%s: bound or certification failed", row["instance"], row["setting"])
    log.info("verify: %d instances, %d rows", len(paths), len(rows))
    return rows


def summarize(rows: Iterable[dict]) -> dict:
    rows = list(rows)
    failures = [f"{r['instance']}/{r['setting']}" for r in rows if not row_ok(r)]
    return {
        "rows": rows,
        "totals": {
            "instances": len({r["instance"] for r in rows}),
            "rows": len(rows),
            "certified": sum(1 for r in rows if r["certified"]),
            "failures": failures,
        },
    }


def write_csv(rows: Iterable[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=ROW_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in ROW_FIELDS})


def write_report(rows: List[dict], out_dir) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(rows, out_dir / "report.csv")
    summary = summarize(rows)
    write_json(out_dir / "report.json", summary)
    return summary
