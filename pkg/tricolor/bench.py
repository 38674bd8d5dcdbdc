"""
Experiment runner: plan files, reproducible run seeds, the append-only record store,
SR / AES / ER aggregation and the phase-transition report.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from tricolor.config import load_settings
from tricolor.errors import ContractViolation, PlanError
from tricolor.graph_core import Graph, format_p, load_graph
from tricolor.graph_gen import GenSpec, generate, sweep_specs
from tricolor.records import RunRecord
from tricolor.solvers import make_config, solve

logger = logging.getLogger(__name__)

STRATIFICATION = ("algorithm", "graph_type", "n", "p", "delta")
REPORT_COLUMNS = ["algorithm", "type", "n", "p", "delta", "runs", "SR", "AES", "ER"]


# ---------------------------------------------------------------------------
# Plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanEntry:
    """One (algorithm, instance) cell run `runs` times with a per-run budget."""

    algorithm: str
    spec: Optional[GenSpec]
    runs: int
    budget: int
    params: Tuple[Tuple[str, Any], ...] = ()
    graph_file: Optional[str] = None

    def __post_init__(self):
        if (self.spec is None) == (self.graph_file is None):
            raise PlanError("a plan entry needs exactly one of a generator spec or a graph file")
        if self.runs < 1 or self.budget < 1:
            raise PlanError("runs and budget must be positive")
        make_config(self.algorithm, dict(self.params), self.budget)

    def canonical(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "spec": asdict(self.spec) if self.spec else None,
            "graph_file": self.graph_file,
            "runs": self.runs,
            "budget": self.budget,
            "params": [list(p) for p in self.params],
        }


def parse_value(raw: str) -> Any:
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def parse_seeds(raw: str) -> List[int]:
    seeds: List[int] = []
    for part in raw.split(","):
        lo, sep, hi = part.partition("-")
        seeds.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return seeds


def parse_plan(text: str, default_runs: int = 25, default_budget: int = 300_000) -> List[PlanEntry]:
    """
    Parse a plan: one entry per line of `key=value` pairs, `#` starts a comment.

    Recognized keys: algo, type, n, p, delta, seed, runs, budget, graph (DIMACS file instead
    of a generator spec), p_min/p_max/p_step + seeds (a grid expanded into one entry per
    (p, seed)), and param.<name> for algorithm configuration.
    """
    entries: List[PlanEntry] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields: Dict[str, str] = {}
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep:
                raise PlanError(f"plan line {line_no}: {token!r} is not key=value")
            fields[key] = value
        try:
            algorithm = fields.pop("algo")
            runs = int(fields.pop("runs", default_runs))
            budget = int(fields.pop("budget", default_budget))
            params = tuple(sorted(
                (key[len("param."):], parse_value(fields.pop(key)))
                for key in list(fields) if key.startswith("param.")
            ))
            if "graph" in fields:
                entries.append(PlanEntry(algorithm, None, runs, budget, params, graph_file=fields.pop("graph")))
            elif "p_min" in fields:
                specs = sweep_specs(
                    fields.pop("type"), int(fields.pop("n")),
                    fields.pop("p_min"), fields.pop("p_max"), fields.pop("p_step"),
                    parse_seeds(fields.pop("seeds")), delta=int(fields.pop("delta", 0)),
                )
                entries.extend(PlanEntry(algorithm, spec, runs, budget, params) for spec in specs)
            else:
                seeds = parse_seeds(fields.pop("seeds", fields.pop("seed", "1")))
                graph_type, n, p = fields.pop("type"), int(fields.pop("n")), float(fields.pop("p"))
                delta = int(fields.pop("delta", 0))
                entries.extend(
                    PlanEntry(algorithm, GenSpec(graph_type, n, p, delta, seed), runs, budget, params)
                    for seed in seeds
                )
        except KeyError as exc:
            raise PlanError(f"plan line {line_no}: missing key {exc.args[0]!r}") from None
        except (ValueError, ContractViolation, PlanError) as exc:
            raise PlanError(f"plan line {line_no}: {exc}") from None
        if fields:
            raise PlanError(f"plan line {line_no}: unknown keys {sorted(fields)}")
    return entries


def load_plan(path: Union[str, Path], **defaults) -> List[PlanEntry]:
    return parse_plan(Path(path).read_text(encoding="utf-8"), **defaults)


def plan_hash(plan: Sequence[PlanEntry]) -> str:
    payload = json.dumps([entry.canonical() for entry in plan], sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def derive_run_seed(instance_id: str, instance_seed: int, run_index: int, algorithm: str) -> int:
    """Deterministic, distinct per (instance, run, algorithm) seed."""
    digest = hashlib.sha256(f"{instance_id}|{instance_seed}|{run_index}|{algorithm}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


# ---------------------------------------------------------------------------
# Record store
# ---------------------------------------------------------------------------

class RecordStore:
    """
    Append-only JSON-lines store for one plan. The first line is a header binding the file
    to the plan's content hash, so a resumed sweep can skip runs that already finished.
    """

    def __init__(self, path: Union[str, Path], plan: Sequence[PlanEntry]):
        self.path = Path(path)
        self.plan_hash = plan_hash(plan)
        self.records: List[RunRecord] = []
        if self.path.exists() and self.path.stat().st_size:
            self._load_existing()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            header = {"plan_hash": self.plan_hash, "created": datetime.now(timezone.utc).isoformat(), "entries": len(plan)}
            with open(self.path, "w", encoding="utf-8") as f:
                f.write(json.dumps(header, sort_keys=True) + "\n")

    def _load_existing(self) -> None:
        with open(self.path, "r", encoding="utf-8") as f:
            header = json.loads(f.readline())
            if header.get("plan_hash") != self.plan_hash:
                raise PlanError(f"{self.path} belongs to a different plan (hash {header.get('plan_hash')})")
            for line in f:
                if line.strip():
                    self.records.append(RunRecord.from_dict(json.loads(line)))
        logger.info("resuming %s with %d stored records", self.path, len(self.records))

    def completed(self) -> set:
        return {(r.algorithm, r.instance_id, r.run_seed) for r in self.records}

    def append(self, record: RunRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(record.to_json() + "\n")
        self.records.append(record)


def read_records(path: Union[str, Path]) -> List[RunRecord]:
    """Records from one store file or every `*.jsonl` file of a directory."""
    path = Path(path)
    files = sorted(path.glob("*.jsonl")) if path.is_dir() else [path]
    records: List[RunRecord] = []
    for file in files:
        with open(file, "r", encoding="utf-8") as f:
            for line in f:
                data = json.loads(line) if line.strip() else None
                if data and "plan_hash" not in data:
                    records.append(RunRecord.from_dict(data))
    return records


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _instance(spec: Optional[GenSpec], graph_file: Optional[str]) -> Graph:
    if graph_file is not None:
        return load_graph(graph_file)
    return generate(spec)


def _execute(task: Tuple[str, Optional[GenSpec], Optional[str], int, int, Tuple]) -> RunRecord:
    algorithm, spec, graph_file, budget, seed, params = task
    return solve(algorithm, _instance(spec, graph_file), budget, seed, dict(params))


def _tasks(plan: Sequence[PlanEntry]) -> List[Tuple]:
    tasks = []
    for entry in plan:
        if entry.spec is not None:
            instance_id, instance_seed = entry.spec.instance_id, entry.spec.seed
        else:
            g = _instance(None, entry.graph_file)
            instance_id, instance_seed = g.instance_id, g.meta.seed or 0
        for run_index in range(entry.runs):
            seed = derive_run_seed(instance_id, instance_seed, run_index, entry.algorithm)
            tasks.append((entry.algorithm, entry.spec, entry.graph_file, entry.budget, seed, entry.params, instance_id))
    return tasks


def run_experiment(
    plan: Sequence[PlanEntry],
    jobs: int = 1,
    store: Optional[RecordStore] = None,
) -> Iterator[RunRecord]:
    """
    Execute every run of the plan and yield RunRecords in completion order.

    Runs already present in `store` are skipped; new records are appended to it by this
    (single) process as they arrive.
    """
    if not plan:
        raise ContractViolation("plan must not be empty")
    done = store.completed() if store is not None else set()
    tasks = [t for t in _tasks(plan) if (t[0], t[6], t[4]) not in done]
    logger.info("running %d runs (%d already stored) with %d job(s)", len(tasks), len(done), jobs)

    def _emit(record: RunRecord, finished: int) -> RunRecord:
        if store is not None:
            store.append(record)
        if finished % 100 == 0 or finished == len(tasks):
            logger.info("%d/%d runs finished", finished, len(tasks))
        return record

    if jobs <= 1:
        for finished, task in enumerate(tasks, start=1):
            yield _emit(_execute(task[:6]), finished)
        return

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_execute, task[:6]) for task in tasks]
        try:
            for finished, future in enumerate(as_completed(futures), start=1):
                yield _emit(future.result(), finished)
        except BaseException:
            # queued runs are dropped; finished ones are already stored
            pool.shutdown(wait=False, cancel_futures=True)
            raise


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    key: Dict[str, Any]
    runs: int
    successes: int
    sr: float
    aes: Optional[float]
    er: float


def records_frame(records: Iterable[RunRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([r.to_dict() for r in records])
    if frame.empty:
        raise ContractViolation("no records to aggregate")
    return frame


def aggregate(
    records: Iterable[RunRecord],
    group_by: Sequence[str],
    include_failures: bool = False,
) -> List[SweepResult]:
    """
    Group runs by stratification variables.

    SR is successes / runs of the group; ER = 1 - mean of per-instance SR across the group;
    AES averages evaluations to solution over successful runs (absent when there are none), or,
    with `include_failures`, over all runs with failures counted at the evaluations they used.
    """
    group_by = list(group_by)
    if not group_by:
        raise ContractViolation("group_by must name at least one stratification variable")
    unknown = set(group_by) - set(STRATIFICATION)
    if unknown:
        raise ContractViolation(f"unknown stratification variables {sorted(unknown)}; use {STRATIFICATION}")

    frame = records_frame(records)
    frame["cost"] = frame["evals_to_solution"].where(frame["success"], frame["evals_used"] if include_failures else np.nan)

    results: List[SweepResult] = []
    for key, group in frame.groupby(group_by, dropna=False, sort=True):
        key = key if isinstance(key, tuple) else (key,)
        key_dict = {name: (None if pd.isna(value) else value) for name, value in zip(group_by, key)}
        key_dict = {k: (v.item() if hasattr(v, "item") else v) for k, v in key_dict.items()}
        successes = int(group["success"].sum())
        runs = int(len(group))
        instance_sr = group.groupby("instance_id")["success"].mean()
        costs = group["cost"].dropna()
        aes = float(costs.mean()) if len(costs) and (successes or include_failures) else None
        results.append(SweepResult(
            key=key_dict,
            runs=runs,
            successes=successes,
            sr=successes / runs,
            aes=aes,
            er=1.0 - float(instance_sr.mean()),
        ))
    return results


def results_frame(results: Sequence[SweepResult]) -> pd.DataFrame:
    """Results in the stable report schema (missing stratification columns are left empty)."""
    rows = []
    for r in results:
        rows.append({
            "algorithm": r.key.get("algorithm"),
            "type": r.key.get("graph_type"),
            "n": r.key.get("n"),
            "p": format_p(r.key["p"]) if r.key.get("p") is not None else None,
            "delta": r.key.get("delta"),
            "runs": r.runs,
            "SR": r.sr,
            "AES": r.aes,
            "ER": r.er,
        })
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


# size/type/density/variability strata; density and size use the transition windows
ERROR_RATE_PRESETS: Dict[str, Dict[str, Any]] = {
    "size": {"group_by": ["algorithm", "n"]},
    "type": {"group_by": ["algorithm", "graph_type"]},
    "density": {"group_by": ["algorithm", "p"], "p_range": (0.006, 0.009)},
    "variability": {"group_by": ["algorithm", "delta"], "graph_type": "uni"},
}


def error_rate_table(records: Iterable[RunRecord], by: str, p_range: Optional[Tuple[float, float]] = None) -> pd.DataFrame:
    """ER per algorithm within one stratification preset (size, type, density, variability)."""
    if by not in ERROR_RATE_PRESETS:
        raise ContractViolation(f"unknown preset {by!r}; choose from {sorted(ERROR_RATE_PRESETS)}")
    preset = ERROR_RATE_PRESETS[by]
    selected = list(records)
    window = p_range or preset.get("p_range")
    if window is not None:
        lo, hi = window
        selected = [r for r in selected if r.p is not None and lo - 1e-12 <= r.p <= hi + 1e-12]
    if "graph_type" in preset:
        selected = [r for r in selected if r.graph_type == preset["graph_type"]]
    results = aggregate(selected, preset["group_by"])
    stratum = preset["group_by"][1]
    return pd.DataFrame(
        [{"stratum": r.key[stratum], "algorithm": r.key["algorithm"], "ER": r.er, "runs": r.runs} for r in results]
    )


# ---------------------------------------------------------------------------
# Phase transition
# ---------------------------------------------------------------------------

def predicted_transition(n: int) -> Dict[str, Any]:
    """
    Critical edge probabilities for a planted 3-partite graph on n vertices, using m ~ p n^2 / 3.
    """
    return {
        "petford_welsh": 8.0 / n,
        "cheeseman": 8.1 / n,
        "eiben": (7.0 / n, 8.0 / n),
        "hayes": 7.05 / n,
    }


def predicted_region(n: int) -> Tuple[float, float]:
    values = predicted_transition(n)
    points = [values["petford_welsh"], values["cheeseman"], values["hayes"], *values["eiben"]]
    return min(points), max(points)


def count_valleys(sr: Sequence[float]) -> int:
    """Local minima of an SR curve, counting a flat stretch once."""
    values = [v for i, v in enumerate(sr) if i == 0 or v != sr[i - 1]]
    if len(values) < 2:
        return 0
    valleys = 0
    for i, v in enumerate(values):
        left = values[i - 1] if i > 0 else float("inf")
        right = values[i + 1] if i + 1 < len(values) else float("inf")
        if v < left and v < right:
            valleys += 1
    return valleys


@dataclass
class PhaseTransitionReport:
    curves: pd.DataFrame
    minima: pd.DataFrame
    predictions: Dict[int, Dict[str, Any]] = field(default_factory=dict)


def phase_transition_report(results: Sequence[SweepResult]) -> PhaseTransitionReport:
    """
    SR/AES curves over p per (algorithm, type, n), the p at which each SR curve bottoms out
    (first such p) and the literature predictions for each n.
    """
    frame = pd.DataFrame([
        {**{k: r.key.get(k) for k in STRATIFICATION}, "SR": r.sr, "AES": r.aes} for r in results
    ])
    if frame.empty or frame["p"].isna().all():
        raise ContractViolation("phase transition report needs results grouped by p")
    curves = frame.sort_values(["algorithm", "graph_type", "n", "delta", "p"]).reset_index(drop=True)

    minima_rows = []
    for (algorithm, graph_type, n, delta), curve in curves.groupby(["algorithm", "graph_type", "n", "delta"], dropna=False):
        lowest = curve.loc[curve["SR"].idxmin()]
        lo, hi = predicted_region(int(n))
        minima_rows.append({
            "algorithm": algorithm, "graph_type": graph_type, "n": n, "delta": delta,
            "p_min_sr": float(lowest["p"]), "min_sr": float(lowest["SR"]),
            "valleys": count_valleys(curve["SR"].tolist()),
            "predicted_lo": lo, "predicted_hi": hi,
        })
    predictions = {int(n): predicted_transition(int(n)) for n in curves["n"].dropna().unique()}
    return PhaseTransitionReport(curves=curves, minima=pd.DataFrame(minima_rows), predictions=predictions)


def default_jobs(requested: Optional[int]) -> int:
    """Worker count: TRICOLOR_JOBS, else the explicit request, else the CPU count."""
    settings = load_settings()
    if settings.jobs is not None:
        return settings.jobs
    if requested is not None:
        return max(1, requested)
    return max(1, os.cpu_count() or 1)
