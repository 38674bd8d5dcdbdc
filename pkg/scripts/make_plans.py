"""
Write the experiment plan files used by `tricolor sweep`.

Plans: medium (n=500), large (n=1000), dsatur (DSatur variants on the medium grid) and
screening (wide p range with variable uniform graphs). Set TRICOLOR_PLANS_DIR to change
the output directory (default: plans/ next to this repository).
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import List

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from tricolor.graph_gen import PHASE_GRIDS  # noqa: E402

RUNS = 25
BUDGET = 300_000
SEEDS = "1-10"
EA_ALGORITHMS = ("hsaea", "tabucol", "sawea")
DSATUR_ALGORITHMS = ("moddsat", "bkdsat")


def grid_line(algorithm: str, graph_type: str, grid: str, delta: int = 0, runs: int = RUNS) -> str:
    n, p_min, p_max, p_step = PHASE_GRIDS[grid]
    line = (
        f"algo={algorithm} type={graph_type} n={n} p_min={p_min} p_max={p_max} p_step={p_step} "
        f"seeds={SEEDS} runs={runs} budget={BUDGET}"
    )
    return f"{line} delta={delta}" if delta else line


def phase_plan(grid: str, algorithms=EA_ALGORITHMS) -> List[str]:
    lines = [f"# {grid} graphs, {RUNS} runs per instance, budget {BUDGET}"]
    for algorithm in algorithms:
        for graph_type in ("uni", "eq", "flat"):
            lines.append(grid_line(algorithm, graph_type, grid))
    return lines


def dsatur_plan() -> List[str]:
    lines = ["# DSatur variants on the medium grid"]
    for algorithm in DSATUR_ALGORITHMS:
        for graph_type in ("uni", "eq", "flat"):
            lines.append(grid_line(algorithm, graph_type, "medium"))
    return lines


def screening_plan() -> List[str]:
    lines = ["# screening for the easy region, variable uniform graphs included"]
    for graph_type in ("uni", "eq", "flat"):
        lines.append(grid_line("hsaea", graph_type, "screening"))
    for delta in (1, 2):
        lines.append(grid_line("hsaea", "uni", "screening", delta=delta))
    return lines


def write_plan(target: Path, lines: List[str]) -> None:
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"✓ Wrote {target.relative_to(ROOT) if target.is_relative_to(ROOT) else target} ({len(lines) - 1} entries)")


def main() -> None:
    out_dir = Path(os.getenv("TRICOLOR_PLANS_DIR", ROOT / "plans"))
    write_plan(out_dir / "medium.plan", phase_plan("medium"))
    write_plan(out_dir / "large.plan", phase_plan("large"))
    write_plan(out_dir / "dsatur.plan", dsatur_plan())
    write_plan(out_dir / "screening.plan", screening_plan())


if __name__ == "__main__":
    main()
