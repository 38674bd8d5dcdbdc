"""
Tabucol: tabu search over complete 3-colorings minimizing the number of conflicting edges.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from tricolor.errors import ContractViolation
from tricolor.graph_core import Coloring, Graph, penalty
from tricolor.records import RunRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TabucolConfig:
    k: int = 3
    tabu_base: int = 7
    tabu_slope: float = 0.6
    max_iters: Optional[int] = None

    def __post_init__(self):
        if self.k != 3:
            raise ContractViolation("only k = 3 is supported")
        if self.tabu_base < 0 or self.tabu_slope < 0:
            raise ContractViolation("tabu tenure parameters must be nonnegative")
        if self.max_iters is not None and self.max_iters < 1:
            raise ContractViolation("max_iters must be positive")


class ConflictTable:
    """
    Incremental conflict bookkeeping for a complete coloring.

    gamma[v, c] counts the neighbors of v holding color index c (0-based), so recoloring v
    from a to b changes the conflict count by gamma[v, b] - gamma[v, a].
    """

    def __init__(self, g: Graph, colors: np.ndarray):
        self.g = g
        self.neighbors = [np.array(nb, dtype=np.int64) for nb in g.adjacency]
        self.colors = np.asarray(colors, dtype=np.int64).copy()
        self.gamma = np.zeros((g.n, 3), dtype=np.int64)
        if g.m:
            u, v = g.edge_array[:, 0], g.edge_array[:, 1]
            np.add.at(self.gamma, (u, self.colors[v]), 1)
            np.add.at(self.gamma, (v, self.colors[u]), 1)
        own = self.gamma[np.arange(g.n), self.colors]
        self.conflicts = int(own.sum()) // 2

    def conflicted_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.gamma[np.arange(self.g.n), self.colors] > 0)

    def delta(self, v: int, c: int) -> int:
        return int(self.gamma[v, c] - self.gamma[v, self.colors[v]])

    def move(self, v: int, c: int) -> None:
        old = int(self.colors[v])
        if old == c:
            return
        self.conflicts += self.delta(v, c)
        self.colors[v] = c
        nb = self.neighbors[v]
        self.gamma[nb, old] -= 1
        self.gamma[nb, c] += 1

    def recount(self) -> int:
        return int(np.count_nonzero(self.colors[self.g.edge_array[:, 0]] == self.colors[self.g.edge_array[:, 1]]))

    def coloring(self) -> Coloring:
        return Coloring(self.colors + 1)


@dataclass
class TabucolResult:
    success: bool
    evaluations: int
    evals_to_solution: Optional[int]
    best_conflicts: int
    coloring: Coloring
    # (iteration, vertex, new color, was tabu, conflicts after, best before)
    moves: List[Tuple[int, int, int, bool, int, int]] = field(default_factory=list)


def tabucol(
    g: Graph,
    cfg: TabucolConfig,
    budget: int,
    rng: np.random.Generator,
    record_moves: bool = False,
) -> TabucolResult:
    """
    Start from a uniform random 3-coloring and repeatedly apply the best non-tabu recoloring
    of a conflicted vertex (tabu moves are allowed only when they reach a new best). An
    iteration in which every move is tabu applies nothing. The initial coloring and each
    iteration count as one evaluation each.
    """
    if budget < 1:
        raise ContractViolation("budget must be positive")
    limit = budget if cfg.max_iters is None else min(budget, cfg.max_iters + 1)
    table = ConflictTable(g, rng.integers(0, 3, size=g.n))
    tabu_until = np.zeros((g.n, 3), dtype=np.int64)
    best = table.conflicts
    best_colors = table.colors.copy()
    evaluations = 1
    moves: List[Tuple[int, int, int, bool, int, int]] = []

    iteration = 0
    while table.conflicts > 0 and evaluations < limit:
        iteration += 1
        evaluations += 1
        conflicted = table.conflicted_vertices()
        own = table.colors[conflicted]
        deltas = table.gamma[conflicted] - table.gamma[conflicted, own][:, None]
        valid = np.ones_like(deltas, dtype=bool)
        valid[np.arange(conflicted.size), own] = False
        is_tabu = tabu_until[conflicted] > iteration
        aspiration = table.conflicts + deltas < best
        allowed = valid & (~is_tabu | aspiration)
        if not allowed.any():
            # every move is tabu and none aspirates: idle until a tenure expires
            continue
        best_delta = deltas[allowed].min()
        rows, cols = np.nonzero(allowed & (deltas == best_delta))
        pick = int(rng.integers(rows.size))
        v, c = int(conflicted[rows[pick]]), int(cols[pick])
        was_tabu = bool(is_tabu[rows[pick], cols[pick]])

        old = int(table.colors[v])
        best_before = best
        table.move(v, c)
        tenure = cfg.tabu_base + int(cfg.tabu_slope * conflicted.size)
        tabu_until[v, old] = iteration + tenure
        if table.conflicts < best:
            best = table.conflicts
            best_colors = table.colors.copy()
        if record_moves:
            moves.append((iteration, v, c, was_tabu, table.conflicts, best_before))

    success = table.conflicts == 0
    if success:
        best_colors = table.colors
    return TabucolResult(
        success=success,
        evaluations=evaluations,
        evals_to_solution=evaluations if success else None,
        best_conflicts=best,
        coloring=Coloring(best_colors + 1),
        moves=moves,
    )


def tabucol_run(g: Graph, cfg: TabucolConfig, budget: int, seed: int) -> RunRecord:
    start = time.perf_counter()
    result = tabucol(g, cfg, budget, np.random.default_rng(seed))
    logger.info("tabucol on %s seed=%d: success=%s evals=%d", g.instance_id, seed, result.success, result.evaluations)
    return RunRecord.for_graph(
        "tabucol", g, seed,
        success=result.success,
        evals_to_solution=result.evals_to_solution,
        evals_used=result.evaluations,
        final_fitness=penalty(g, result.coloring),
        wall_ms=(time.perf_counter() - start) * 1000,
    )
