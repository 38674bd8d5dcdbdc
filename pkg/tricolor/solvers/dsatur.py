"""
The DSatur family restricted to three colors.

- `decode`: weighted DSatur used as the genotype-phenotype mapping of the evolutionary solver
  (saturation first, then weight, then a random tie-break).
- `classic_dsatur`: the same procedure with vertex degree in place of the weight.
- `mod_dsat`: n single-pass decodes, each forcing a different first vertex.
- `bk_dsat`: chronological backtracking DSatur with a backtrack budget.

Every stochastic choice draws from an explicit numpy Generator. A single-pass decode draws
one vector of n tie-break keys, so two decodes whose priorities induce the same order consume
the generator identically and make identical choices.
"""

from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from tricolor.graph_core import Coloring, Graph
from tricolor.records import RunRecord

logger = logging.getLogger(__name__)

FULL = 0b111
# saturation (popcount) and lowest free color for each 3-bit mask of neighbor colors
SATURATION = (0, 1, 1, 2, 1, 2, 2, 3)
LOWEST_FREE = (1, 2, 1, 3, 1, 2, 1, 0)


@dataclass
class DecodeResult:
    coloring: Coloring
    order_colored: List[int]
    saturation: np.ndarray
    uncolored: List[int]

    @property
    def fitness(self) -> int:
        # decode never creates a conflict, so the penalty is the uncolored count
        return len(self.uncolored)


def weights_to_permutation(weights: Sequence[float]) -> np.ndarray:
    """Vertex ids by descending weight; ties by ascending id."""
    w = np.asarray(weights, dtype=float)
    return np.lexsort((np.arange(w.size), -w))


def dsatur_init_weights(g: Graph) -> np.ndarray:
    """y_j = deg(v_j) / max deg; all ones when the graph has no edges."""
    if g.max_degree == 0:
        return np.ones(g.n)
    return g.degrees / g.max_degree


def _saturation_decode(
    g: Graph,
    priority: Sequence[float],
    rng: np.random.Generator,
    first: Optional[int] = None,
) -> DecodeResult:
    n = g.n
    adjacency = g.adjacency
    prio = [float(x) for x in priority]
    tie = rng.random(n).tolist()
    used = [0] * n
    colors = [0] * n
    # 0 candidate, 1 colored, 2 dead end
    state = [0] * n
    order: List[int] = []
    uncolored: List[int] = []

    heap = [(0, -prio[v], -tie[v], v) for v in range(n)]
    heapq.heapify(heap)

    def color(v: int) -> None:
        c = LOWEST_FREE[used[v]]
        colors[v] = c
        state[v] = 1
        order.append(v)
        bit = 1 << (c - 1)
        for u in adjacency[v]:
            if used[u] & bit:
                continue
            used[u] |= bit
            if state[u] != 0:
                continue
            if used[u] == FULL:
                state[u] = 2
                uncolored.append(u)
            else:
                heapq.heappush(heap, (-SATURATION[used[u]], -prio[u], -tie[u], u))

    if first is not None:
        color(first)
    while heap:
        neg_sat, _, _, v = heapq.heappop(heap)
        if state[v] != 0 or -neg_sat != SATURATION[used[v]]:
            continue
        color(v)

    return DecodeResult(
        coloring=Coloring(colors),
        order_colored=order,
        saturation=np.array([SATURATION[m] for m in used], dtype=np.int8),
        uncolored=uncolored,
    )


def decode(g: Graph, weights: Sequence[float], rng: np.random.Generator) -> DecodeResult:
    """Map a weight vector to a coloring with the weighted DSatur heuristic."""
    return _saturation_decode(g, weights, rng)


def classic_dsatur(g: Graph, rng: np.random.Generator) -> DecodeResult:
    return _saturation_decode(g, g.degrees, rng)


@dataclass
class ModDSatResult:
    success: bool
    runs: int
    successes: int
    evals_to_solution: Optional[int]
    best_fitness: int


def mod_dsat(
    g: Graph,
    rng: np.random.Generator,
    stop_on_success: bool = True,
    budget: Optional[int] = None,
) -> ModDSatResult:
    """
    One DSatur pass per vertex, each time coloring that vertex first.

    Vertices are taken in classic DSatur order (descending degree), so the first pass is the
    plain DSatur coloring. Each pass counts as one evaluation.
    """
    runs = successes = 0
    first_success: Optional[int] = None
    best = g.n
    for v in weights_to_permutation(g.degrees):
        if budget is not None and runs >= budget:
            break
        result = _saturation_decode(g, g.degrees, rng, first=int(v))
        runs += 1
        best = min(best, result.fitness)
        if result.fitness == 0:
            successes += 1
            if first_success is None:
                first_success = runs
            if stop_on_success:
                break
    return ModDSatResult(
        success=successes > 0,
        runs=runs,
        successes=successes,
        evals_to_solution=first_success,
        best_fitness=best,
    )


@dataclass
class BkDSatResult:
    success: bool
    backtracks_used: int
    exhausted: bool
    coloring: Coloring
    best_fitness: int


def bk_dsat(
    g: Graph,
    max_backtracks: Optional[int],
    rng: np.random.Generator,
) -> BkDSatResult:
    """
    Backtracking DSatur with three colors.

    On a dead end (the selected vertex sees all three colors) the search undoes the most
    recent assignments until it reaches a vertex with an untried color; each such resumption
    costs one backtrack. `max_backtracks=None` makes the search exhaustive (and therefore exact).
    A new color is only ever the lowest unused one, which prunes label permutations.
    """
    n = g.n
    adjacency = g.adjacency
    counts = [[0, 0, 0, 0] for _ in range(n)]
    colors = np.zeros(n, dtype=np.int8)
    saturation = np.zeros(n, dtype=np.int64)
    static_key = g.degrees.astype(float) + rng.random(n)
    scale = float(n + 1)

    def assign(v: int, c: int) -> None:
        colors[v] = c
        for u in adjacency[v]:
            counts[u][c] += 1
            if counts[u][c] == 1:
                saturation[u] += 1

    def unassign(v: int) -> None:
        c = int(colors[v])
        colors[v] = 0
        for u in adjacency[v]:
            counts[u][c] -= 1
            if counts[u][c] == 0:
                saturation[u] -= 1

    # entries: (vertex, untried colors, max color used before this assignment)
    stack: List[tuple] = []
    max_used = 0
    backtracks = 0
    best_depth = 0
    exhausted = False

    while len(stack) < n:
        key = np.where(colors == 0, saturation * scale + static_key, -1.0)
        v = int(np.argmax(key))
        options = [c for c in range(1, min(max_used + 1, 3) + 1) if counts[v][c] == 0]
        if options:
            assign(v, options[0])
            stack.append((v, options[1:], max_used))
            max_used = max(max_used, options[0])
            best_depth = max(best_depth, len(stack))
            continue

        resumed = budget_hit = False
        while stack:
            u, rest, prev_max = stack.pop()
            unassign(u)
            max_used = prev_max
            if rest:
                if max_backtracks is not None and backtracks >= max_backtracks:
                    budget_hit = True
                    break
                backtracks += 1
                assign(u, rest[0])
                stack.append((u, rest[1:], prev_max))
                max_used = max(prev_max, rest[0])
                resumed = True
                break
        if not resumed:
            exhausted = not budget_hit
            break

    success = len(stack) == n
    if not success:
        colors[:] = 0
    return BkDSatResult(
        success=success,
        backtracks_used=backtracks,
        exhausted=exhausted,
        coloring=Coloring(colors),
        best_fitness=0 if success else n - best_depth,
    )


# ---------------------------------------------------------------------------
# RunRecord adapters used by the CLI and the experiment runner
# ---------------------------------------------------------------------------

def run_dsatur(g: Graph, budget: int, seed: int) -> RunRecord:
    start = time.perf_counter()
    result = classic_dsatur(g, np.random.default_rng(seed))
    success = result.fitness == 0
    return RunRecord.for_graph(
        "dsatur", g, seed,
        success=success,
        evals_to_solution=1 if success else None,
        evals_used=1,
        final_fitness=result.fitness,
        wall_ms=(time.perf_counter() - start) * 1000,
    )


def run_mod_dsat(g: Graph, budget: int, seed: int) -> RunRecord:
    start = time.perf_counter()
    result = mod_dsat(g, np.random.default_rng(seed), stop_on_success=True, budget=budget)
    return RunRecord.for_graph(
        "moddsat", g, seed,
        success=result.success,
        evals_to_solution=result.evals_to_solution,
        evals_used=result.runs,
        final_fitness=result.best_fitness,
        wall_ms=(time.perf_counter() - start) * 1000,
    )


def run_bk_dsat(g: Graph, budget: int, seed: int) -> RunRecord:
    start = time.perf_counter()
    result = bk_dsat(g, budget, np.random.default_rng(seed))
    # the first descent counts as one evaluation, each backtrack as one more
    evals = result.backtracks_used + 1
    logger.debug("bkdsat on %s: success=%s backtracks=%d", g.instance_id, result.success, result.backtracks_used)
    return RunRecord.for_graph(
        "bkdsat", g, seed,
        success=result.success,
        evals_to_solution=evals if result.success else None,
        evals_used=evals,
        final_fitness=result.best_fitness,
        wall_ms=(time.perf_counter() - start) * 1000,
    )
