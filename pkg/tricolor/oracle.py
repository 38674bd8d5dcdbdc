"""
Exact 3-colorability decision by backtracking with forward checking.

Intended as desk-scale ground truth for tests and the `verify` subcommand (n up to ~60).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import List, Optional, Union

from tricolor.graph_core import Coloring, Graph

ALL_COLORS = 0b111


@dataclass(frozen=True)
class Colorable:
    witness: Coloring
    nodes: int


@dataclass(frozen=True)
class NotColorable:
    nodes: int


@dataclass(frozen=True)
class BudgetExceeded:
    nodes: int


Verdict = Union[Colorable, NotColorable, BudgetExceeded]


class _OutOfBudget(Exception):
    pass


class _Search:
    def __init__(self, g: Graph, node_budget: Optional[int]):
        self.g = g
        self.budget = node_budget
        self.nodes = 0
        self.order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
        self.colors = [0] * g.n
        self.domains = [ALL_COLORS] * g.n

    def solve(self, k: int, max_used: int) -> bool:
        if k == len(self.order):
            return True
        v = self.order[k]
        # a new color may only be the next unused one: removes label permutations
        for c in range(1, min(max_used + 1, 3) + 1):
            bit = 1 << (c - 1)
            if not self.domains[v] & bit:
                continue
            self.nodes += 1
            if self.budget is not None and self.nodes > self.budget:
                raise _OutOfBudget()
            pruned: List[int] = []
            wiped = False
            for u in self.g.adjacency[v]:
                if self.colors[u] == 0 and self.domains[u] & bit:
                    self.domains[u] &= ~bit
                    pruned.append(u)
                    if not self.domains[u]:
                        wiped = True
                        break
            if not wiped:
                self.colors[v] = c
                if self.solve(k + 1, max(max_used, c)):
                    return True
                self.colors[v] = 0
            for u in pruned:
                self.domains[u] |= bit
        return False


def exact_3color(g: Graph, node_budget: Optional[int] = 1_000_000) -> Verdict:
    """
    Decide 3-colorability of `g`.

    Args:
        g: graph to decide
        node_budget: maximum number of color assignments tried; None means unbounded

    Returns:
        Colorable with a proper witness, NotColorable after exhausting the search,
        or BudgetExceeded.
    """
    sys.setrecursionlimit(max(sys.getrecursionlimit(), g.n + 100))
    search = _Search(g, node_budget)
    try:
        found = search.solve(0, 0)
    except _OutOfBudget:
        return BudgetExceeded(nodes=search.nodes - 1)
    if found:
        return Colorable(witness=Coloring(search.colors), nodes=search.nodes)
    return NotColorable(nodes=search.nodes)
