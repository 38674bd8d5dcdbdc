from __future__ import annotations

import itertools
import os

import numpy as np
import pytest

from tricolor.graph_core import Coloring, Graph, GraphMeta
from tricolor.graph_gen import GenSpec
from tricolor.records import RunRecord


def pytest_collection_modifyitems(config, items):
    if os.getenv("TRICOLOR_RUN_SLOW", "false").lower() not in ("0", "false", "no", ""):
        return
    skip_slow = pytest.mark.skip(reason="set TRICOLOR_RUN_SLOW=1 to run protocol-scale checks")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(n, edges)


def brute_force_colorable(g: Graph) -> bool:
    for colors in itertools.product((1, 2, 3), repeat=g.n):
        if all(colors[i] != colors[j] for i, j in g.edges):
            return True
    return False


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def triangle() -> Graph:
    return Graph(3, [(0, 1), (1, 2), (0, 2)], meta=GraphMeta("eq", 0.5, 0, 7))


@pytest.fixture
def k4() -> Graph:
    return Graph(4, list(itertools.combinations(range(4), 2)))


@pytest.fixture
def wheel5() -> Graph:
    """Odd wheel W5: hub 0 joined to the 5-cycle 1..5; needs four colors."""
    rim = [(i, i % 5 + 1) for i in range(1, 6)]
    return Graph(6, rim + [(0, i) for i in range(1, 6)])


@pytest.fixture
def path4() -> Graph:
    return Graph(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def proper_triangle_coloring() -> Coloring:
    return Coloring([1, 2, 3])


def make_record(algorithm="hsaea", graph_type="eq", n=500, p=0.014, delta=0, seed=1, run=0,
                success=True, evals=1000, budget=300_000) -> RunRecord:
    instance_id = GenSpec(graph_type, n, p, delta, seed).instance_id
    return RunRecord(
        algorithm=algorithm, instance_id=instance_id, graph_type=graph_type, n=n, p=p, delta=delta,
        graph_seed=seed, run_seed=run, success=success,
        evals_to_solution=evals if success else None,
        evals_used=evals if success else budget,
        final_fitness=0 if success else 3, wall_ms=1.0,
    )
