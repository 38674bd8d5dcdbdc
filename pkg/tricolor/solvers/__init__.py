"""
Graph 3-coloring solvers and a name-based dispatcher shared by the CLI and the experiment runner.
"""

from __future__ import annotations

from typing import Any, Dict, Optional

from tricolor.errors import ContractViolation, PlanError
from tricolor.graph_core import Graph
from tricolor.records import RunRecord
from tricolor.solvers import dsatur, hsa_ea, saw_ea, tabucol

ALGORITHMS = ("hsaea", "tabucol", "sawea", "dsatur", "moddsat", "bkdsat")

CONFIG_CLASSES = {
    "hsaea": hsa_ea.EAConfig,
    "tabucol": tabucol.TabucolConfig,
    "sawea": saw_ea.SawConfig,
}


def build_config(cls, params: Dict[str, Any], algorithm: str):
    try:
        return cls(**params)
    except (TypeError, ContractViolation) as exc:
        raise PlanError(f"bad parameters for {algorithm}: {exc}") from None


def make_config(algorithm: str, params: Optional[Dict[str, Any]], budget: int):
    """Validated configuration for `algorithm`, or None for the parameterless DSatur variants."""
    if algorithm not in ALGORITHMS:
        raise PlanError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    params = dict(params or {})
    if algorithm not in CONFIG_CLASSES:
        if params:
            raise PlanError(f"{algorithm} takes no parameters, got {sorted(params)}")
        return None
    if algorithm == "hsaea":
        params["max_evals"] = budget
    return build_config(CONFIG_CLASSES[algorithm], params, algorithm)


def solve(
    algorithm: str,
    g: Graph,
    budget: int,
    seed: int,
    params: Optional[Dict[str, Any]] = None,
) -> RunRecord:
    """
    Run one algorithm once.

    Args:
        algorithm: one of ALGORITHMS
        g: graph to color
        budget: evaluation budget (backtrack budget for bkdsat)
        seed: run seed
        params: algorithm configuration overrides (EAConfig / TabucolConfig / SawConfig fields)
    """
    cfg = make_config(algorithm, params, budget)
    if algorithm == "hsaea":
        return hsa_ea.run(g, cfg, seed)
    if algorithm == "tabucol":
        return tabucol.tabucol_run(g, cfg, budget, seed)
    if algorithm == "sawea":
        return saw_ea.saw_ea_run(g, cfg, budget, seed)
    if algorithm == "dsatur":
        return dsatur.run_dsatur(g, budget, seed)
    if algorithm == "moddsat":
        return dsatur.run_mod_dsat(g, budget, seed)
    return dsatur.run_bk_dsat(g, budget, seed)
