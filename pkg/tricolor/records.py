"""
RunRecord: the outcome of one solver execution on one instance.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

from tricolor.errors import ContractViolation
from tricolor.graph_core import Graph


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    instance_id: str
    graph_type: Optional[str]
    n: int
    p: Optional[float]
    delta: int
    graph_seed: Optional[int]
    run_seed: int
    success: bool
    evals_to_solution: Optional[int]
    evals_used: int
    final_fitness: int
    wall_ms: float
    generations: int = 0

    def __post_init__(self):
        if self.success != (self.evals_to_solution is not None):
            raise ContractViolation("evals_to_solution must be present exactly when the run succeeded")

    @classmethod
    def for_graph(
        cls,
        algorithm: str,
        g: Graph,
        run_seed: int,
        *,
        success: bool,
        evals_used: int,
        final_fitness: int,
        wall_ms: float,
        evals_to_solution: Optional[int] = None,
        generations: int = 0,
    ) -> "RunRecord":
        return cls(
            algorithm=algorithm,
            instance_id=g.instance_id,
            graph_type=g.meta.graph_type,
            n=g.n,
            p=g.meta.p,
            delta=g.meta.delta,
            graph_seed=g.meta.seed,
            run_seed=run_seed,
            success=success,
            evals_to_solution=evals_to_solution if success else None,
            evals_used=evals_used,
            final_fitness=final_fitness,
            wall_ms=wall_ms,
            generations=generations,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def outcome_key(self) -> tuple:
        """Fields that must be identical when a run is repeated with the same seeds."""
        return (self.algorithm, self.instance_id, self.run_seed, self.success, self.evals_to_solution)
