"""
Planted 3-colorable random graphs: uniform/variable (uni), equi-partite (eq) and flat.

Every generated graph carries its class assignment as the planted partition, and edges are
only ever placed between vertices of different classes, so the planted partition is a proper
3-coloring by construction.

Randomness: the GenSpec seed feeds a numpy SeedSequence that is split into two PCG64 streams,
the first for vertex-to-class assignment and the second for edge placement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from tricolor.errors import ContractViolation, GenerationError
from tricolor.graph_core import GRAPH_TYPES, Graph, GraphMeta

logger = logging.getLogger(__name__)

Number = Union[str, float, int, Decimal]

# (n, p_min, p_max, p_step) of the experimental grids
PHASE_GRIDS: Dict[str, Tuple[int, str, str, str]] = {
    "medium": (500, "0.008", "0.028", "0.001"),
    "large": (1000, "0.004", "0.014", "0.0005"),
    "screening": (500, "0.004", "0.696", "0.004"),
}


@dataclass(frozen=True)
class GenSpec:
    graph_type: str
    n: int
    p: float
    delta: int = 0
    seed: int = 1

    def __post_init__(self):
        if self.graph_type not in GRAPH_TYPES:
            raise ContractViolation(f"graph type must be one of {GRAPH_TYPES}, got {self.graph_type!r}")
        if self.n < 3:
            raise ContractViolation(f"n must be at least 3, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ContractViolation(f"p must lie in [0, 1], got {self.p}")
        if self.delta not in (0, 1, 2):
            raise ContractViolation(f"delta must be 0, 1 or 2, got {self.delta}")
        if self.delta and self.graph_type != "uni":
            raise ContractViolation("delta > 0 is only meaningful for uniform graphs")
        if self.seed < 0:
            raise ContractViolation(f"seed must be nonnegative, got {self.seed}")

    @property
    def meta(self) -> GraphMeta:
        return GraphMeta(graph_type=self.graph_type, p=self.p, delta=self.delta, seed=self.seed)

    @property
    def instance_id(self) -> str:
        return self.meta.instance_id(self.n)


def spec_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """(class-assignment stream, edge-placement stream) for a generator seed."""
    class_seq, edge_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(class_seq), np.random.default_rng(edge_seq)


def class_distribution(delta: int) -> Tuple[Fraction, Fraction, Fraction]:
    """Exact class probabilities of the two-stage draw r ~ U{0..delta}, class ~ U{r..2}."""
    probs = [Fraction(0)] * 3
    for r in range(delta + 1):
        for c in range(r, 3):
            probs[c] += Fraction(1, delta + 1) * Fraction(1, 3 - r)
    return tuple(probs)


def assign_classes(spec: GenSpec, rng: np.random.Generator) -> np.ndarray:
    """Per-vertex class labels in {0, 1, 2} following the graph type's size rule."""
    n = spec.n
    if spec.graph_type == "uni":
        if spec.delta == 0:
            return rng.integers(0, 3, size=n).astype(np.int8)
        r = rng.integers(0, spec.delta + 1, size=n)
        return rng.integers(r, 3).astype(np.int8)

    # eq / flat: sizes differ by at most one, which classes get the extra vertices is random
    sizes = np.full(3, n // 3)
    sizes[rng.permutation(3)[: n % 3]] += 1
    labels = np.repeat(np.arange(3, dtype=np.int8), sizes)
    rng.shuffle(labels)
    return labels


def _cross_pairs(labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(labels.size, k=1)
    cross = labels[iu] != labels[ju]
    return iu[cross], ju[cross]


def _flat_edges(labels: np.ndarray, target: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """
    Greedy minimum-degree-first placement, decided vertex by vertex rather than over all pairs.

    Each step picks u uniformly among the lowest-degree vertices that still have a cross-class
    non-neighbor, then picks v uniformly among the lowest-degree cross-class non-neighbors of u,
    and adds the edge (u, v). The chosen pair therefore has a lowest-degree endpoint, but its
    degree sum need not be the minimum over all remaining cross-class pairs.
    """
    n = labels.size
    available = labels[:, None] != labels[None, :]
    degree = np.zeros(n, dtype=np.int64)
    active = available.any(axis=1)
    edges: List[Tuple[int, int]] = []
    for _ in range(target):
        if not active.any():
            raise GenerationError(f"ran out of cross-class pairs after {len(edges)} of {target} edges")
        masked = np.where(active, degree, np.iinfo(np.int64).max)
        lowest = np.flatnonzero(masked == masked.min())
        u = int(lowest[rng.integers(lowest.size)])
        partners = np.flatnonzero(available[u])
        partner_deg = degree[partners]
        partners = partners[partner_deg == partner_deg.min()]
        v = int(partners[rng.integers(partners.size)])

        available[u, v] = available[v, u] = False
        degree[u] += 1
        degree[v] += 1
        for w in (u, v):
            if not available[w].any():
                active[w] = False
        edges.append((u, v) if u < v else (v, u))
    return edges


def generate(spec: GenSpec) -> Graph:
    """Generate the graph G_{t,n,p,s} described by `spec` (deterministic in the spec)."""
    class_rng, edge_rng = spec_streams(spec.seed)
    labels = assign_classes(spec, class_rng)
    ci, cj = _cross_pairs(labels)

    if spec.graph_type == "flat":
        target = math.floor(spec.p * ci.size + 0.5)
        if target > ci.size:
            raise GenerationError(f"target of {target} edges exceeds {ci.size} cross-class pairs")
        edges = _flat_edges(labels, target, edge_rng)
    else:
        keep = edge_rng.random(ci.size) < spec.p
        edges = list(zip(ci[keep].tolist(), cj[keep].tolist()))

    graph = Graph(spec.n, edges, planted_partition=labels.tolist(), meta=spec.meta)
    logger.debug("generated %s with %d edges", graph.instance_id, graph.m)
    return graph


def p_grid(p_min: Number, p_max: Number, p_step: Number) -> List[float]:
    """Inclusive decimal grid; labels carry no floating-point drift."""
    lo, hi, step = (Decimal(str(x)) for x in (p_min, p_max, p_step))
    if step <= 0:
        raise ContractViolation(f"p_step must be positive, got {step}")
    if lo > hi:
        raise ContractViolation(f"p_min {lo} exceeds p_max {hi}")
    count = int((hi - lo) // step) + 1
    return [float(lo + i * step) for i in range(count)]


def sweep_specs(
    graph_type: str,
    n: int,
    p_min: Number,
    p_max: Number,
    p_step: Number,
    seeds: Sequence[int],
    delta: int = 0,
) -> List[GenSpec]:
    """Cartesian product of the inclusive p-grid and the seed list."""
    if not seeds:
        raise ContractViolation("seed list must not be empty")
    return [
        GenSpec(graph_type=graph_type, n=n, p=p, delta=delta, seed=int(seed))
        for p in p_grid(p_min, p_max, p_step)
        for seed in seeds
    ]
