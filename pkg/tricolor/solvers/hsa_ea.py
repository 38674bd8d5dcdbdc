"""
Hybrid self-adaptive evolutionary algorithm for graph 3-coloring.

A (mu, lambda) evolution strategy over real-valued vertex weights with one self-adapted
mutation strength per weight. Weights are decoded into colorings by the weighted DSatur
heuristic, offspring are improved by the hybrid swap local search, and survivors are chosen
by neutral survivor selection around a reference solution y*.

Fitness is the number of uncolored vertices after decoding (decoding never creates a
conflict). A run stops at the first proper coloring or when the evaluation budget is spent.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tricolor.errors import ContractViolation
from tricolor.graph_core import UNCOLORED, Graph
from tricolor.records import RunRecord
from tricolor.solvers.dsatur import DecodeResult, decode, dsatur_init_weights, weights_to_permutation

logger = logging.getLogger(__name__)

Y_MIN = 0.1
Y_MAX = 1.0


@dataclass(frozen=True)
class EAConfig:
    mu: int = 15
    lam: int = 100
    tournament_k: int = 3
    tau: Optional[float] = None
    tau_prime: Optional[float] = None
    q_init: float = 0.03
    epsilon0: float = 0.001
    max_evals: int = 300_000
    local_search_steps: int = 1

    def __post_init__(self):
        if not 1 <= self.mu < self.lam:
            raise ContractViolation(f"need 1 <= mu < lambda, got mu={self.mu}, lambda={self.lam}")
        if not 1 <= self.tournament_k <= self.mu + 1:
            raise ContractViolation(f"tournament size must be in [1, mu + 1], got {self.tournament_k}")
        for name in ("tau", "tau_prime"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ContractViolation(f"{name} must be positive, got {value}")
        if not 0 < self.epsilon0 <= self.q_init <= 1:
            raise ContractViolation("need 0 < epsilon0 <= q_init <= 1")
        if self.max_evals < 1 or self.local_search_steps < 0:
            raise ContractViolation("max_evals must be positive and local_search_steps nonnegative")

    def learning_rates(self, n: int) -> Tuple[float, float]:
        """(tau, tau') = (1/sqrt(2 sqrt n), 1/sqrt(2 n)) unless set explicitly."""
        n = max(n, 1)
        tau = self.tau if self.tau is not None else 1.0 / math.sqrt(2.0 * math.sqrt(n))
        tau_prime = self.tau_prime if self.tau_prime is not None else 1.0 / math.sqrt(2.0 * n)
        return tau, tau_prime


@dataclass
class Individual:
    y: np.ndarray
    q: np.ndarray
    decoded: Optional[DecodeResult] = None
    fitness: Optional[int] = None

    def copy(self) -> "Individual":
        return Individual(y=self.y.copy(), q=self.q.copy(), decoded=self.decoded, fitness=self.fitness)


@dataclass
class EAState:
    population: List[Individual]
    y_star: Individual
    rng: np.random.Generator
    generation: int = 0
    evals_used: int = 0
    success_evals: Optional[int] = None
    best_fitness_trace: List[int] = field(default_factory=list)
    trace_rows: List[Dict[str, float]] = field(default_factory=list)

    def count_evaluation(self, ind: Individual) -> None:
        self.evals_used += 1
        if ind.fitness == 0 and self.success_evals is None:
            self.success_evals = self.evals_used


def euclidean_distance(y1: Sequence[float], y2: Sequence[float]) -> float:
    """Root of the mean squared coordinate difference."""
    diff = np.asarray(y1, dtype=float) - np.asarray(y2, dtype=float)
    if diff.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(diff * diff)))


def evaluate(g: Graph, ind: Individual, rng: np.random.Generator) -> Individual:
    ind.decoded = decode(g, ind.y, rng)
    ind.fitness = ind.decoded.fitness
    return ind


def init_population(g: Graph, cfg: EAConfig, rng: np.random.Generator) -> EAState:
    """
    Individual 0 carries the degree-proportional weights that reproduce classic DSatur,
    the rest are uniform in [0.1, 1]. Every individual is decoded (mu evaluations).
    """
    n = g.n
    population = [Individual(y=dsatur_init_weights(g).astype(float), q=np.full(n, cfg.q_init))]
    for _ in range(cfg.mu - 1):
        population.append(Individual(y=rng.uniform(Y_MIN, Y_MAX, n), q=np.full(n, cfg.q_init)))

    for ind in population:
        evaluate(g, ind, rng)
    y_star = min(population, key=lambda ind: ind.fitness)
    # the initial population is judged as a whole, so success costs all mu evaluations
    state = EAState(population=population, y_star=y_star, rng=rng, evals_used=cfg.mu)
    if y_star.fitness == 0:
        state.success_evals = cfg.mu
    return state


def mutate(parent: Individual, cfg: EAConfig, rng, floor: bool = True) -> Individual:
    """
    Uncorrelated self-adaptive mutation with n step sizes.

    q'_i = q_i * exp(tau' * N(0,1) + tau * N_i(0,1)), floored at epsilon0 (unless `floor`
    is False) and capped at 1; then y'_i = y_i + q'_i * N'_i(0,1) clamped to [0.1, 1].
    """
    n = parent.y.size
    tau, tau_prime = cfg.learning_rates(n)
    shared = rng.standard_normal()
    q = parent.q * np.exp(tau_prime * shared + tau * rng.standard_normal(n))
    if floor:
        q = np.maximum(q, cfg.epsilon0)
    q = np.minimum(q, 1.0)
    y = np.clip(parent.y + q * rng.standard_normal(n), Y_MIN, Y_MAX)
    return Individual(y=y, q=q)


def tournament_select(population: Sequence[Individual], k: int, rng: np.random.Generator) -> Individual:
    if not 1 <= k <= len(population):
        raise ContractViolation(f"tournament size {k} does not fit a population of {len(population)}")
    picked = rng.choice(len(population), size=k, replace=False)
    best = min(population[i].fitness for i in picked)
    tied = [i for i in picked if population[i].fitness == best]
    return population[tied[int(rng.integers(len(tied)))]]


def swap_partner(ind: Individual, rng: np.random.Generator) -> Optional[Tuple[int, int]]:
    """
    (first uncolored vertex in weight order, chosen predecessor), or None when the
    individual is fully colored or its first uncolored vertex has no predecessor.
    The predecessor is drawn uniformly among those with the highest saturation degree.
    """
    if ind.decoded is None:
        raise ContractViolation("individual must be decoded before local search")
    if not ind.decoded.uncolored:
        return None
    perm = weights_to_permutation(ind.y)
    colors = ind.decoded.coloring.assignment
    pos = int(np.flatnonzero(colors[perm] == UNCOLORED)[0])
    if pos == 0:
        return None
    preds = perm[:pos]
    sat = ind.decoded.saturation[preds]
    top = preds[sat == sat.max()]
    return int(perm[pos]), int(top[rng.integers(top.size)])


def hybrid_swap(g: Graph, ind: Individual, rng: np.random.Generator) -> Tuple[Individual, int]:
    """
    Swap the first uncolored vertex with a most-saturated predecessor and keep the result
    only if it strictly improves the fitness.

    Returns:
        (resulting individual, evaluations consumed: 0 or 1)
    """
    pair = swap_partner(ind, rng)
    if pair is None:
        return ind, 0
    u, v = pair
    candidate = ind.copy()
    candidate.y[[u, v]] = candidate.y[[v, u]]
    candidate.q[[u, v]] = candidate.q[[v, u]]
    evaluate(g, candidate, rng)
    if candidate.fitness < ind.fitness:
        return candidate, 1
    return ind, 1


def rank_offspring(offspring: Sequence[Individual], y_star: Individual) -> List[Individual]:
    """Fitness ascending; equal fitness ordered by distance to y* descending (stable)."""
    return sorted(offspring, key=lambda o: (o.fitness, -euclidean_distance(o.y, y_star.y)))


def neutral_survivor_selection(
    offspring: Sequence[Individual],
    y_star: Individual,
    mu: int,
    rng: np.random.Generator,
) -> Tuple[List[Individual], Individual]:
    """
    Phase 1: if the best offspring fitness is no worse than f(y*), the best offspring farthest
    from the current y* becomes the new y*. Phase 2: the mu best offspring under
    `rank_offspring` (against the new y*) survive, placed in random order.
    """
    if len(offspring) < mu:
        raise ContractViolation(f"need at least mu={mu} offspring, got {len(offspring)}")
    best = min(o.fitness for o in offspring)
    if best <= y_star.fitness:
        neutral = [o for o in offspring if o.fitness == best]
        y_star = max(neutral, key=lambda o: euclidean_distance(o.y, y_star.y))

    survivors = rank_offspring(offspring, y_star)[:mu]
    survivors = [survivors[i] for i in rng.permutation(mu)]
    return survivors, y_star


def generation_step(g: Graph, cfg: EAConfig, state: EAState) -> None:
    """Produce lambda offspring and select survivors; stops early on a proper coloring."""
    rng = state.rng
    pool = state.population + [state.y_star]
    offspring: List[Individual] = []
    for _ in range(cfg.lam):
        parent = tournament_select(pool, cfg.tournament_k, rng)
        child = evaluate(g, mutate(parent, cfg, rng), rng)
        state.count_evaluation(child)
        for _ in range(cfg.local_search_steps):
            if child.fitness == 0:
                break
            child, used = hybrid_swap(g, child, rng)
            if used:
                state.count_evaluation(child)
        offspring.append(child)
        if child.fitness == 0:
            state.y_star = child
            state.generation += 1
            state.best_fitness_trace.append(0)
            return

    state.population, state.y_star = neutral_survivor_selection(offspring, state.y_star, cfg.mu, rng)
    state.generation += 1
    best = min(o.fitness for o in offspring)
    state.best_fitness_trace.append(best)
    state.trace_rows.append({
        "generation": state.generation,
        "best_fitness": best,
        "reference_fitness": state.y_star.fitness,
        "mean_q": float(np.mean([ind.q.mean() for ind in state.population])) if g.n else 0.0,
    })
    logger.debug(
        "generation %d: best=%d f(y*)=%d evals=%d",
        state.generation, best, state.y_star.fitness, state.evals_used,
    )


def run(g: Graph, cfg: EAConfig, seed: int, state_out: Optional[List[EAState]] = None) -> RunRecord:
    """
    One independent run on `g`.

    Args:
        g: graph to color
        cfg: algorithm parameters
        seed: run seed for the numpy generator
        state_out: when given, the final EAState is appended (for traces and tests)

    Returns:
        RunRecord with success flag and evaluations at first success
    """
    start = time.perf_counter()
    state = init_population(g, cfg, np.random.default_rng(seed))
    while state.y_star.fitness > 0 and state.evals_used < cfg.max_evals:
        generation_step(g, cfg, state)

    success = state.success_evals is not None
    wall_ms = (time.perf_counter() - start) * 1000
    logger.info(
        "hsaea on %s seed=%d: success=%s evals=%d generations=%d",
        g.instance_id, seed, success, state.evals_used, state.generation,
    )
    if state_out is not None:
        state_out.append(state)
    return RunRecord.for_graph(
        "hsaea", g, seed,
        success=success,
        evals_to_solution=state.success_evals,
        evals_used=state.evals_used,
        final_fitness=state.y_star.fitness,
        wall_ms=wall_ms,
        generations=state.generation,
    )
