from __future__ import annotations

import math

import numpy as np
import pytest

from tricolor.errors import ContractViolation
from tricolor.graph_gen import GenSpec, generate
from tricolor.solvers.dsatur import dsatur_init_weights
from tricolor.solvers.hsa_ea import (
    Y_MAX,
    Y_MIN,
    EAConfig,
    Individual,
    euclidean_distance,
    evaluate,
    generation_step,
    hybrid_swap,
    init_population,
    mutate,
    neutral_survivor_selection,
    rank_offspring,
    run,
    swap_partner,
    tournament_select,
)


class ZeroNormal:
    """Generator stand-in whose Gaussian draws are all zero."""

    def standard_normal(self, size=None):
        return 0.0 if size is None else np.zeros(size)


def _ind(y, fitness, q=0.03):
    y = np.asarray(y, dtype=float)
    return Individual(y=y, q=np.full(y.size, q), fitness=fitness)


def test_config_validation():
    with pytest.raises(ContractViolation):
        EAConfig(mu=100, lam=100)
    with pytest.raises(ContractViolation):
        EAConfig(tournament_k=17)
    with pytest.raises(ContractViolation):
        EAConfig(tau=0.0)
    with pytest.raises(ContractViolation):
        EAConfig(q_init=0.0005)


def test_learning_rates():
    tau, tau_prime = EAConfig().learning_rates(100)
    assert tau == pytest.approx(1 / math.sqrt(20))
    assert tau_prime == pytest.approx(1 / math.sqrt(200))
    assert EAConfig(tau=0.5, tau_prime=0.25).learning_rates(100) == (0.5, 0.25)


def test_euclidean_distance_is_root_mean_square():
    assert euclidean_distance([0.5, 0.5], [0.9, 0.1]) == pytest.approx(0.4)
    assert euclidean_distance([], []) == 0.0


def test_mutation_respects_bounds(rng):
    cfg = EAConfig()
    parent = Individual(y=rng.uniform(Y_MIN, Y_MAX, 100), q=np.full(100, cfg.q_init))
    q_min, q_max, y_min, y_max = 1.0, 0.0, 1.0, 0.0
    for _ in range(1000):
        child = mutate(parent, cfg, rng)
        q_min, q_max = min(q_min, child.q.min()), max(q_max, child.q.max())
        y_min, y_max = min(y_min, child.y.min()), max(y_max, child.y.max())
        parent = child
    assert cfg.epsilon0 <= q_min and q_max <= 1.0
    assert Y_MIN <= y_min and y_max <= Y_MAX


def test_mutation_floor_can_be_disabled():
    cfg = EAConfig()
    parent = _ind([0.5] * 4, None, q=0.0001)
    child = mutate(parent, cfg, ZeroNormal(), floor=False)
    assert np.allclose(child.q, 0.0001)
    assert np.allclose(mutate(parent, cfg, ZeroNormal()).q, cfg.epsilon0)


def test_zero_draws_make_mutation_the_identity(rng):
    cfg = EAConfig()
    parent = Individual(y=rng.uniform(Y_MIN, Y_MAX, 50), q=rng.uniform(cfg.epsilon0, 1.0, 50))
    child = mutate(parent, cfg, ZeroNormal())
    assert np.array_equal(child.y, parent.y)
    assert np.array_equal(child.q, parent.q)


def test_step_variance_matches_q_squared(rng):
    cfg = EAConfig(tau=1e-9, tau_prime=1e-9)
    parent = _ind([0.55] * 1000, None, q=0.05)
    steps = np.concatenate([mutate(parent, cfg, rng).y - parent.y for _ in range(100)])
    assert steps.var() == pytest.approx(0.05 ** 2, rel=0.05)


def test_init_population(rng):
    g = generate(GenSpec("eq", 60, 0.1, seed=1))
    cfg = EAConfig(mu=5, lam=20)
    state = init_population(g, cfg, rng)
    assert len(state.population) == 5
    assert np.array_equal(state.population[0].y, dsatur_init_weights(g))
    for ind in state.population[1:]:
        assert ind.y.min() >= Y_MIN and ind.y.max() <= Y_MAX
        assert np.all(ind.q == cfg.q_init)
    assert state.evals_used == 5
    assert state.y_star.fitness == min(ind.fitness for ind in state.population)


def test_tournament_prefers_fitter(rng):
    pool = [_ind([0.5], f) for f in (4, 0, 7)]
    assert tournament_select(pool, 3, rng).fitness == 0
    with pytest.raises(ContractViolation):
        tournament_select(pool, 4, rng)


def test_neutral_survivor_selection_hand_trace(rng):
    y_star = _ind([0.5, 0.5], 2)
    a = _ind([0.5, 0.6], 1)
    b = _ind([0.9, 0.1], 1)
    c = _ind([0.5, 0.5], 3)
    d = _ind([0.2, 0.2], 1)

    survivors, new_star = neutral_survivor_selection([a, b, c, d], y_star, 2, rng)
    # b is the equally good offspring farthest from the old reference
    assert new_star is b
    # ranked against b: d (0.5), a (~0.453), b (0), c (worse fitness)
    assert {id(s) for s in survivors} == {id(d), id(a)}
    assert [id(o) for o in rank_offspring([a, b, c, d], b)] == [id(d), id(a), id(b), id(c)]


def test_reference_kept_when_offspring_are_worse(rng):
    y_star = _ind([0.5, 0.5], 1)
    offspring = [_ind([0.1, 0.9], 2), _ind([0.3, 0.3], 3)]
    survivors, new_star = neutral_survivor_selection(offspring, y_star, 2, rng)
    assert new_star is y_star
    assert sorted(s.fitness for s in survivors) == [2, 3]


def test_survivors_are_the_mu_best_fitnesses():
    rng = np.random.default_rng(99)
    for _ in range(300):
        lam = int(rng.integers(4, 20))
        mu = int(rng.integers(1, lam))
        offspring = [_ind(rng.uniform(0.1, 1, 5), int(f)) for f in rng.integers(0, 6, lam)]
        y_star = _ind(rng.uniform(0.1, 1, 5), int(rng.integers(0, 6)))
        survivors, new_star = neutral_survivor_selection(offspring, y_star, mu, rng)
        assert sorted(s.fitness for s in survivors) == sorted(o.fitness for o in offspring)[:mu]
        assert new_star.fitness <= y_star.fitness


def test_survivor_selection_needs_mu_offspring(rng):
    with pytest.raises(ContractViolation):
        neutral_survivor_selection([_ind([0.5], 1)], _ind([0.5], 1), 2, rng)


def test_swap_partner_and_hybrid_swap(k4, rng):
    ind = evaluate(k4, _ind([1.0, 0.9, 0.8, 0.7], None), rng)
    u, partner = swap_partner(ind, rng)
    assert u == 3 and partner in (0, 1, 2)
    result, used = hybrid_swap(k4, ind, rng)
    # K4 cannot be 3-colored, so no swap strictly improves
    assert used == 1 and result is ind


def test_hybrid_swap_skips_proper_colorings(triangle, rng):
    ind = evaluate(triangle, _ind([0.9, 0.5, 0.2], None), rng)
    assert ind.fitness == 0
    result, used = hybrid_swap(triangle, ind, rng)
    assert result is ind and used == 0


def test_hybrid_swap_only_accepts_strict_improvement(rng):
    g = generate(GenSpec("flat", 90, 0.09, seed=3))
    for _ in range(40):
        ind = evaluate(g, _ind(rng.uniform(0.1, 1, g.n), None), rng)
        result, used = hybrid_swap(g, ind, rng)
        assert used in (0, 1)
        assert result is ind or result.fitness < ind.fitness
        if result is not ind:
            assert sorted(result.y) == sorted(ind.y)


def test_reference_fitness_never_increases():
    cfg = EAConfig(mu=5, lam=20)
    for seed in range(1, 6):
        g = generate(GenSpec("flat", 120, 0.055, seed=seed))
        state = init_population(g, cfg, np.random.default_rng(seed))
        history = [state.y_star.fitness]
        for _ in range(15):
            if state.y_star.fitness == 0:
                break
            generation_step(g, cfg, state)
            history.append(state.y_star.fitness)
        assert all(b <= a for a, b in zip(history, history[1:]))
        assert len(state.trace_rows) <= state.generation


def test_run_on_triangle_costs_initialization(triangle):
    record = run(triangle, EAConfig(), seed=1)
    assert record.success
    assert record.evals_to_solution == 15
    assert record.final_fitness == 0
    assert record.algorithm == "hsaea"


def test_run_solves_easy_planted_graph_and_is_deterministic():
    g = generate(GenSpec("eq", 100, 0.12, seed=2))
    cfg = EAConfig(max_evals=20_000)
    first = run(g, cfg, seed=7)
    second = run(g, cfg, seed=7)
    assert first.success
    assert first.evals_to_solution >= cfg.mu
    assert first.outcome_key() == second.outcome_key()


def test_run_stops_at_budget(k4):
    states = []
    record = run(k4, EAConfig(mu=2, lam=4, tournament_k=2, max_evals=50), seed=3, state_out=states)
    assert not record.success
    assert record.evals_to_solution is None
    assert 50 <= record.evals_used < 50 + 2 * 4
    assert record.final_fitness == 1
    assert states[0].trace_rows[0].keys() == {"generation", "best_fitness", "reference_fitness", "mean_q"}
