"""Steady-state niche GA: tournament selection, crossover, interval mutation,
GA subsumption on insertion and population-wide roulette deletion."""

from __future__ import annotations

import numpy as np

from .classifier import Classifier, Condition
from .params import LINEAR, Hyperparameters
from .population import Population


def ga_should_run(pop: Population, rows: np.ndarray, t: int,
                  theta_ga: float) -> bool:
    """True when the set's numerosity-weighted mean timestamp is older than
    theta_GA steps. The caller stamps the set with ``t`` when it fires."""
    num = pop.num[rows]
    mean_ts = float((num * pop.ts[rows]).sum() / num.sum())
    return t - mean_ts > theta_ga


def tournament_select(pop: Population, rows: np.ndarray, hp: Hyperparameters,
                      rng) -> int:
    """Pick one parent row from the action set.

    A tournament of relative size tau (of the set's total numerosity,
    minimum 1) is drawn numerosity-weighted; the winner is drawn from the
    tournament proportionally to per-micro fitness.
    """
    num = pop.num[rows].astype(np.float64)
    total = num.sum()
    if hp.ga_selection == "roulette":
        fit = pop.fit[rows]
        return int(rows[_roulette(fit, rng)])
    k = max(1, int(round(hp.ga_tournament_tau * total)))
    if hp.tournament_with_replacement:
        cum = np.cumsum(num)
        slots = np.searchsorted(cum, rng.random(k) * total, side="right")
        entrants = rows[np.minimum(slots, rows.size - 1)]
    else:
        micro = np.repeat(rows, pop.num[rows])
        entrants = rng.choice(micro, size=min(k, micro.size), replace=False)
    micro_fit = pop.fit[entrants] / pop.num[entrants]
    return int(entrants[_roulette(micro_fit, rng)])


def _roulette(weights: np.ndarray, rng) -> int:
    cum = np.cumsum(weights)
    i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(i, weights.size - 1)


def uniform_crossover(cond1: Condition, cond2: Condition, rng) -> None:
    """Swap whole per-dimension interval pairs between two conditions in place."""
    swap = rng.random(cond1.dim) < 0.5
    for arr1, arr2 in ((cond1.a, cond2.a), (cond1.b, cond2.b)):
        tmp = arr1[swap].copy()
        arr1[swap] = arr2[swap]
        arr2[swap] = tmp


def mutate(cond: Condition, action: int, s: np.ndarray, mu: float, m0: float,
           rng, n_actions: int, restricted: bool = False) -> tuple[Condition, int]:
    """Shift each endpoint with probability mu by +-U(0, m0), clamped to [0,1];
    flip the action with probability mu to a different one.

    Unrestricted by default: the mutated condition need not still match ``s``.
    Restricted mode pins the moved endpoints so the interval keeps covering
    the state component.
    """
    out = cond.copy()
    for arr in (out.a, out.b):
        hit = rng.random(out.dim) < mu
        if hit.any():
            shift = rng.uniform(0.0, m0, size=out.dim)
            sign = np.where(rng.random(out.dim) < 0.5, -1.0, 1.0)
            arr[hit] = np.clip(arr[hit] + sign[hit] * shift[hit], 0.0, 1.0)
    if restricted:
        s = np.asarray(s, dtype=np.float64)
        lo = np.minimum(out.lower, s)
        hi = np.maximum(out.upper, s)
        out.a, out.b = lo, hi
    new_action = action
    if rng.random() < mu and n_actions > 1:
        others = [a for a in range(n_actions) if a != action]
        new_action = int(rng.choice(others))
    return out, new_action


def does_subsume(general: Classifier, specific: Classifier,
                 hp: Hyperparameters) -> bool:
    """Experienced, accurate, same-action rule whose box contains the other's."""
    return (general.action == specific.action
            and general.experience > hp.theta_sub
            and general.error < hp.epsilon0
            and general.condition.contains(specific.condition))


def _first_subsumer(pop: Population, rows: np.ndarray, cl: Classifier,
                    hp: Hyperparameters) -> int:
    """First row (in set order) passing the subsumption gates, or -1."""
    if rows.size == 0:
        return -1
    gates = ((pop.action[rows] == cl.action)
             & (pop.exp[rows] > hp.theta_sub)
             & (pop.eps[rows] < hp.epsilon0))
    if not gates.any():
        return -1
    cand = rows[gates]
    lo, hi = cl.condition.lower, cl.condition.upper
    contains = (np.all(pop.lo[cand] <= lo, axis=1)
                & np.all(hi <= pop.hi[cand], axis=1))
    hits = cand[contains]
    return int(hits[0]) if hits.size else -1


def insert_with_subsumption(cl: Classifier, pop: Population,
                            set_ids: list[int], hp: Hyperparameters,
                            rng) -> None:
    """Absorb ``cl`` into a subsumer from the action set or an identical rule,
    else append it; then delete down to the population bound."""
    subsumer = _first_subsumer(pop, pop.rows_for_ids(set_ids), cl, hp)
    if subsumer >= 0:
        pop.absorb(subsumer)
        pop.enforce_capacity(rng)
        return
    twin = pop.find_identical(cl)
    if twin >= 0:
        pop.absorb(twin)
    else:
        pop.insert(cl)
    pop.enforce_capacity(rng)


def run_ga(pop: Population, rows: np.ndarray, s: np.ndarray, t: int,
           hp: Hyperparameters, n_actions: int, rng) -> None:
    """One niche GA invocation on an action set.

    Stamps the set, breeds two offspring from tournament-selected parents
    (uniform interval-pair crossover with probability chi, then mutation),
    discounts their fitness/error from the parental means and inserts them
    with GA subsumption; deletion restores the capacity bound.
    """
    pop.ts[rows] = t
    set_ids = pop.ids_for_rows(rows)
    p1 = tournament_select(pop, rows, hp, rng)
    p2 = tournament_select(pop, rows, hp, rng)
    parent1, parent2 = pop.extract(p1), pop.extract(p2)
    child1, child2 = pop.extract(p1), pop.extract(p2)
    if rng.random() < hp.chi:
        uniform_crossover(child1.condition, child2.condition, rng)
    mean_fit = 0.5 * (parent1.fitness + parent2.fitness)
    mean_eps = 0.5 * (parent1.error + parent2.error)
    mean_pred = 0.5 * (parent1.prediction + parent2.prediction)
    mean_asz = 0.5 * (parent1.action_set_size + parent2.action_set_size)
    for child in (child1, child2):
        child.condition, child.action = mutate(
            child.condition, child.action, s, hp.mu, hp.m0, rng, n_actions,
            restricted=hp.mutation_restricted)
        child.fitness = hp.F_reduce * mean_fit
        child.error = hp.epsilon_reduce * mean_eps
        child.prediction = mean_pred
        child.action_set_size = mean_asz
        child.numerosity = 1
        child.experience = 0
        child.timestamp = t
        if hp.prediction_kind == LINEAR:
            child.weights = 0.5 * (parent1.weights + parent2.weights)
            child.gain = np.eye(child.weights.shape[0]) * hp.delta_RLS
        insert_with_subsumption(child, pop, set_ids, hp, rng)
