"""Match set construction (with covering), prediction array and action choice."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import cover
from .params import Hyperparameters
from .population import Population

_COVERING_ATTEMPT_FACTOR = 50


class CoveringStalledError(RuntimeError):
    """Covering could not establish enough distinct actions in the match set."""


@dataclass
class PredictionArray:
    """Fitness-weighted payoff estimate per action present in the match set."""

    values: np.ndarray        # (n_actions,), NaN where no advocate matched
    fitness_sums: np.ndarray  # (n_actions,)

    def actions(self) -> np.ndarray:
        return np.nonzero(self.fitness_sums > 0.0)[0]

    def value(self, action: int) -> float:
        return float(self.values[action])

    def max_value(self) -> float:
        return float(np.nanmax(self.values))

    def as_dict(self) -> dict[int, tuple[float, float]]:
        return {int(a): (float(self.values[a]), float(self.fitness_sums[a]))
                for a in self.actions()}


def build_match_set(pop: Population, s: np.ndarray, t: int,
                    hp: Hyperparameters, n_actions: int, rng) -> np.ndarray:
    """Rows of all rules matching ``s``; covers missing actions until the
    match set spans at least theta_mna distinct actions.

    Covering inserts may trigger deletions, which can remove matching rules,
    so the set is rebuilt after every insertion.
    """
    attempts = 0
    while True:
        rows = pop.match_rows(s)
        present = np.unique(pop.action[rows])
        if present.size >= hp.theta_mna:
            return rows
        missing = np.setdiff1d(np.arange(n_actions), present)
        action = int(rng.choice(missing))
        pop.insert(cover(s, action, t, hp, rng))
        pop.enforce_capacity(rng)
        attempts += 1
        if attempts > _COVERING_ATTEMPT_FACTOR * hp.theta_mna:
            raise CoveringStalledError(
                f"covering failed to reach {hp.theta_mna} actions after "
                f"{attempts} insertions (N_max={hp.N_max})")


def prediction_array(pop: Population, rows: np.ndarray, s: np.ndarray,
                     n_actions: int) -> PredictionArray:
    """PA(a) = sum(p * F) / sum(F) over the matching advocates of ``a``."""
    preds = pop.predictions_at(rows, s)
    fits = pop.fit[rows]
    acts = pop.action[rows]
    weighted = np.bincount(acts, weights=preds * fits, minlength=n_actions)
    sums = np.bincount(acts, weights=fits, minlength=n_actions)
    with np.errstate(invalid="ignore"):
        values = np.where(sums > 0.0, weighted / np.where(sums > 0.0, sums, 1.0),
                          np.nan)
    return PredictionArray(values=values, fitness_sums=sums)


def select_action(pa: PredictionArray, exploration_prob: float, rng) -> tuple[int, bool]:
    """Epsilon-greedy over the actions present in the prediction array.

    Returns (action, explored). Greedy ties are broken uniformly at random.
    """
    present = pa.actions()
    if present.size == 0:
        raise ValueError("prediction array has no actions")
    if rng.random() < exploration_prob:
        return int(rng.choice(present)), True
    vals = pa.values[present]
    best = present[vals == vals.max()]
    return int(rng.choice(best)), False


def build_action_set(pop: Population, rows: np.ndarray, action: int) -> np.ndarray:
    """Subset of the match set advocating ``action``."""
    return rows[pop.action[rows] == action]
