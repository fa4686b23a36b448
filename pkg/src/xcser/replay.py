"""Replay memory and the reinforcement pass over stored experiences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core, evolution, learning
from .params import Hyperparameters
from .population import Population


@dataclass
class Experience:
    """One stored transition. Single-step tasks store no successor state and
    are terminal by definition; multi-step transitions carry the successor
    with its terminal flag."""

    s: np.ndarray
    action: int
    reward: float
    s_next: np.ndarray | None = None
    terminal: bool = True


class ReplayMemory:
    """Bounded FIFO ring buffer of experiences with uniform sampling."""

    def __init__(self, capacity: int, dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self.dim = int(dim)
        self._s = np.empty((self.capacity, dim))
        self._a = np.empty(self.capacity, dtype=np.int64)
        self._r = np.empty(self.capacity)
        self._s_next = np.empty((self.capacity, dim))
        self._has_next = np.empty(self.capacity, dtype=np.bool_)
        self._terminal = np.empty(self.capacity, dtype=np.bool_)
        self._head = 0  # next physical slot to write
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, e: Experience) -> None:
        """Append; evicts the oldest experience when full."""
        i = self._head
        self._s[i] = e.s
        self._a[i] = e.action
        self._r[i] = e.reward
        if e.s_next is None:
            self._has_next[i] = False
        else:
            self._has_next[i] = True
            self._s_next[i] = e.s_next
        self._terminal[i] = e.terminal
        self._head = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _physical(self, logical: int) -> int:
        if not 0 <= logical < self._size:
            raise IndexError(logical)
        if self._size < self.capacity:
            return logical
        return (self._head + logical) % self.capacity

    def __getitem__(self, logical: int) -> Experience:
        """Logical index 0 is the oldest stored experience."""
        i = self._physical(logical)
        return Experience(
            s=self._s[i].copy(),
            action=int(self._a[i]),
            reward=float(self._r[i]),
            s_next=self._s_next[i].copy() if self._has_next[i] else None,
            terminal=bool(self._terminal[i]),
        )

    def sample(self, m: int, rng) -> list[Experience]:
        """m independent uniform draws with replacement (m=0 gives [])."""
        if m == 0:
            return []
        if self._size == 0:
            raise ValueError("cannot sample from an empty replay memory")
        idx = rng.integers(0, self._size, size=m)
        return [self[int(i)] for i in idx]

    def sample_without_replacement(self, m: int, rng) -> list[Experience]:
        if m == 0:
            return []
        if self._size == 0:
            raise ValueError("cannot sample from an empty replay memory")
        idx = rng.choice(self._size, size=min(m, self._size), replace=False)
        return [self[int(i)] for i in idx]


def sample_minibatch(rm: ReplayMemory, m: int, rng,
                     with_replacement: bool = True) -> list[Experience]:
    if with_replacement:
        return rm.sample(m, rng)
    return rm.sample_without_replacement(m, rng)


def experience_replay(e: Experience, pop: Population, t: int,
                      hp: Hyperparameters, n_actions: int, ga_rng,
                      counters) -> bool:
    """Reinforce the rules advocating ``e.action`` in ``e.s``'s niche.

    No covering happens here: replaying stale states must not spawn rules
    for regions the policy no longer visits, so empty niches (and empty
    successor match sets) skip the experience softly. The GA gets a chance
    on the replayed action set, stamped with the global step counter.
    Returns True when an update was applied.
    """
    rows_m = pop.match_rows(e.s)
    if rows_m.size == 0:
        counters.replay_empty_match += 1
        return False
    rows_a = core.build_action_set(pop, rows_m, e.action)
    if rows_a.size == 0:
        counters.replay_empty_action_set += 1
        return False
    if e.terminal or e.s_next is None:
        payoff = learning.compute_payoff(e.reward, None, hp.gamma)
    else:
        rows_m2 = pop.match_rows(e.s_next)
        if rows_m2.size == 0:
            counters.replay_empty_next_match += 1
            return False
        next_pa = core.prediction_array(pop, rows_m2, e.s_next, n_actions)
        payoff = learning.compute_payoff(e.reward, next_pa, hp.gamma)
    counters.rls_resets += learning.update_action_set(pop, rows_a, payoff,
                                                      e.s, hp)
    counters.updates += 1
    counters.replayed += 1
    if evolution.ga_should_run(pop, rows_a, t, hp.theta_GA):
        evolution.run_ga(pop, rows_a, e.s, t, hp, n_actions, ga_rng)
        counters.ga_invocations += 1
    return True
