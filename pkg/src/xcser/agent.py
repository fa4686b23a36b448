"""The per-step learning loops: plain online credit assignment and the
replay-driven variant that learns exclusively from the replay memory."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core, evolution, learning
from .params import Hyperparameters
from .population import Population
from .replay import Experience, ReplayMemory, experience_replay, sample_minibatch


@dataclass
class RunCounters:
    ga_invocations: int = 0
    updates: int = 0
    rls_resets: int = 0
    replayed: int = 0
    replay_empty_match: int = 0
    replay_empty_action_set: int = 0
    replay_empty_next_match: int = 0

    @property
    def replay_skips(self) -> int:
        return (self.replay_empty_match + self.replay_empty_action_set
                + self.replay_empty_next_match)


@dataclass
class StepRecord:
    t: int
    reward: float
    explored: bool
    terminal: bool
    prediction: float  # system prediction for the executed action
    next_state: np.ndarray | None = None


@dataclass
class _Carryover:
    s: np.ndarray
    action: int
    reward: float
    set_ids: list[int]
    record_index: int
    prediction: float


STANDARD = "standard"
ER = "er"


class Agent:
    """One learner: population, optional replay memory, carry-over state and
    per-concern RNG streams (action / ga / replay)."""

    def __init__(self, hp: Hyperparameters, dim: int, n_actions: int,
                 mode: str, action_rng, ga_rng, replay_rng=None):
        if mode not in (STANDARD, ER):
            raise ValueError(f"unknown mode {mode!r}")
        self.hp = hp
        self.dim = dim
        self.n_actions = n_actions
        self.mode = mode
        self.pop = Population(dim, hp)
        self.rm = ReplayMemory(hp.rm_capacity, dim) if mode == ER else None
        self.action_rng = action_rng
        self.ga_rng = ga_rng
        self.replay_rng = replay_rng
        self.prev: _Carryover | None = None
        self.t = 0
        self.counters = RunCounters()
        # (record_index, error) pairs completed this step, drained by the harness
        self.completed_errors: list[tuple[int, float]] = []

    # -- shared pieces ---------------------------------------------------------

    def _observe_and_act(self, env, s):
        rows_m = core.build_match_set(self.pop, s, self.t, self.hp,
                                      self.n_actions, self.ga_rng)
        pa = core.prediction_array(self.pop, rows_m, s, self.n_actions)
        action, explored = core.select_action(pa, self.hp.exploration_prob,
                                              self.action_rng)
        rows_a = core.build_action_set(self.pop, rows_m, action)
        step = env.step(action)
        return pa, action, explored, rows_a, step

    def _update_set(self, rows, payoff, s) -> None:
        self.counters.rls_resets += learning.update_action_set(
            self.pop, rows, payoff, s, self.hp)
        self.counters.updates += 1

    def _maybe_ga(self, rows, s) -> None:
        if evolution.ga_should_run(self.pop, rows, self.t, self.hp.theta_GA):
            evolution.run_ga(self.pop, rows, s, self.t, self.hp,
                             self.n_actions, self.ga_rng)
            self.counters.ga_invocations += 1

    # -- standard loop (one online credit-assignment pass per step) -------------

    def step_standard(self, env, s: np.ndarray, record_index: int) -> StepRecord:
        pa, action, explored, rows_a, step = self._observe_and_act(env, s)
        ids_a = self.pop.ids_for_rows(rows_a)
        prediction = pa.value(action)
        if self.prev is not None:
            payoff = learning.compute_payoff(self.prev.reward, pa, self.hp.gamma)
            self.completed_errors.append(
                (self.prev.record_index, abs(self.prev.prediction - payoff)))
            prev_rows = self.pop.rows_for_ids(self.prev.set_ids)
            if prev_rows.size:
                self._update_set(prev_rows, payoff, self.prev.s)
                self._maybe_ga(prev_rows, self.prev.s)
        if step.terminal:
            payoff = learning.compute_payoff(step.reward, None, self.hp.gamma)
            self.completed_errors.append(
                (record_index, abs(prediction - payoff)))
            rows_now = self.pop.rows_for_ids(ids_a)
            if rows_now.size:
                self._update_set(rows_now, payoff, s)
                self._maybe_ga(rows_now, s)
            self.prev = None
        else:
            self.prev = _Carryover(s=s, action=action, reward=step.reward,
                                   set_ids=ids_a, record_index=record_index,
                                   prediction=prediction)
        rec = StepRecord(t=self.t, reward=step.reward, explored=explored,
                         terminal=step.terminal, prediction=prediction,
                         next_state=step.next_state)
        self.t += 1
        return rec

    # -- replay loop (current experience only reaches the learner via the RM) ---

    def step_er(self, env, s: np.ndarray, record_index: int) -> StepRecord:
        pa, action, explored, _rows_a, step = self._observe_and_act(env, s)
        prediction = pa.value(action)
        if self.prev is not None:
            payoff = learning.compute_payoff(self.prev.reward, pa, self.hp.gamma)
            self.completed_errors.append(
                (self.prev.record_index, abs(self.prev.prediction - payoff)))
            self.rm.push(Experience(s=self.prev.s, action=self.prev.action,
                                    reward=self.prev.reward, s_next=s,
                                    terminal=False))
        if step.terminal:
            payoff = learning.compute_payoff(step.reward, None, self.hp.gamma)
            self.completed_errors.append(
                (record_index, abs(prediction - payoff)))
            if env.spec.kind == "single_step":
                self.rm.push(Experience(s=s, action=action, reward=step.reward,
                                        s_next=None, terminal=True))
            else:
                self.rm.push(Experience(s=s, action=action, reward=step.reward,
                                        s_next=step.next_state, terminal=True))
            self.prev = None
        else:
            self.prev = _Carryover(s=s, action=action, reward=step.reward,
                                   set_ids=[], record_index=record_index,
                                   prediction=prediction)
        if self.t >= self.hp.warmup_steps and len(self.rm) >= 1:
            batch = sample_minibatch(self.rm, self.hp.minibatch_m,
                                     self.replay_rng,
                                     self.hp.replay_with_replacement)
            for e in batch:
                experience_replay(e, self.pop, self.t, self.hp,
                                  self.n_actions, self.ga_rng, self.counters)
        rec = StepRecord(t=self.t, reward=step.reward, explored=explored,
                         terminal=step.terminal, prediction=prediction,
                         next_state=step.next_state)
        self.t += 1
        return rec

    def step(self, env, s: np.ndarray, record_index: int) -> StepRecord:
        if self.mode == ER:
            return self.step_er(env, s, record_index)
        return self.step_standard(env, s, record_index)
