"""Hyperparameter bundle shared by the rule system, the GA and the replay loop."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

SCALAR = "scalar"
LINEAR = "linear"


@dataclass
class Hyperparameters:
    """All tunables for one agent, validated on construction.

    Naming note: the population bound is ``N_max`` and the replay-memory
    bound is ``rm_capacity``; they are distinct limits even though both are
    conventionally called N.
    """

    N_max: int = 800
    beta: float = 0.2
    gamma: float = 0.95
    alpha: float = 0.1
    epsilon0: float = 10.0
    nu: float = 5.0
    theta_del: int = 20
    delta: float = 0.1
    theta_mna: int = 2
    p_ini: float = 10.0
    epsilon_ini: float = 0.0
    F_ini: float = 0.01
    mu: float = 0.04
    chi: float = 0.8
    theta_GA: float = 25.0
    theta_sub: int = 20
    F_reduce: float = 0.1
    epsilon_reduce: float = 1.0
    m0: float = 0.1
    r0: float = 0.1
    prediction_kind: str = SCALAR
    delta_RLS: float = 1.0
    lambda_RLS: float = 1.0
    exploration_prob: float = 0.5
    rm_capacity: int = 50_000
    minibatch_m: int = 4
    warmup_steps: int = 1000
    max_learning_steps: int = 40_000
    # operator variants (defaults follow the main experimental setup)
    ga_selection: str = "tournament"
    ga_tournament_tau: float = 0.4
    tournament_with_replacement: bool = True
    mutation_restricted: bool = False
    replay_with_replacement: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.N_max >= 1, "N_max must be >= 1"),
            (0.0 < self.beta <= 1.0, "beta must be in (0, 1]"),
            (0.0 <= self.gamma <= 1.0, "gamma must be in [0, 1]"),
            (self.alpha > 0.0, "alpha must be > 0"),
            (self.epsilon0 > 0.0, "epsilon0 must be > 0"),
            (self.nu > 0.0, "nu must be > 0"),
            (self.theta_del >= 0, "theta_del must be >= 0"),
            (0.0 <= self.delta <= 1.0, "delta must be in [0, 1]"),
            (self.theta_mna >= 1, "theta_mna must be >= 1"),
            (self.epsilon_ini >= 0.0, "epsilon_ini must be >= 0"),
            (0.0 < self.F_ini <= 1.0, "F_ini must be in (0, 1]"),
            (0.0 <= self.mu <= 1.0, "mu must be in [0, 1]"),
            (0.0 <= self.chi <= 1.0, "chi must be in [0, 1]"),
            (self.theta_GA >= 0.0, "theta_GA must be >= 0"),
            (self.theta_sub >= 0, "theta_sub must be >= 0"),
            (self.F_reduce > 0.0, "F_reduce must be > 0"),
            (self.epsilon_reduce >= 0.0, "epsilon_reduce must be >= 0"),
            (self.m0 >= 0.0, "m0 must be >= 0"),
            (self.r0 >= 0.0, "r0 must be >= 0"),
            (self.prediction_kind in (SCALAR, LINEAR),
             "prediction_kind must be 'scalar' or 'linear'"),
            (self.delta_RLS > 0.0, "delta_RLS must be > 0"),
            (self.lambda_RLS > 0.0, "lambda_RLS must be > 0"),
            (0.0 <= self.exploration_prob <= 1.0,
             "exploration_prob must be in [0, 1]"),
            (self.minibatch_m >= 1, "minibatch_m must be >= 1"),
            (self.rm_capacity >= self.minibatch_m,
             "rm_capacity must be >= minibatch_m"),
            (self.warmup_steps >= 0, "warmup_steps must be >= 0"),
            (self.max_learning_steps >= 1, "max_learning_steps must be >= 1"),
            (self.ga_selection in ("tournament", "roulette"),
             "ga_selection must be 'tournament' or 'roulette'"),
            (0.0 < self.ga_tournament_tau <= 1.0,
             "ga_tournament_tau must be in (0, 1]"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)

    def copy(self, **overrides) -> "Hyperparameters":
        return replace(self, **overrides)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
