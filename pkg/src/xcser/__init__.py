"""XCS classifier system for real-valued inputs, with an optional
experience-replay learning loop, benchmark environments, an experiment
harness and a statistical comparison pipeline."""

from .agent import ER, STANDARD, Agent, RunCounters, StepRecord
from .classifier import Classifier, Condition, cover, matches
from .core import (PredictionArray, build_action_set, build_match_set,
                   prediction_array, select_action)
from .envs import EnvSpec, EnvStep, make_env, teletransport
from .evolution import (does_subsume, ga_should_run, insert_with_subsumption,
                        mutate, run_ga, tournament_select, uniform_crossover)
from .harness import (ExperimentConfig, RunLog, diverged, otm_final,
                      otm_series, rng_for, run_experiment, run_repetition)
from .learning import (accuracy, compute_payoff, relative_accuracies,
                       rls_update, update_action_set)
from .params import Hyperparameters
from .population import Population
from .replay import Experience, ReplayMemory, experience_replay, sample_minibatch
from .stats import (ComparisonRow, compare, paired_t_one_sided, shapiro_wilk,
                    wilcoxon_signed_rank)

__version__ = "0.1.0"

__all__ = [
    "Agent", "Classifier", "ComparisonRow", "Condition", "ER", "EnvSpec",
    "EnvStep", "Experience", "ExperimentConfig", "Hyperparameters",
    "Population", "PredictionArray", "ReplayMemory", "RunCounters", "RunLog",
    "STANDARD", "StepRecord", "accuracy", "build_action_set",
    "build_match_set", "compare", "compute_payoff", "cover", "diverged",
    "does_subsume", "experience_replay", "ga_should_run",
    "insert_with_subsumption", "make_env", "matches", "mutate", "otm_final",
    "otm_series", "paired_t_one_sided", "prediction_array",
    "relative_accuracies", "rls_update", "rng_for", "run_experiment",
    "run_ga", "run_repetition", "sample_minibatch", "select_action",
    "shapiro_wilk", "teletransport", "tournament_select", "uniform_crossover",
    "update_action_set", "wilcoxon_signed_rank",
]
