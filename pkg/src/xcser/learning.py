"""Credit assignment: payoff targets, Widrow-Hoff/RLS updates, accuracy and fitness."""

from __future__ import annotations

import numpy as np

from . import kernels
from .classifier import Classifier
from .core import PredictionArray
from .params import LINEAR, Hyperparameters
from .population import Population


def accuracy(epsilon: float, hp: Hyperparameters) -> float:
    """Error-to-accuracy map: 1 below the error threshold, inverse power above."""
    if epsilon < hp.epsilon0:
        return 1.0
    return hp.alpha * (epsilon / hp.epsilon0) ** (-hp.nu)


def relative_accuracies(eps_values, numerosities, hp: Hyperparameters) -> np.ndarray:
    """Numerosity-weighted accuracy shares over one action set (sums to 1)."""
    kappa = kernels.accuracy_vector(eps_values, hp.alpha, hp.epsilon0, hp.nu)
    weighted = kappa * np.asarray(numerosities, dtype=np.float64)
    return weighted / weighted.sum()


def compute_payoff(reward: float, next_pa: PredictionArray | None,
                   gamma: float) -> float:
    """Q-style target: r + gamma * best next system prediction, or r at episode end."""
    if next_pa is None:
        return float(reward)
    return float(reward) + gamma * next_pa.max_value()


def update_action_set(pop: Population, rows: np.ndarray, P: float,
                      s: np.ndarray, hp: Hyperparameters) -> int:
    """Reinforce every rule in the action set toward payoff ``P``.

    For linear models the state ``s`` must be the one the experience
    occurred in. Returns the number of RLS gain-matrix resets (always 0 for
    scalar predictions).
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("cannot update an empty action set")
    if hp.prediction_kind == LINEAR:
        x = np.concatenate(([1.0], np.asarray(s, dtype=np.float64)))
        return int(kernels.update_linear_set(
            pop.W, pop.V, pop.eps, pop.fit, pop.asz, pop.exp, pop.num,
            rows, x, float(P), hp.beta, hp.alpha, hp.epsilon0, hp.nu,
            hp.lambda_RLS, hp.delta_RLS))
    kernels.update_scalar_set(
        pop.pred, pop.eps, pop.fit, pop.asz, pop.exp, pop.num,
        rows, float(P), hp.beta, hp.alpha, hp.epsilon0, hp.nu)
    return 0


def rls_update(cl: Classifier, s, P: float, hp: Hyperparameters) -> bool:
    """Recursive least-squares step on one rule's linear model.

    Returns True when the recursion produced non-finite values and the gain
    matrix was reset to delta_RLS * I (the rule's error estimate then decays
    its fitness, which raises its deletion vote).
    """
    if cl.weights is None or cl.gain is None:
        raise ValueError("rls_update requires a linear prediction model")
    x = np.concatenate(([1.0], np.asarray(s, dtype=np.float64)))
    with np.errstate(all="ignore"):
        pred = float(cl.weights @ x)
        v = cl.gain @ x
        g = v / (hp.lambda_RLS + float(x @ v))
        cl.weights = cl.weights + g * (P - pred)
        gain = (cl.gain - np.outer(g, x @ cl.gain)) / hp.lambda_RLS
        cl.gain = 0.5 * (gain + gain.T)
    if np.all(np.isfinite(cl.weights)) and np.all(np.isfinite(cl.gain)):
        return False
    cl.weights = np.where(np.isfinite(cl.weights), cl.weights, 0.0)
    cl.gain = np.eye(x.shape[0]) * hp.delta_RLS
    return True
