"""Interval conditions and the rule value object.

Conditions use the unordered-bound hyperrectangle representation: each
dimension carries two endpoints in [0, 1] and either one may be the larger.
Membership always evaluates against the per-dimension min/max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import LINEAR, Hyperparameters


class DimensionalityError(ValueError):
    """State vector length does not match the condition's dimensionality."""


class Condition:
    """Axis-aligned interval condition with unordered endpoints."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = np.asarray(a, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        if self.a.shape != self.b.shape or self.a.ndim != 1:
            raise ValueError("condition endpoints must be two equal-length vectors")

    @classmethod
    def from_pairs(cls, pairs) -> "Condition":
        arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
        return cls(arr[:, 0].copy(), arr[:, 1].copy())

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return np.minimum(self.a, self.b)

    @property
    def upper(self) -> np.ndarray:
        return np.maximum(self.a, self.b)

    def matches(self, s) -> bool:
        s = np.asarray(s, dtype=np.float64)
        if s.shape != self.a.shape:
            raise DimensionalityError(
                f"state has dim {s.shape}, condition has dim {self.a.shape}")
        return bool(np.all((self.lower <= s) & (s <= self.upper)))

    def contains(self, other: "Condition") -> bool:
        """True iff this hyperrectangle contains ``other`` in every dimension."""
        return bool(np.all(self.lower <= other.lower)
                    and np.all(other.upper <= self.upper))

    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def copy(self) -> "Condition":
        return Condition(self.a.copy(), self.b.copy())

    def __eq__(self, other):
        return (isinstance(other, Condition)
                and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    def __repr__(self):
        pairs = ", ".join(f"({x:.3f},{y:.3f})" for x, y in zip(self.a, self.b))
        return f"Condition[{pairs}]"


@dataclass
class Classifier:
    """One rule: condition, action, prediction model and bookkeeping.

    ``prediction`` is the scalar payoff estimate; for linear models it is
    derived from ``weights`` at evaluation time and the stored scalar is
    ignored. ``gain`` is the RLS gain matrix (symmetric positive definite at
    initialization).
    """

    condition: Condition
    action: int
    prediction: float
    error: float
    fitness: float
    experience: int = 0
    timestamp: int = 0
    action_set_size: float = 1.0
    numerosity: int = 1
    weights: np.ndarray | None = None
    gain: np.ndarray | None = None

    def predict(self, s=None) -> float:
        if self.weights is None:
            return self.prediction
        x = np.concatenate(([1.0], np.asarray(s, dtype=np.float64)))
        return float(self.weights @ x)


def matches(cl: Classifier, s) -> bool:
    """Membership test for a single rule (population matching is vectorized)."""
    return cl.condition.matches(s)


def cover(s, action: int, t: int, hp: Hyperparameters, rng) -> Classifier:
    """Create a rule matching ``s`` that advocates ``action``.

    Each interval spreads independently below and above the state component
    by U(0, r0), clamped to [0, 1].
    """
    s = np.asarray(s, dtype=np.float64)
    d = s.shape[0]
    low = np.clip(s - rng.uniform(0.0, hp.r0, size=d), 0.0, 1.0)
    high = np.clip(s + rng.uniform(0.0, hp.r0, size=d), 0.0, 1.0)
    cl = Classifier(
        condition=Condition(low, high),
        action=int(action),
        prediction=hp.p_ini,
        error=hp.epsilon_ini,
        fitness=hp.F_ini,
        experience=0,
        timestamp=int(t),
        action_set_size=1.0,
        numerosity=1,
    )
    if hp.prediction_kind == LINEAR:
        cl.weights = np.zeros(d + 1)
        cl.weights[0] = hp.p_ini
        cl.gain = np.eye(d + 1) * hp.delta_RLS
    return cl
