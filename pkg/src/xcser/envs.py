"""The six benchmark tasks behind one small environment contract.

All observations are vectors in [0,1]^D. Single-step tasks terminate on
every step; multi-step tasks end episodes by state or by their step cap.
Each instance owns its RNG stream, so trajectories are a pure function of
(seed, action sequence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

SINGLE_STEP = "single_step"
MULTI_STEP = "multi_step"


@dataclass(frozen=True)
class EnvSpec:
    state_dim: int
    action_count: int
    episode_limit: int  # 1 for single-step tasks
    reward_range: tuple[float, float]
    kind: str


@dataclass
class EnvStep:
    next_state: np.ndarray
    reward: float
    terminal: bool


class _Base:
    spec: EnvSpec

    def __init__(self, rng):
        self.rng = rng

    def reset(self) -> np.ndarray:
        raise NotImplementedError

    def step(self, action: int) -> EnvStep:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# single-step tasks (binary 0/1000 reward for the correct action)
# ---------------------------------------------------------------------------

def multiplexer_correct_action(s: np.ndarray, address_bits: int = 2) -> int:
    """Truth table of the real multiplexer: threshold each component at 0.5
    (bit 1 iff s_i > 0.5), read the address, return the addressed data bit."""
    bits = (np.asarray(s) > 0.5).astype(int)
    address = 0
    for b in bits[:address_bits]:
        address = (address << 1) | int(b)
    return int(bits[address_bits + address])


class RealMultiplexer(_Base):
    """6-dimensional real multiplexer: 2 address bits select one of 4 data bits."""

    spec = EnvSpec(state_dim=6, action_count=2, episode_limit=1,
                   reward_range=(0.0, 1000.0), kind=SINGLE_STEP)

    def __init__(self, rng):
        super().__init__(rng)
        self._s = None

    def reset(self) -> np.ndarray:
        self._s = self.rng.uniform(0.0, 1.0, size=6)
        return self._s

    def step(self, action: int) -> EnvStep:
        correct = multiplexer_correct_action(self._s)
        reward = 1000.0 if action == correct else 0.0
        return EnvStep(next_state=self._s, reward=reward, terminal=True)


def load_sprite(path: str | Path | None = None) -> np.ndarray:
    """16x16 integer grid with 7 distinct color indices (row = y, column = x)."""
    if path is None:
        ref = resources.files("xcser").joinpath("data/mario_16x16.txt")
        text = ref.read_text()
    else:
        text = Path(path).read_text()
    grid = np.array([[int(v) for v in line.split()]
                     for line in text.strip().splitlines()], dtype=np.int64)
    if grid.shape != (16, 16):
        raise ValueError(f"sprite grid must be 16x16, got {grid.shape}")
    colors = np.unique(grid)
    if colors.size != 7 or colors.min() < 0 or colors.max() > 6:
        raise ValueError("sprite must use exactly the 7 color indices 0..6")
    return grid


class MarioPixels(_Base):
    """Pixel-art classification: predict the color index of the cell hit by
    a uniform (x, y) draw over the unit square."""

    spec = EnvSpec(state_dim=2, action_count=7, episode_limit=1,
                   reward_range=(0.0, 1000.0), kind=SINGLE_STEP)

    def __init__(self, rng, sprite_path: str | Path | None = None):
        super().__init__(rng)
        self.grid = load_sprite(sprite_path)
        self._s = None

    @staticmethod
    def cell(s: np.ndarray) -> tuple[int, int]:
        cx = min(int(s[0] * 16.0), 15)
        cy = min(int(s[1] * 16.0), 15)
        return cx, cy

    def correct_action(self, s: np.ndarray) -> int:
        cx, cy = self.cell(s)
        return int(self.grid[cy, cx])

    def reset(self) -> np.ndarray:
        self._s = self.rng.uniform(0.0, 1.0, size=2)
        return self._s

    def step(self, action: int) -> EnvStep:
        reward = 1000.0 if action == self.correct_action(self._s) else 0.0
        return EnvStep(next_state=self._s, reward=reward, terminal=True)


class WbcParseError(ValueError):
    """A row of the data file could not be parsed."""


def load_wbc(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse the comma-separated breast-cancer data file.

    Expects 11 columns per row: sample id, nine integer features in 1..10,
    class label 2 (benign) or 4 (malignant). Rows containing the missing
    marker '?' are dropped. Features are normalized to [0,1] by (v-1)/9;
    labels map to actions 0 (benign) / 1 (malignant).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(
            f"breast-cancer data file not found at {path}; fetch it with "
            f"scripts/fetch_wbc.py or point --data-dir/XCSER_DATA_DIR at it")
    features, labels = [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 11:
            raise WbcParseError(f"{path}:{lineno}: expected 11 columns, "
                                f"got {len(parts)}")
        if "?" in parts:
            continue
        try:
            values = [int(p) for p in parts]
        except ValueError as exc:
            raise WbcParseError(f"{path}:{lineno}: non-integer field") from exc
        label = values[10]
        if label not in (2, 4):
            raise WbcParseError(f"{path}:{lineno}: class must be 2 or 4, "
                                f"got {label}")
        features.append([(v - 1) / 9.0 for v in values[1:10]])
        labels.append(0 if label == 2 else 1)
    if not features:
        raise WbcParseError(f"{path}: no usable rows")
    return np.asarray(features, dtype=np.float64), np.asarray(labels, dtype=np.int64)


class WisconsinStream(_Base):
    """Stream-mining view of the breast-cancer table: each step draws one
    row uniformly (with replacement) and asks for its label."""

    spec = EnvSpec(state_dim=9, action_count=2, episode_limit=1,
                   reward_range=(0.0, 1000.0), kind=SINGLE_STEP)

    def __init__(self, rng, path: str | Path):
        super().__init__(rng)
        self.features, self.labels = load_wbc(path)
        self._row = 0

    def reset(self) -> np.ndarray:
        self._row = int(self.rng.integers(0, self.features.shape[0]))
        return self.features[self._row]

    def step(self, action: int) -> EnvStep:
        reward = 1000.0 if action == int(self.labels[self._row]) else 0.0
        return EnvStep(next_state=self.features[self._row], reward=reward,
                       terminal=True)


# ---------------------------------------------------------------------------
# multi-step tasks
# ---------------------------------------------------------------------------

class NChain(_Base):
    """Walk-forward chain of 16 states with a slip probability.

    Forward (action 0) earns nothing until the far end, which pays 10 per
    step for staying; returning (action 1) always pays 2 and restarts at
    state 0. With probability 0.2 the executed action is inverted. Episodes
    end after exactly 200 steps, never by state.
    """

    spec = EnvSpec(state_dim=1, action_count=2, episode_limit=200,
                   reward_range=(0.0, 10.0), kind=MULTI_STEP)

    def __init__(self, rng, n: int = 16, slip: float = 0.2,
                 small_reward: float = 2.0, large_reward: float = 10.0,
                 episode_limit: int = 200):
        super().__init__(rng)
        self.n = n
        self.slip = slip
        self.small_reward = small_reward
        self.large_reward = large_reward
        self.episode_limit = episode_limit
        self.state = 0
        self._steps = 0

    def _obs(self) -> np.ndarray:
        return np.array([self.state / (self.n - 1)], dtype=np.float64)

    def reset(self) -> np.ndarray:
        self.state = 0
        self._steps = 0
        return self._obs()

    def reset_uniform(self) -> np.ndarray:
        self.state = int(self.rng.integers(0, self.n))
        self._steps = 0
        return self._obs()

    def step(self, action: int) -> EnvStep:
        if self.rng.random() < self.slip:
            action = 1 - action
        if action == 0:
            if self.state == self.n - 1:
                reward = self.large_reward
            else:
                self.state += 1
                reward = 0.0
        else:
            self.state = 0
            reward = self.small_reward
        self._steps += 1
        return EnvStep(next_state=self._obs(), reward=reward,
                       terminal=self._steps >= self.episode_limit)


class CartPole(_Base):
    """Pole balancing with explicit Euler dynamics and a step cap.

    Raw state (x, x_dot, theta, theta_dot) is affinely mapped to [0,1]^4
    using fixed bounds (clamped): x in [-2.4, 2.4], x_dot in [-3, 3],
    theta in +-12 degrees, theta_dot in [-3.5, 3.5] rad/s. Reward is +1 for
    every step the pole stays balanced and 0 on the failing step.
    """

    GRAVITY = 9.8
    CART_MASS = 1.0
    POLE_MASS = 0.1
    HALF_LENGTH = 0.5
    FORCE = 10.0
    TAU = 0.02
    X_LIMIT = 2.4
    THETA_LIMIT = 12.0 * math.pi / 180.0
    BOUNDS = np.array([
        [-2.4, 2.4],
        [-3.0, 3.0],
        [-THETA_LIMIT, THETA_LIMIT],
        [-3.5, 3.5],
    ])

    spec = EnvSpec(state_dim=4, action_count=2, episode_limit=200,
                   reward_range=(0.0, 1.0), kind=MULTI_STEP)

    def __init__(self, rng, episode_limit: int = 200):
        super().__init__(rng)
        self.episode_limit = episode_limit
        self.raw = np.zeros(4)
        self._steps = 0

    def _obs(self) -> np.ndarray:
        lo, hi = self.BOUNDS[:, 0], self.BOUNDS[:, 1]
        clipped = np.clip(self.raw, lo, hi)
        return (clipped - lo) / (hi - lo)

    def reset(self) -> np.ndarray:
        self.raw = self.rng.uniform(-0.05, 0.05, size=4)
        self._steps = 0
        return self._obs()

    def reset_uniform(self) -> np.ndarray:
        self.raw = self.rng.uniform(self.BOUNDS[:, 0], self.BOUNDS[:, 1])
        self._steps = 0
        return self._obs()

    def _failed(self) -> bool:
        return (abs(self.raw[0]) > self.X_LIMIT
                or abs(self.raw[2]) > self.THETA_LIMIT)

    def step(self, action: int) -> EnvStep:
        x, x_dot, theta, theta_dot = self.raw
        force = self.FORCE if action == 1 else -self.FORCE
        total_mass = self.CART_MASS + self.POLE_MASS
        polemass_length = self.POLE_MASS * self.HALF_LENGTH
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        temp = (force + polemass_length * theta_dot ** 2 * sin_t) / total_mass
        theta_acc = (self.GRAVITY * sin_t - cos_t * temp) / (
            self.HALF_LENGTH * (4.0 / 3.0 - self.POLE_MASS * cos_t ** 2 / total_mass))
        x_acc = temp - polemass_length * theta_acc * cos_t / total_mass
        self.raw = np.array([
            x + self.TAU * x_dot,
            x_dot + self.TAU * x_acc,
            theta + self.TAU * theta_dot,
            theta_dot + self.TAU * theta_acc,
        ])
        self._steps += 1
        if self._failed():
            return EnvStep(next_state=self._obs(), reward=0.0, terminal=True)
        terminal = self._steps >= self.episode_limit
        return EnvStep(next_state=self._obs(), reward=1.0, terminal=terminal)


class MountainCar(_Base):
    """Under-powered car in a valley with a sparse 0/1000 goal reward and a
    500-step cap. Observations are (position, velocity) normalized to [0,1]."""

    POS_MIN, POS_MAX = -1.2, 0.6
    VEL_MIN, VEL_MAX = -0.07, 0.07
    GOAL = 0.5

    spec = EnvSpec(state_dim=2, action_count=3, episode_limit=500,
                   reward_range=(0.0, 1000.0), kind=MULTI_STEP)

    def __init__(self, rng, episode_limit: int = 500):
        super().__init__(rng)
        self.episode_limit = episode_limit
        self.position = 0.0
        self.velocity = 0.0
        self._steps = 0

    def _obs(self) -> np.ndarray:
        return np.array([
            (self.position - self.POS_MIN) / (self.POS_MAX - self.POS_MIN),
            (self.velocity - self.VEL_MIN) / (self.VEL_MAX - self.VEL_MIN),
        ])

    def reset(self) -> np.ndarray:
        self.position = self.rng.uniform(-0.6, -0.4)
        self.velocity = 0.0
        self._steps = 0
        return self._obs()

    def reset_uniform(self) -> np.ndarray:
        self.position = self.rng.uniform(self.POS_MIN, self.POS_MAX)
        self.velocity = self.rng.uniform(self.VEL_MIN, self.VEL_MAX)
        self._steps = 0
        return self._obs()

    def step(self, action: int) -> EnvStep:
        self.velocity += 0.001 * (action - 1) - 0.0025 * math.cos(3 * self.position)
        self.velocity = min(max(self.velocity, self.VEL_MIN), self.VEL_MAX)
        self.position += self.velocity
        self.position = min(max(self.position, self.POS_MIN), self.POS_MAX)
        if self.position <= self.POS_MIN and self.velocity < 0.0:
            self.velocity = 0.0
        self._steps += 1
        if self.position >= self.GOAL:
            return EnvStep(next_state=self._obs(), reward=1000.0, terminal=True)
        terminal = self._steps >= self.episode_limit
        return EnvStep(next_state=self._obs(), reward=0.0, terminal=terminal)


class Teletransport:
    """Wrapper that makes every reset draw a uniformly random initial state
    over the environment's full state bounds; stepping is untouched."""

    def __init__(self, env):
        if env.spec.kind != MULTI_STEP:
            raise ValueError("teletransportation applies to multi-step tasks")
        if not hasattr(env, "reset_uniform"):
            raise TypeError(f"{type(env).__name__} has no uniform reset")
        self.env = env

    @property
    def spec(self) -> EnvSpec:
        return self.env.spec

    def reset(self) -> np.ndarray:
        return self.env.reset_uniform()

    def step(self, action: int) -> EnvStep:
        return self.env.step(action)


def teletransport(env) -> Teletransport:
    return Teletransport(env)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

ENV_NAMES = ("rmp6", "mario", "wbc", "16chain", "cartpole", "mountaincar")


def make_env(name: str, rng, teletransported: bool = False,
             wbc_path: str | Path | None = None,
             episode_limit: int | None = None,
             sprite_path: str | Path | None = None):
    if name == "rmp6":
        env = RealMultiplexer(rng)
    elif name == "mario":
        env = MarioPixels(rng, sprite_path=sprite_path)
    elif name == "wbc":
        if wbc_path is None:
            raise ValueError("wbc requires a data file path (wbc_data key or "
                             "--data-dir / XCSER_DATA_DIR)")
        env = WisconsinStream(rng, wbc_path)
    elif name == "16chain":
        env = NChain(rng, episode_limit=episode_limit or 200)
    elif name == "cartpole":
        env = CartPole(rng, episode_limit=episode_limit or 200)
    elif name == "mountaincar":
        env = MountainCar(rng, episode_limit=episode_limit or 500)
    else:
        raise ValueError(f"unknown environment {name!r}; "
                         f"expected one of {ENV_NAMES}")
    if teletransported:
        env = teletransport(env)
    return env
