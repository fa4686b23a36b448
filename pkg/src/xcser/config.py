"""Flat key-value experiment configs (the preset file format).

Lines are ``key = value`` with ``#`` comments. Keys mirror the
hyperparameter table so presets diff cleanly; ``seed`` maps to the base
seed of the repetition scheme.
"""

from __future__ import annotations

import os
from pathlib import Path

from .harness import ExperimentConfig
from .params import LINEAR, SCALAR, Hyperparameters


class ConfigError(ValueError):
    pass


def _parse_bool(raw: str) -> bool:
    val = raw.strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


_HP_FLOAT = ("beta", "gamma", "alpha", "epsilon0", "nu", "delta", "p_ini",
             "epsilon_ini", "F_ini", "mu", "chi", "theta_GA", "F_reduce",
             "epsilon_reduce", "m0", "r0", "delta_RLS", "lambda_RLS",
             "exploration_prob", "ga_tournament_tau")
_HP_INT = ("N_max", "theta_del", "theta_sub", "theta_mna", "rm_capacity",
           "minibatch_m", "warmup_steps", "max_learning_steps")
_HP_BOOL = ("tournament_with_replacement", "mutation_restricted",
            "replay_with_replacement")
_EXP_KEYS = ("env", "mode", "teletransport", "seed", "repetitions",
             "metric_window", "episode_limit", "wbc_data", "sprite")


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    hp_kwargs: dict = {}
    exp_kwargs: dict = {}
    learning_rule = None
    for key, raw in mapping.items():
        try:
            if key in _HP_FLOAT:
                hp_kwargs[key] = float(raw)
            elif key in _HP_INT:
                hp_kwargs[key] = int(raw)
            elif key in _HP_BOOL:
                hp_kwargs[key] = _parse_bool(raw)
            elif key == "prediction":
                if raw not in (SCALAR, LINEAR):
                    raise ValueError(f"must be '{SCALAR}' or '{LINEAR}'")
                hp_kwargs["prediction_kind"] = raw
            elif key == "learning_rule":
                if raw not in ("wh", "rls"):
                    raise ValueError("must be 'wh' or 'rls'")
                learning_rule = raw
            elif key == "condition":
                if raw != "ubr":
                    raise ValueError("only the 'ubr' interval condition is supported")
            elif key == "ga_selection":
                if raw not in ("tournament", "roulette"):
                    raise ValueError("must be 'tournament' or 'roulette'")
                hp_kwargs["ga_selection"] = raw
            elif key == "env":
                exp_kwargs["env"] = raw
            elif key == "mode":
                if raw not in ("standard", "er"):
                    raise ValueError("must be 'standard' or 'er'")
                exp_kwargs["mode"] = raw
            elif key == "teletransport":
                exp_kwargs["teletransport"] = _parse_bool(raw)
            elif key == "seed":
                exp_kwargs["base_seed"] = int(raw)
            elif key == "repetitions":
                exp_kwargs["repetitions"] = int(raw)
            elif key == "metric_window":
                exp_kwargs["metric_window"] = int(raw)
            elif key == "episode_limit":
                exp_kwargs["episode_limit"] = int(raw)
            elif key == "wbc_data":
                exp_kwargs["wbc_data"] = raw
            elif key == "sprite":
                exp_kwargs["sprite"] = raw
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    if "env" not in exp_kwargs:
        raise ConfigError("config is missing the 'env' key")
    try:
        hp = Hyperparameters(**hp_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    expected_rule = "rls" if hp.prediction_kind == LINEAR else "wh"
    if learning_rule is not None and learning_rule != expected_rule:
        raise ConfigError(
            f"learning_rule {learning_rule!r} does not fit prediction "
            f"{hp.prediction_kind!r} (expected {expected_rule!r})")
    return ExperimentConfig(hp=hp, **exp_kwargs)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value")
        if key in mapping:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def load_config(path: str | Path, overrides: dict[str, str] | None = None
                ) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    mapping = parse_config_text(path.read_text(), str(path))
    if overrides:
        mapping.update(overrides)
    return config_from_mapping(mapping)


def resolve_preset(name: str) -> Path:
    """A literal path wins; otherwise look the basename up in the packaged
    presets directory."""
    p = Path(name)
    if p.exists():
        return p
    base = p.stem if p.suffix else p.name
    packaged = Path(__file__).parent / "presets" / f"{base}.cfg"
    if packaged.exists():
        return packaged
    raise ConfigError(f"no config file at {name!r} and no packaged preset "
                      f"named {base!r}")


def default_wbc_path() -> str:
    data_dir = os.environ.get("XCSER_DATA_DIR", "data")
    return str(Path(data_dir) / "breast-cancer-wisconsin.data")
