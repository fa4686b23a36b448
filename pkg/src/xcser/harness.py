"""Experiment orchestration: seeded repetitions, metric collection, persistence.

One repetition produces a RunLog with a per-step record stream
(t, episode, reward, explore, sys_err, macro, num_sum, generality) persisted
as one CSV, plus a summary entry. An experiment writes all repetition CSVs
and one summary JSON whose aggregates recompute exactly from the CSVs.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agent import Agent
from .envs import MULTI_STEP, make_env
from .params import Hyperparameters

CSV_COLUMNS = ("t", "episode", "reward", "explore", "sys_err", "macro",
               "num_sum", "generality")

DIVERGENCE_THRESHOLDS = {"16chain": 1.0, "cartpole": 70.0, "mountaincar": 200.0}

OTM_WINDOW = 100

RNG_STREAMS = {"action": 0, "ga": 1, "replay": 2, "env": 3}


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Per-concern generator: a fixed label picks an independent child stream."""
    return np.random.default_rng(np.random.SeedSequence((seed, RNG_STREAMS[label])))


@dataclass
class ExperimentConfig:
    env: str
    hp: Hyperparameters = field(default_factory=Hyperparameters)
    mode: str = "standard"
    teletransport: bool = False
    repetitions: int = 30
    base_seed: int = 1
    metric_window: int = 100
    episode_limit: int | None = None
    wbc_data: str | None = None
    sprite: str | None = None

    def seed_for(self, rep: int) -> int:
        return self.base_seed + rep

    def echo(self) -> dict:
        out = {
            "env": self.env,
            "mode": self.mode,
            "teletransport": self.teletransport,
            "repetitions": self.repetitions,
            "seed": self.base_seed,
            "metric_window": self.metric_window,
        }
        if self.episode_limit is not None:
            out["episode_limit"] = self.episode_limit
        if self.wbc_data is not None:
            out["wbc_data"] = str(self.wbc_data)
        if self.sprite is not None:
            out["sprite"] = str(self.sprite)
        hp = self.hp
        out.update({
            "max_learning_steps": hp.max_learning_steps,
            "N_max": hp.N_max, "beta": hp.beta, "gamma": hp.gamma,
            "alpha": hp.alpha, "epsilon0": hp.epsilon0, "nu": hp.nu,
            "theta_del": hp.theta_del, "delta": hp.delta,
            "theta_mna": hp.theta_mna, "p_ini": hp.p_ini,
            "epsilon_ini": hp.epsilon_ini, "F_ini": hp.F_ini,
            "mu": hp.mu, "chi": hp.chi, "theta_GA": hp.theta_GA,
            "theta_sub": hp.theta_sub, "ga_selection": hp.ga_selection,
            "F_reduce": hp.F_reduce, "epsilon_reduce": hp.epsilon_reduce,
            "condition": "ubr", "m0": hp.m0, "r0": hp.r0,
            "prediction": hp.prediction_kind,
            "learning_rule": "rls" if hp.prediction_kind == "linear" else "wh",
            "delta_RLS": hp.delta_RLS, "lambda_RLS": hp.lambda_RLS,
            "exploration_prob": hp.exploration_prob,
            "rm_capacity": hp.rm_capacity, "minibatch_m": hp.minibatch_m,
            "warmup_steps": hp.warmup_steps,
            "ga_tournament_tau": hp.ga_tournament_tau,
            "tournament_with_replacement": hp.tournament_with_replacement,
            "mutation_restricted": hp.mutation_restricted,
            "replay_with_replacement": hp.replay_with_replacement,
        })
        return out


class RunLog:
    """Per-step metric stream of one repetition plus episode returns."""

    def __init__(self, steps: int):
        self.t = np.arange(steps, dtype=np.int64)
        self.episode = np.zeros(steps, dtype=np.int64)
        self.reward = np.zeros(steps)
        self.explore = np.zeros(steps, dtype=np.int64)
        self.sys_err = np.full(steps, np.nan)
        self.macro = np.zeros(steps, dtype=np.int64)
        self.num_sum = np.zeros(steps, dtype=np.int64)
        self.generality = np.zeros(steps)
        self.episode_returns: list[float] = []
        self.episode_lengths: list[int] = []
        self.steps_recorded = 0
        self.summary: dict = {}

    # -- persistence --------------------------------------------------------

    def to_csv(self, path: Path, config_echo: dict) -> None:
        n = self.steps_recorded
        lines = ["# config: " + json.dumps(config_echo, sort_keys=True)]
        lines.append(",".join(CSV_COLUMNS))
        for i in range(n):
            err = "" if math.isnan(self.sys_err[i]) else repr(float(self.sys_err[i]))
            lines.append(
                f"{self.t[i]},{self.episode[i]},{float(self.reward[i])!r},"
                f"{self.explore[i]},{err},{self.macro[i]},{self.num_sum[i]},"
                f"{float(self.generality[i])!r}")
        path.write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: Path) -> "RunLog":
        raw = Path(path).read_text().splitlines()
        rows = [r for r in raw if r and not r.startswith("#")]
        header = rows[0].split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        body = rows[1:]
        log = cls(len(body))
        for i, row in enumerate(body):
            f = row.split(",")
            log.t[i] = int(f[0])
            log.episode[i] = int(f[1])
            log.reward[i] = float(f[2])
            log.explore[i] = int(f[3])
            log.sys_err[i] = float(f[4]) if f[4] else np.nan
            log.macro[i] = int(f[5])
            log.num_sum[i] = int(f[6])
            log.generality[i] = float(f[7])
        log.steps_recorded = len(body)
        log._rebuild_episode_returns()
        return log

    def _rebuild_episode_returns(self) -> None:
        n = self.steps_recorded
        self.episode_returns, self.episode_lengths = [], []
        if n == 0:
            return
        current = self.episode[0]
        acc, length = 0.0, 0
        for i in range(n):
            if self.episode[i] != current:
                self.episode_returns.append(acc)
                self.episode_lengths.append(length)
                current = self.episode[i]
                acc, length = 0.0, 0
            acc += self.reward[i]
            length += 1
        # trailing group: may be a truncated episode (the CSV cannot tell);
        # the summary JSON carries the authoritative completed-episode count
        self.episode_returns.append(acc)
        self.episode_lengths.append(length)


def sliding_mean(values, window: int):
    """Mean of the trailing ``window`` values (all values when fewer)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return math.nan
    return float(values[-window:].mean())


def otm_series(episode_returns, window: int = OTM_WINDOW) -> np.ndarray:
    """Sliding window mean of per-episode return; partial windows use the
    episodes available so far."""
    returns = np.asarray(episode_returns, dtype=np.float64)
    out = np.empty(returns.size)
    csum = np.concatenate(([0.0], np.cumsum(returns)))
    for i in range(returns.size):
        lo = max(0, i + 1 - window)
        out[i] = (csum[i + 1] - csum[lo]) / (i + 1 - lo)
    return out


def otm_final(episode_returns, window: int = OTM_WINDOW):
    if len(episode_returns) == 0:
        return math.nan
    return sliding_mean(episode_returns, window)


def diverged(otm_value: float, env_name: str) -> bool:
    """A run diverged when its final OTM fell strictly below the task bar."""
    threshold = DIVERGENCE_THRESHOLDS.get(env_name)
    if threshold is None:
        raise ValueError(f"no divergence threshold defined for {env_name!r}")
    return bool(otm_value < threshold)


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def run_repetition(cfg: ExperimentConfig, seed: int) -> RunLog:
    """One seeded run of max_learning_steps environment steps (episodes
    chained); deterministic for a fixed (cfg, seed)."""
    env = make_env(cfg.env, rng_for(seed, "env"),
                   teletransported=cfg.teletransport,
                   wbc_path=cfg.wbc_data, episode_limit=cfg.episode_limit,
                   sprite_path=cfg.sprite)
    agent = Agent(cfg.hp, env.spec.state_dim, env.spec.action_count, cfg.mode,
                  action_rng=rng_for(seed, "action"),
                  ga_rng=rng_for(seed, "ga"),
                  replay_rng=rng_for(seed, "replay"))
    steps = cfg.hp.max_learning_steps
    log = RunLog(steps)
    corrupt, diagnostic = False, ""
    episode = 0
    ep_return, ep_len = 0.0, 0
    s = env.reset()
    try:
        for i in range(steps):
            rec = agent.step(env, s, record_index=i)
            log.episode[i] = episode
            log.reward[i] = rec.reward
            log.explore[i] = 1 if rec.explored else 0
            log.macro[i] = agent.pop.n
            log.num_sum[i] = agent.pop.num_sum
            log.generality[i] = agent.pop.generality()
            for idx, err in agent.completed_errors:
                log.sys_err[idx] = err
            agent.completed_errors.clear()
            log.steps_recorded = i + 1
            ep_return += rec.reward
            ep_len += 1
            if rec.terminal:
                log.episode_returns.append(ep_return)
                log.episode_lengths.append(ep_len)
                episode += 1
                ep_return, ep_len = 0.0, 0
                s = env.reset()
            else:
                s = rec.next_state
    except Exception as exc:  # noqa: BLE001 - corrupt runs carry diagnostics
        corrupt, diagnostic = True, f"{type(exc).__name__}: {exc}"

    exploit = log.explore[:log.steps_recorded] == 0
    rewards_exploit = log.reward[:log.steps_recorded][exploit]
    errs = log.sys_err[:log.steps_recorded][exploit]
    errs = errs[~np.isnan(errs)]
    n = log.steps_recorded
    otm = otm_final(log.episode_returns)
    is_multi = env.spec.kind == MULTI_STEP
    if is_multi:
        div = True if math.isnan(otm) else diverged(otm, cfg.env)
    else:
        div = None
    summary = {
        "seed": seed,
        "steps": n,
        "episodes": len(log.episode_returns),
        "reward_final": _finite_or_none(sliding_mean(rewards_exploit,
                                                     cfg.metric_window)),
        "sys_err_final": _finite_or_none(sliding_mean(errs, cfg.metric_window)),
        # whole-run means (exploit steps): the learning-period averages the
        # result tables report, sensitive to early-phase speed and warm-up
        "reward_overall": _finite_or_none(rewards_exploit.mean())
                          if rewards_exploit.size else None,
        "sys_err_overall": _finite_or_none(errs.mean()) if errs.size else None,
        "macro_overall": _finite_or_none(log.macro[:n].mean()) if n else None,
        "generality_overall": _finite_or_none(log.generality[:n].mean())
                              if n else None,
        "macro_final": int(log.macro[n - 1]) if n else None,
        "num_sum_final": int(log.num_sum[n - 1]) if n else None,
        "generality_final": _finite_or_none(log.generality[n - 1]) if n else None,
        "otm_final": _finite_or_none(otm),
        "diverged": div,
        "ga_invocations": agent.counters.ga_invocations,
        "updates": agent.counters.updates,
        "rls_resets": agent.counters.rls_resets,
        "replayed": agent.counters.replayed,
        "replay_skips": agent.counters.replay_skips,
        "corrupt": corrupt,
        "diagnostic": diagnostic,
    }
    for key in ("reward_final", "macro_final", "generality_final"):
        if not corrupt and summary[key] is None:
            summary["corrupt"] = True
            summary["diagnostic"] = f"non-finite metric {key}"
            break
    log.summary = summary
    return log


AGGREGATE_METRICS = ("reward_final", "sys_err_final", "macro_final",
                     "generality_final", "otm_final", "reward_overall",
                     "sys_err_overall", "macro_overall", "generality_overall")


def aggregate(summaries: list[dict]) -> dict:
    """Mean and sample SD per metric over the non-corrupt repetitions."""
    out = {}
    usable = [s for s in summaries if not s.get("corrupt")]
    for metric in AGGREGATE_METRICS:
        vals = np.array([s[metric] for s in usable if s.get(metric) is not None],
                        dtype=np.float64)
        if vals.size == 0:
            out[metric] = {"mean": None, "sd": None, "n": 0}
        else:
            sd = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            out[metric] = {"mean": float(vals.mean()), "sd": sd,
                           "n": int(vals.size)}
    return out


def _rep_task(args) -> dict:
    cfg, rep, outdir = args
    seed = cfg.seed_for(rep)
    log = run_repetition(cfg, seed)
    if outdir is not None:
        log.to_csv(Path(outdir) / f"rep_{rep:03d}.csv", cfg.echo())
    return log.summary


def run_experiment(cfg: ExperimentConfig, outdir: str | Path,
                   jobs: int = 1) -> dict:
    """Run all repetitions, write one CSV per repetition plus summary.json;
    returns the summary document."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tasks = [(cfg, rep, outdir) for rep in range(cfg.repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_rep_task, tasks))
    else:
        summaries = [_rep_task(t) for t in tasks]
    divergences = sum(1 for s in summaries if s.get("diverged"))
    doc = {
        "schema_version": 1,
        "config": cfg.echo(),
        "repetitions": summaries,
        "aggregate": aggregate(summaries),
        "divergences": divergences,
        "corrupt_count": sum(1 for s in summaries if s.get("corrupt")),
    }
    (outdir / "summary.json").write_text(json.dumps(doc, indent=2,
                                                    sort_keys=True) + "\n")
    return doc
