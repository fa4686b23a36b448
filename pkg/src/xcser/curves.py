"""Aggregate repetition logs into plot-ready mean/SD curve tables."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .harness import OTM_WINDOW, RunLog, otm_series

STEP_METRICS = ("reward", "sys_err", "macro", "num_sum", "generality")
EPISODE_METRICS = ("otm",)
ALL_METRICS = STEP_METRICS + EPISODE_METRICS


def _forward_fill(values: np.ndarray) -> np.ndarray:
    """Propagate the last finite value forward (leading gaps stay NaN)."""
    idx = np.where(np.isnan(values), -1, np.arange(values.size))
    np.maximum.accumulate(idx, out=idx)
    out = np.where(idx >= 0, values[np.maximum(idx, 0)], np.nan)
    return out


def _windowed_over_samples(values: np.ndarray, sample_mask: np.ndarray,
                           window: int) -> np.ndarray:
    """Sliding mean over the last ``window`` masked samples, evaluated at
    every step (forward-filled between samples)."""
    out = np.full(values.size, np.nan)
    pos = np.nonzero(sample_mask)[0]
    if pos.size == 0:
        return out
    samples = values[pos]
    csum = np.concatenate(([0.0], np.cumsum(samples)))
    k = np.arange(1, pos.size + 1)
    lo = np.maximum(0, k - window)
    means = (csum[k] - csum[lo]) / (k - lo)
    out[pos] = means
    return _forward_fill(out)


def step_metric_series(log: RunLog, metric: str, window: int) -> np.ndarray:
    n = log.steps_recorded
    exploit = log.explore[:n] == 0
    if metric == "reward":
        return _windowed_over_samples(log.reward[:n], exploit, window)
    if metric == "sys_err":
        mask = exploit & ~np.isnan(log.sys_err[:n])
        return _windowed_over_samples(np.nan_to_num(log.sys_err[:n]), mask, window)
    if metric == "macro":
        return log.macro[:n].astype(np.float64)
    if metric == "num_sum":
        return log.num_sum[:n].astype(np.float64)
    if metric == "generality":
        return log.generality[:n].copy()
    raise ValueError(f"unknown step metric {metric!r}")


def _load_experiment(exp_dir: Path) -> tuple[dict, list[RunLog]]:
    summary_path = exp_dir / "summary.json"
    if not summary_path.exists():
        raise FileNotFoundError(f"no summary.json in {exp_dir}")
    summary = json.loads(summary_path.read_text())
    logs = [RunLog.from_csv(p) for p in sorted(exp_dir.glob("rep_*.csv"))]
    if not logs:
        raise FileNotFoundError(f"no rep_*.csv files in {exp_dir}")
    return summary, logs


def _mean_sd(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # columns with fewer than 2 finite samples get NaN sd (empty CSV cell)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mean = np.nanmean(stack, axis=0)
        sd = (np.nanstd(stack, axis=0, ddof=1) if stack.shape[0] > 1
              else np.zeros(stack.shape[1]))
    return mean, sd


def aggregate_metric(exp_dirs: list[Path], metric: str, window: int,
                     stride: int = 1) -> tuple[np.ndarray, dict[str, dict]]:
    """Per-experiment mean/SD series on a common x grid.

    Step metrics align on the step index (truncated to the shortest run);
    the episode metric aligns on the episode index (truncated to the
    fewest completed episodes).
    """
    columns: dict[str, dict] = {}
    lengths = []
    per_dir: list[np.ndarray] = []
    for exp_dir in exp_dirs:
        _, logs = _load_experiment(exp_dir)
        if metric == "otm":
            series = [otm_series(lg.episode_returns, OTM_WINDOW) for lg in logs]
        else:
            series = [step_metric_series(lg, metric, window) for lg in logs]
        min_len = min(s.size for s in series)
        stack = np.stack([s[:min_len] for s in series])
        per_dir.append(stack)
        lengths.append(min_len)
    common = min(lengths)
    x = np.arange(common)[::stride]
    for exp_dir, stack in zip(exp_dirs, per_dir):
        mean, sd = _mean_sd(stack[:, :common])
        columns[exp_dir.name] = {"mean": mean[::stride], "sd": sd[::stride]}
    return x, columns


def write_curve_csv(path: Path, x: np.ndarray, columns: dict[str, dict],
                    metric: str, window: int) -> None:
    labels = list(columns)
    header = ["x"]
    for label in labels:
        header += [f"{label}_mean", f"{label}_sd"]
    lines = [f"# metric: {metric}; window: {window}", ",".join(header)]
    for i in range(x.size):
        cells = [str(int(x[i]))]
        for label in labels:
            m = columns[label]["mean"][i]
            s = columns[label]["sd"][i]
            cells.append("" if math.isnan(m) else repr(float(m)))
            cells.append("" if math.isnan(s) else repr(float(s)))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
