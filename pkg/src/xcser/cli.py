"""Command line entry point: run experiments, compare results, export curves."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import curves as curves_mod
from . import stats as stats_mod
from .config import (ConfigError, default_wbc_path, load_config,
                     resolve_preset)

METRIC_KEYS = {
    "reward": "reward_final",
    "sys_err": "sys_err_final",
    "macro": "macro_final",
    "generality": "generality_final",
    "otm": "otm_final",
    "reward_overall": "reward_overall",
    "sys_err_overall": "sys_err_overall",
    "macro_overall": "macro_overall",
    "generality_overall": "generality_overall",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xcser",
        description="XCS / XCS-ER experiments on the benchmark suite")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run all repetitions of one experiment")
    run.add_argument("config", help="config file path or packaged preset name "
                     "(rmp6, mario, wbc, 16chain, cartpole, mountaincar)")
    run.add_argument("--mode", choices=["standard", "er"])
    run.add_argument("--repetitions", type=int)
    run.add_argument("--steps", type=int, help="override max_learning_steps")
    run.add_argument("--seed", type=int, help="override the base seed")
    run.add_argument("--teletransport", choices=["on", "off"])
    run.add_argument("--jobs", type=int, default=1,
                     help="worker processes for repetitions")
    run.add_argument("--out", help="output directory "
                     "(default runs/<config>__<mode>[__tele])")
    run.add_argument("--data-dir",
                     help="directory holding breast-cancer-wisconsin.data")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override any config key")

    cmp_ = sub.add_parser("compare", help="significance table for two runs")
    cmp_.add_argument("baseline_dir")
    cmp_.add_argument("treatment_dir")
    cmp_.add_argument("--metrics", nargs="+", default=None,
                      choices=sorted(METRIC_KEYS),
                      help="default: every metric present in both summaries")
    cmp_.add_argument("--out", help="directory for comparison.csv/.txt "
                      "(default: treatment dir)")

    cur = sub.add_parser("curves", help="aggregate rep logs into mean/SD curves")
    cur.add_argument("experiment_dirs", nargs="+")
    cur.add_argument("--metrics", nargs="+", default=list(curves_mod.ALL_METRICS),
                     choices=list(curves_mod.ALL_METRICS))
    cur.add_argument("--window", type=int, default=100,
                     help="sliding window (exploit samples) for reward/sys_err")
    cur.add_argument("--stride", type=int, default=1,
                     help="keep every n-th row of step curves")
    cur.add_argument("--out", default="curves", help="output directory")
    return parser


def cmd_run(args) -> int:
    from .harness import run_experiment

    try:
        path = resolve_preset(args.config)
        overrides: dict[str, str] = {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, _, value = item.partition("=")
            overrides[key.strip()] = value.strip()
        if args.mode:
            overrides["mode"] = args.mode
        if args.repetitions is not None:
            overrides["repetitions"] = str(args.repetitions)
        if args.steps is not None:
            overrides["max_learning_steps"] = str(args.steps)
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        if args.teletransport is not None:
            overrides["teletransport"] = args.teletransport
        cfg = load_config(path, overrides)
        if cfg.env == "wbc" and cfg.wbc_data is None:
            if args.data_dir:
                cfg.wbc_data = str(Path(args.data_dir)
                                   / "breast-cancer-wisconsin.data")
            else:
                cfg.wbc_data = default_wbc_path()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.out:
        outdir = Path(args.out)
    else:
        tag = f"{Path(args.config).stem}__{cfg.mode}"
        if cfg.teletransport:
            tag += "__tele"
        outdir = Path("runs") / tag
    try:
        doc = run_experiment(cfg, outdir, jobs=max(1, args.jobs))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    corrupt = doc["corrupt_count"]
    print(f"wrote {cfg.repetitions} repetition logs + summary.json to {outdir}")
    for metric, agg in doc["aggregate"].items():
        if agg["mean"] is not None:
            print(f"  {metric}: {agg['mean']:.4g} +- {agg['sd']:.4g} (n={agg['n']})")
    print(f"  divergences: {doc['divergences']}")
    if corrupt:
        print(f"error: {corrupt} corrupt repetition(s); see summary.json "
              f"diagnostics", file=sys.stderr)
        return 1
    return 0


def _paired_metric(summary: dict, key: str) -> list:
    return [rep.get(key) for rep in summary["repetitions"]]


def cmd_compare(args) -> int:
    base_path = Path(args.baseline_dir) / "summary.json"
    treat_path = Path(args.treatment_dir) / "summary.json"
    for p in (base_path, treat_path):
        if not p.exists():
            print(f"error: missing {p}", file=sys.stderr)
            return 2
    base = json.loads(base_path.read_text())
    treat = json.loads(treat_path.read_text())
    n_base = len(base["repetitions"])
    n_treat = len(treat["repetitions"])
    if n_base != n_treat:
        print(f"error: mismatched repetition counts ({n_base} vs {n_treat})",
              file=sys.stderr)
        return 2
    metrics = args.metrics
    if metrics is None:
        metrics = [m for m, key in METRIC_KEYS.items()
                   if any(r.get(key) is not None for r in base["repetitions"])
                   and any(r.get(key) is not None for r in treat["repetitions"])]
    rows = []
    for metric in metrics:
        key = METRIC_KEYS[metric]
        xs = _paired_metric(treat, key)
        ys = _paired_metric(base, key)
        pairs = [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None]
        if len(pairs) < 3:
            print(f"warning: metric {metric}: only {len(pairs)} usable pairs, "
                  f"skipped", file=sys.stderr)
            continue
        t_vals = [p[0] for p in pairs]
        b_vals = [p[1] for p in pairs]
        rows.append(stats_mod.compare(b_vals, t_vals, metric=metric))
    outdir = Path(args.out) if args.out else Path(args.treatment_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_text = stats_mod.comparison_csv(rows)
    txt = stats_mod.comparison_text(rows,
                                    baseline_label=Path(args.baseline_dir).name,
                                    treatment_label=Path(args.treatment_dir).name)
    (outdir / "comparison.csv").write_text(csv_text)
    (outdir / "comparison.txt").write_text(txt)
    print(txt, end="")
    return 0


def cmd_curves(args) -> int:
    dirs = [Path(d) for d in args.experiment_dirs]
    for d in dirs:
        if not (d / "summary.json").exists():
            print(f"error: {d} has no summary.json", file=sys.stderr)
            return 2
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for metric in args.metrics:
        try:
            x, columns = curves_mod.aggregate_metric(dirs, metric, args.window,
                                                     args.stride)
        except (FileNotFoundError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        path = outdir / f"curve_{metric}.csv"
        curves_mod.write_curve_csv(path, x, columns, metric, args.window)
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "compare":
        return cmd_compare(args)
    if args.command == "curves":
        return cmd_curves(args)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
