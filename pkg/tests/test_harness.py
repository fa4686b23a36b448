import json
import math
import numpy as np
import pytest

from xcser import ExperimentConfig, Hyperparameters, RunLog, run_repetition
from xcser.harness import (aggregate, diverged, otm_final, otm_series,
                           run_experiment, sliding_mean)


def small_cfg(mode="standard", steps=600, env="rmp6", **kw):
    hp = Hyperparameters(N_max=200, theta_GA=12, r0=1.0, gamma=0.0,
                         max_learning_steps=steps, warmup_steps=100,
                         rm_capacity=1000)
    return ExperimentConfig(env=env, hp=hp, mode=mode, repetitions=2, **kw)


class TestWindows:
    def test_sliding_mean_example(self):
        assert sliding_mean([0.0, 200.0], 100) == 100.0

    def test_sliding_mean_uses_trailing_window(self):
        vals = list(range(200))
        assert sliding_mean(vals, 100) == np.mean(range(100, 200))

    def test_empty_is_nan(self):
        assert math.isnan(sliding_mean([], 100))


class TestOtm:
    def test_constant_returns(self):
        series = otm_series([150.0] * 250)
        assert np.all(series[100:] == 150.0)
        assert otm_final([150.0] * 250) == 150.0

    def test_partial_window_rule(self):
        assert otm_final([10.0, 20.0, 30.0]) == pytest.approx(20.0)

    def test_arithmetic_series(self):
        returns = [float(i) for i in range(200)]
        assert otm_final(returns) == pytest.approx(149.5)
        series = otm_series(returns)
        assert series[99] == pytest.approx(np.mean(range(100)))
        assert series[-1] == pytest.approx(149.5)


class TestDiverged:
    def test_paper_reference_points(self):
        assert diverged(29.0, "mountaincar")          # paper's XCS M.Car run
        assert not diverged(138.6, "16chain")         # paper's XCS 16Chain
        assert diverged(0.5, "16chain")

    def test_threshold_is_strictly_below(self):
        assert not diverged(1.0, "16chain")
        assert not diverged(70.0, "cartpole")
        assert not diverged(200.0, "mountaincar")
        assert diverged(199.999, "mountaincar")

    def test_unknown_env_rejected(self):
        with pytest.raises(ValueError):
            diverged(10.0, "rmp6")


class TestRunRepetition:
    def test_records_one_row_per_step(self):
        log = run_repetition(small_cfg(steps=250), seed=5)
        assert log.steps_recorded == 250
        assert log.summary["steps"] == 250
        assert not log.summary["corrupt"]

    def test_deterministic_summaries(self):
        a = run_repetition(small_cfg(steps=300), seed=9).summary
        b = run_repetition(small_cfg(steps=300), seed=9).summary
        assert a == b

    def test_er_warmup_freeze_visible_in_summary(self):
        cfg = small_cfg(mode="er", steps=90)
        cfg.hp = cfg.hp.copy(warmup_steps=1000)
        log = run_repetition(cfg, seed=1)
        assert log.summary["updates"] == 0
        assert log.summary["ga_invocations"] == 0

    def test_corrupt_run_carries_diagnostic(self, monkeypatch):
        from xcser import agent as agent_mod

        calls = {"n": 0}
        original = agent_mod.Agent.step_standard

        def explode(self, env, s, record_index):
            calls["n"] += 1
            if calls["n"] > 3:
                raise RuntimeError("injected fault")
            return original(self, env, s, record_index)

        monkeypatch.setattr(agent_mod.Agent, "step_standard", explode)
        log = run_repetition(small_cfg(steps=50), seed=0)
        assert log.summary["corrupt"]
        assert "injected fault" in log.summary["diagnostic"]
        assert log.steps_recorded == 3


class TestPersistence:
    def test_csv_roundtrip_and_byte_identical_rerun(self, tmp_path):
        cfg = small_cfg(steps=200)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_experiment(cfg, out1, jobs=1)
        run_experiment(cfg, out2, jobs=1)
        for rep in range(cfg.repetitions):
            f1 = (out1 / f"rep_{rep:03d}.csv").read_bytes()
            f2 = (out2 / f"rep_{rep:03d}.csv").read_bytes()
            assert f1 == f2
        assert ((out1 / "summary.json").read_bytes()
                == (out2 / "summary.json").read_bytes())

    def test_csv_header_and_config_echo(self, tmp_path):
        cfg = small_cfg(steps=120)
        run_experiment(cfg, tmp_path / "exp", jobs=1)
        lines = (tmp_path / "exp" / "rep_000.csv").read_text().splitlines()
        assert lines[0].startswith("# config: ")
        echo = json.loads(lines[0][len("# config: "):])
        assert echo["beta"] == 0.2
        assert echo["env"] == "rmp6"
        assert lines[1] == "t,episode,reward,explore,sys_err,macro,num_sum,generality"
        assert len(lines) == 2 + 120

    def test_aggregates_recompute_from_persisted_logs(self, tmp_path):
        cfg = small_cfg(steps=400)
        doc = run_experiment(cfg, tmp_path / "exp", jobs=1)
        logs = [RunLog.from_csv(p)
                for p in sorted((tmp_path / "exp").glob("rep_*.csv"))]
        finals = []
        for log in logs:
            n = log.steps_recorded
            exploit = log.explore[:n] == 0
            finals.append(sliding_mean(log.reward[:n][exploit],
                                       cfg.metric_window))
        agg = doc["aggregate"]["reward_final"]
        assert agg["mean"] == pytest.approx(np.mean(finals))
        sd = np.std(finals, ddof=1)
        assert agg["sd"] == pytest.approx(sd)

    def test_parallel_jobs_match_serial(self, tmp_path):
        cfg = small_cfg(steps=150)
        serial = run_experiment(cfg, tmp_path / "s", jobs=1)
        parallel = run_experiment(cfg, tmp_path / "p", jobs=2)
        assert serial["aggregate"] == parallel["aggregate"]
        for rep in range(cfg.repetitions):
            assert ((tmp_path / "s" / f"rep_{rep:03d}.csv").read_bytes()
                    == (tmp_path / "p" / f"rep_{rep:03d}.csv").read_bytes())

    def test_multistep_summary_has_otm_and_divergence(self, tmp_path):
        hp = Hyperparameters(gamma=0.9, epsilon0=0.1, epsilon_ini=10,
                             theta_GA=50, theta_sub=200, r0=0.2,
                             exploration_prob=0.3, max_learning_steps=1200,
                             N_max=300)
        cfg = ExperimentConfig(env="16chain", hp=hp, mode="standard",
                               repetitions=1)
        doc = run_experiment(cfg, tmp_path / "chain", jobs=1)
        rep = doc["repetitions"][0]
        assert rep["otm_final"] is not None
        assert rep["diverged"] in (True, False)
        assert rep["episodes"] == 6  # 1200 steps / 200-step episodes

    def test_episode_returns_sum_of_step_rewards(self, tmp_path):
        hp = Hyperparameters(gamma=0.9, exploration_prob=0.3,
                             max_learning_steps=450, N_max=200)
        cfg = ExperimentConfig(env="16chain", hp=hp, repetitions=1)
        run_experiment(cfg, tmp_path / "c", jobs=1)
        log = RunLog.from_csv(tmp_path / "c" / "rep_000.csv")
        # completed episodes: groups of 200 rows with matching reward sums
        first = log.reward[:450][log.episode[:450] == 0].sum()
        assert log.episode_returns[0] == pytest.approx(first)
