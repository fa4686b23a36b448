import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from xcser import make_env, teletransport
from xcser.envs import (CartPole, MarioPixels, MountainCar, NChain,
                        RealMultiplexer, WbcParseError, load_sprite, load_wbc,
                        multiplexer_correct_action)


def rng(seed=0):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# real multiplexer
# ---------------------------------------------------------------------------

def mux_oracle(s):
    """Independent truth-table oracle: binarize, then look the answer up in
    an explicitly enumerated 6-bit table."""
    bits = tuple(int(v > 0.5) for v in s)
    table = {}
    for k in range(64):
        b = tuple((k >> (5 - j)) & 1 for j in range(6))
        addr = b[0] * 2 + b[1]
        table[b] = b[2 + addr]
    return table[bits]


class TestRealMultiplexer:
    def test_spec_example_address_00(self):
        s = [0.1, 0.2, 0.7, 0.3, 0.4, 0.9]
        assert multiplexer_correct_action(np.array(s)) == 1
        assert mux_oracle(s) == 1

    def test_spec_example_address_11(self):
        s = [0.9, 0.9, 0.1, 0.1, 0.1, 0.9]
        assert multiplexer_correct_action(np.array(s)) == 1
        assert mux_oracle(s) == 1

    def test_boundary_half_maps_to_zero_bit(self):
        s = np.array([0.5, 0.0, 1.0, 0.0, 0.0, 0.0])
        # the first bit is 0 at exactly 0.5, so the address is 00
        assert multiplexer_correct_action(s) == 1

    def test_oracle_equivalence_bulk(self):
        r = rng(1)
        states = r.uniform(0, 1, size=(100_000, 6))
        for s in states[:200]:
            assert multiplexer_correct_action(s) == mux_oracle(s)
        # vectorized equivalence over the full set
        bits = (states > 0.5).astype(int)
        addr = bits[:, 0] * 2 + bits[:, 1]
        expect = bits[np.arange(len(states)), 2 + addr]
        got = np.array([multiplexer_correct_action(s) for s in states])
        np.testing.assert_array_equal(got, expect)

    def test_reward_scheme(self):
        env = RealMultiplexer(rng(2))
        s = env.reset()
        correct = mux_oracle(s)
        step = env.step(correct)
        assert step.reward == 1000.0 and step.terminal
        s = env.reset()
        step = env.step(1 - mux_oracle(s))
        assert step.reward == 0.0 and step.terminal


# ---------------------------------------------------------------------------
# pixel-art classification
# ---------------------------------------------------------------------------

class TestMario:
    def test_sprite_has_seven_colors(self):
        grid = load_sprite()
        assert grid.shape == (16, 16)
        assert set(np.unique(grid)) == set(range(7))

    def test_corner_cell(self):
        env = MarioPixels(rng(0))
        assert env.cell(np.array([0.0, 0.0])) == (0, 0)
        assert env.correct_action(np.array([0.0, 0.0])) == int(env.grid[0, 0])

    def test_upper_boundary_clamped(self):
        env = MarioPixels(rng(0))
        assert env.cell(np.array([1.0, 1.0])) == (15, 15)

    def test_every_cell_reachable(self):
        env = MarioPixels(rng(3))
        draws = rng(4).uniform(0, 1, size=(1_000_000, 2))
        cx = np.minimum((draws[:, 0] * 16).astype(int), 15)
        cy = np.minimum((draws[:, 1] * 16).astype(int), 15)
        assert len(set(zip(cx.tolist(), cy.tolist()))) == 256

    def test_reward_for_correct_color(self):
        env = MarioPixels(rng(5))
        s = env.reset()
        assert env.step(env.correct_action(s)).reward == 1000.0
        s = env.reset()
        wrong = (env.correct_action(s) + 1) % 7
        assert env.step(wrong).reward == 0.0


# ---------------------------------------------------------------------------
# breast-cancer stream
# ---------------------------------------------------------------------------

WBC_SAMPLE = """\
1000025,5,1,1,1,2,1,3,1,1,2
1002945,5,4,4,5,7,10,3,2,1,2
1015425,3,1,1,1,2,2,3,1,1,2
1057013,8,4,5,1,2,?,7,3,1,4
1096800,10,10,10,8,6,1,8,9,1,4
"""


class TestWbc:
    def test_parse_drops_missing_rows(self, tmp_path):
        path = tmp_path / "wbc.data"
        path.write_text(WBC_SAMPLE)
        features, labels = load_wbc(path)
        assert features.shape == (4, 9)
        assert labels.tolist() == [0, 0, 0, 1]

    def test_normalization_endpoints(self, tmp_path):
        path = tmp_path / "wbc.data"
        path.write_text("1,1,10,1,1,1,1,1,1,1,2\n")
        features, _ = load_wbc(path)
        assert features[0, 0] == 0.0
        assert features[0, 1] == 1.0

    def test_class_mapping(self, tmp_path):
        path = tmp_path / "wbc.data"
        path.write_text("1,1,1,1,1,1,1,1,1,1,4\n2,1,1,1,1,1,1,1,1,1,2\n")
        _, labels = load_wbc(path)
        assert labels.tolist() == [1, 0]

    def test_malformed_row_names_line(self, tmp_path):
        path = tmp_path / "wbc.data"
        path.write_text("1,2,3\n")
        with pytest.raises(WbcParseError, match=":1"):
            load_wbc(path)

    def test_bad_class_label(self, tmp_path):
        path = tmp_path / "wbc.data"
        path.write_text("1,1,1,1,1,1,1,1,1,1,3\n")
        with pytest.raises(WbcParseError, match="class"):
            load_wbc(path)

    def test_missing_file_names_path(self, tmp_path):
        missing = tmp_path / "nope.data"
        with pytest.raises(FileNotFoundError, match="nope.data"):
            load_wbc(missing)

    def test_canonical_file_row_counts(self, wbc_data_path):
        # published file: 699 rows of which 16 carry the missing marker
        raw = wbc_data_path.read_text().strip().splitlines()
        assert len(raw) == 699
        assert sum("?" in line for line in raw) == 16
        features, labels = load_wbc(wbc_data_path)
        assert features.shape == (683, 9)
        assert set(labels.tolist()) == {0, 1}

    def test_stream_draws_rows(self, tmp_path):
        path = tmp_path / "wbc.data"
        path.write_text(WBC_SAMPLE)
        env = make_env("wbc", rng(1), wbc_path=path)
        s = env.reset()
        assert s.shape == (9,)
        assert env.step(int(env.labels[env._row])).reward == 1000.0


# ---------------------------------------------------------------------------
# chain walk
# ---------------------------------------------------------------------------

class TestNChain:
    def test_forward_at_end_stays_and_pays_large(self):
        env = NChain(rng(0), slip=0.0)
        env.reset()
        env.state = 15
        step = env.step(0)
        assert step.reward == 10.0
        assert env.state == 15

    def test_backward_returns_to_start_and_pays_small(self):
        env = NChain(rng(0), slip=0.0)
        env.reset()
        env.state = 7
        step = env.step(1)
        assert step.reward == 2.0
        assert env.state == 0
        np.testing.assert_allclose(step.next_state, [0.0])

    def test_forward_advances_without_reward(self):
        env = NChain(rng(0), slip=0.0)
        env.reset()
        step = env.step(0)
        assert step.reward == 0.0
        assert env.state == 1
        assert step.next_state[0] == pytest.approx(1 / 15)

    def test_optimal_episode_return_closed_form(self):
        env = NChain(rng(0), slip=0.0)
        env.reset()
        total = 0.0
        terminal = False
        steps = 0
        while not terminal:
            step = env.step(0)
            total += step.reward
            terminal = step.terminal
            steps += 1
        assert steps == 200
        assert total == 10.0 * (200 - 15)

    def test_slip_inverts_action_at_observed_rate(self):
        env = NChain(rng(7), slip=0.2)
        inversions = 0
        trials = 10_000
        for _ in range(trials):
            env.reset()
            env.state = 5
            step = env.step(0)
            if env.state == 0:  # backward executed although forward chosen
                inversions += 1
        sigma = math.sqrt(trials * 0.2 * 0.8)
        assert abs(inversions - 0.2 * trials) < 4 * sigma

    def test_episode_ends_only_by_cap(self):
        env = NChain(rng(1), slip=0.2)
        env.reset()
        for i in range(200):
            step = env.step(int(i % 2))
            assert step.terminal == (i == 199)


# ---------------------------------------------------------------------------
# cart-pole
# ---------------------------------------------------------------------------

def euler_oracle(raw, action):
    """Hand-written single Euler step, independent of the env code."""
    x, x_dot, theta, theta_dot = raw
    force = 10.0 if action == 1 else -10.0
    mc, mp, half = 1.0, 0.1, 0.5
    g, tau = 9.8, 0.02
    total = mc + mp
    pml = mp * half
    ct, st = math.cos(theta), math.sin(theta)
    temp = (force + pml * theta_dot ** 2 * st) / total
    th_acc = (g * st - ct * temp) / (half * (4.0 / 3.0 - mp * ct ** 2 / total))
    x_acc = temp - pml * th_acc * ct / total
    return np.array([x + tau * x_dot, x_dot + tau * x_acc,
                     theta + tau * theta_dot, theta_dot + tau * th_acc])


class TestCartPole:
    def test_midpoint_normalization(self):
        env = CartPole(rng(0))
        env.raw = np.zeros(4)
        np.testing.assert_allclose(env._obs(), [0.5, 0.5, 0.5, 0.5])

    def test_two_step_euler_matches_hand_integration(self):
        env = CartPole(rng(0))
        env.reset()
        env.raw = np.zeros(4)
        expected = euler_oracle(euler_oracle(np.zeros(4), 0), 1)
        env.step(0)
        env.step(1)
        np.testing.assert_allclose(env.raw, expected, atol=1e-12)

    def test_angle_failure_is_terminal_with_zero_reward(self):
        env = CartPole(rng(0))
        env.reset()
        env.raw = np.array([0.0, 0.0, 0.18, 3.0])  # falling fast
        step = env.step(1)
        while not step.terminal:
            step = env.step(1)
        assert step.reward == 0.0
        assert abs(env.raw[2]) > env.THETA_LIMIT or abs(env.raw[0]) > 2.4

    def test_episode_cap_pays_survival_reward(self):
        env = CartPole(rng(3), episode_limit=5)
        env.reset()
        env.raw = np.zeros(4)
        rewards = []
        for a in (0, 1, 0, 1, 0):
            step = env.step(a)
            rewards.append(step.reward)
        assert step.terminal
        assert rewards == [1.0] * 5

    def test_observations_within_unit_cube(self):
        env = CartPole(rng(4))
        s = env.reset()
        for i in range(300):
            assert np.all(s >= 0.0) and np.all(s <= 1.0)
            step = env.step(i % 2)
            s = step.next_state
            if step.terminal:
                s = env.reset()


# ---------------------------------------------------------------------------
# mountain car
# ---------------------------------------------------------------------------

def mcar_oracle_step(pos, vel, action):
    vel = vel + 0.001 * (action - 1) - 0.0025 * math.cos(3 * pos)
    vel = min(max(vel, -0.07), 0.07)
    pos = min(max(pos + vel, -1.2), 0.6)
    if pos <= -1.2 and vel < 0.0:
        vel = 0.0
    return pos, vel


class TestMountainCar:
    def test_goal_rule(self):
        env = MountainCar(rng(0))
        env.reset()
        env.position, env.velocity = 0.45, 0.07
        step = env.step(2)
        assert step.terminal and step.reward == 1000.0

    def test_wall_zeroes_velocity(self):
        env = MountainCar(rng(0))
        env.reset()
        env.position, env.velocity = -1.19, -0.07
        env.step(0)
        assert env.position == -1.2
        assert env.velocity == 0.0

    def test_trajectory_matches_reference(self):
        env = MountainCar(rng(1))
        env.reset()
        pos, vel = env.position, env.velocity
        for k in range(200):
            action = k % 3
            env.step(action)
            pos, vel = mcar_oracle_step(pos, vel, action)
            assert env.position == pytest.approx(pos, abs=1e-12)
            assert env.velocity == pytest.approx(vel, abs=1e-12)

    def test_sparse_reward_when_never_reaching_goal(self):
        env = MountainCar(rng(2))
        env.reset()
        total = 0.0
        step = None
        for _ in range(500):
            step = env.step(0)  # push left forever
            total += step.reward
        assert step.terminal
        assert total == 0.0


# ---------------------------------------------------------------------------
# teletransportation
# ---------------------------------------------------------------------------

class TestTeletransport:
    def test_nchain_reset_hits_all_states_uniformly(self):
        env = teletransport(NChain(rng(11)))
        trials = 100_000
        counts = np.zeros(16)
        for _ in range(trials):
            env.reset()
            counts[env.env.state] += 1
        expected = trials / 16
        sigma = math.sqrt(trials * (1 / 16) * (15 / 16))
        assert np.all(np.abs(counts - expected) < 4 * sigma)

    def test_cartpole_reset_uniform_over_bounds(self):
        env = teletransport(CartPole(rng(12)))
        raws = []
        for _ in range(4000):
            env.reset()
            raws.append(env.env.raw.copy())
        raws = np.array(raws)
        for dim in range(4):
            lo, hi = CartPole.BOUNDS[dim]
            unit = (raws[:, dim] - lo) / (hi - lo)
            _, p = scipy_stats.kstest(unit, "uniform")
            assert p > 1e-4

    def test_wrapper_leaves_plain_reset_untouched(self):
        base = NChain(rng(13))
        wrapped = teletransport(base)
        wrapped.reset()
        base.reset()
        assert base.state == 0  # plain reset still starts at the chain head

    def test_single_step_envs_cannot_be_wrapped(self):
        with pytest.raises(ValueError):
            teletransport(RealMultiplexer(rng(0)))

    def test_step_semantics_unchanged(self):
        base = NChain(rng(14), slip=0.0)
        wrapped = teletransport(base)
        wrapped.reset()
        base.state = 3
        step = wrapped.step(0)
        assert base.state == 4
        assert step.reward == 0.0


# ---------------------------------------------------------------------------
# shared contract
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["rmp6", "mario", "16chain", "cartpole",
                                  "mountaincar"])
def test_observations_stay_in_unit_cube(name):
    env = make_env(name, rng(21))
    s = env.reset()
    r = rng(22)
    for _ in range(500):
        assert np.all(s >= 0.0) and np.all(s <= 1.0)
        step = env.step(int(r.integers(env.spec.action_count)))
        s = step.next_state if not step.terminal else env.reset()


@pytest.mark.parametrize("name", ["rmp6", "mario", "16chain", "cartpole",
                                  "mountaincar"])
def test_trajectories_deterministic_per_seed(name):
    def trajectory(seed):
        env = make_env(name, rng(seed))
        out = []
        s = env.reset()
        act = rng(seed + 1000)
        for _ in range(200):
            step = env.step(int(act.integers(env.spec.action_count)))
            out.append((tuple(step.next_state), step.reward, step.terminal))
            s = step.next_state if not step.terminal else env.reset()
        return out

    assert trajectory(5) == trajectory(5)
