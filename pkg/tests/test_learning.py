import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcser import (Hyperparameters, Population, accuracy, compute_payoff,
                   prediction_array, relative_accuracies, rls_update,
                   update_action_set)
from xcser.classifier import Classifier, Condition


def rule(action=0, pred=0.0, eps=0.0, fit=0.01, num=1, lo=0.0, hi=1.0):
    return Classifier(condition=Condition(np.array([lo]), np.array([hi])),
                      action=action, prediction=pred, error=eps, fitness=fit,
                      numerosity=num)


class TestAccuracy:
    def test_below_threshold_is_one(self):
        assert accuracy(0.05, Hyperparameters(epsilon0=0.1)) == 1.0

    def test_at_threshold_equals_alpha(self):
        hp = Hyperparameters(alpha=0.1, epsilon0=10, nu=5)
        assert accuracy(10.0, hp) == pytest.approx(0.1)

    def test_double_threshold(self):
        hp = Hyperparameters(alpha=0.1, epsilon0=10, nu=5)
        assert accuracy(20.0, hp) == pytest.approx(0.003125)

    @given(st.floats(0, 1000), st.floats(0, 1000))
    @settings(max_examples=200, deadline=None)
    def test_monotone_non_increasing(self, e1, e2):
        hp = Hyperparameters(alpha=0.1, epsilon0=10, nu=5)
        lo, hi = sorted((e1, e2))
        assert accuracy(lo, hp) >= accuracy(hi, hp)

    def test_relative_accuracies_sum_to_one(self):
        hp = Hyperparameters()
        rel = relative_accuracies([0.0, 5.0, 50.0], [1, 2, 3], hp)
        assert rel.sum() == pytest.approx(1.0)
        rel2 = relative_accuracies([3.0], [4], hp)
        assert rel2.sum() == pytest.approx(1.0)


class TestUpdateActionSet:
    def test_single_rule_widrow_hoff(self):
        hp = Hyperparameters(beta=0.2, epsilon0=10)
        pop = Population(1, hp)
        pop.insert(rule(pred=0.0, eps=0.0))
        update_action_set(pop, np.array([0]), 1000.0, np.array([0.5]), hp)
        assert pop.pred[0] == pytest.approx(200.0)
        assert pop.eps[0] == pytest.approx(200.0)
        assert pop.exp[0] == 1

    def test_error_update_uses_prediction_before_update(self):
        hp = Hyperparameters(beta=0.5, epsilon0=1.0)
        pop = Population(1, hp)
        pop.insert(rule(pred=100.0, eps=0.0))
        update_action_set(pop, np.array([0]), 200.0, np.array([0.5]), hp)
        # |200 - 100| = 100, not |200 - 150|
        assert pop.eps[0] == pytest.approx(50.0)
        assert pop.pred[0] == pytest.approx(150.0)

    def test_action_set_size_moves_toward_numerosity_sum(self):
        hp = Hyperparameters(beta=0.2)
        pop = Population(1, hp)
        pop.insert(rule(num=2))
        pop.insert(rule(num=3))
        update_action_set(pop, np.array([0, 1]), 0.0, np.array([0.5]), hp)
        assert pop.asz[0] == pytest.approx(1.0 + 0.2 * (5 - 1.0))

    def test_prediction_between_old_and_target(self):
        rng = np.random.default_rng(0)
        hp = Hyperparameters(beta=0.3)
        pop = Population(1, hp)
        pop.insert(rule(pred=float(rng.uniform(0, 1000))))
        for _ in range(50):
            target = float(rng.uniform(0, 1000))
            old = float(pop.pred[0])
            update_action_set(pop, np.array([0]), target, np.array([0.5]), hp)
            lo, hi = sorted((old, target))
            assert lo - 1e-9 <= pop.pred[0] <= hi + 1e-9

    def test_fitness_stays_in_unit_interval(self):
        rng = np.random.default_rng(1)
        hp = Hyperparameters(beta=0.2, epsilon0=10)
        pop = Population(1, hp)
        for _ in range(4):
            pop.insert(rule(pred=500.0, num=int(rng.integers(1, 4))))
        rows = np.arange(4)
        for _ in range(300):
            update_action_set(pop, rows, float(rng.uniform(0, 1000)),
                              np.array([0.5]), hp)
            assert np.all(pop.fit[:4] > 0.0)
            assert np.all(pop.fit[:4] <= 1.0)


class TestComputePayoff:
    def _pa(self, mapping):
        pop = Population(1, Hyperparameters())
        for a, p in mapping.items():
            pop.insert(rule(action=a, pred=p, fit=0.5))
        return prediction_array(pop, np.arange(len(pop)), np.array([0.5]),
                                max(mapping) + 1)

    def test_terminal(self):
        assert compute_payoff(1000.0, None, 0.9) == 1000.0

    def test_discounted_maximum(self):
        pa = self._pa({0: 100.0, 1: 200.0})
        assert compute_payoff(0.0, pa, 0.9) == pytest.approx(180.0)

    def test_gamma_zero_is_myopic(self):
        pa = self._pa({0: 700.0, 1: 900.0})
        assert compute_payoff(42.0, pa, 0.0) == pytest.approx(42.0)


class TestRls:
    def test_scalar_hand_calculation(self):
        hp = Hyperparameters(prediction_kind="linear", lambda_RLS=1.0,
                             delta_RLS=1.0)
        cl = rule()
        cl.weights = np.array([0.0])
        cl.gain = np.array([[1.0]])
        reset = rls_update(cl, np.empty(0), 4.0, hp)
        assert not reset
        assert cl.weights[0] == pytest.approx(2.0)
        assert cl.gain[0, 0] == pytest.approx(0.5)

    def test_zero_residual_leaves_weights(self):
        hp = Hyperparameters(prediction_kind="linear")
        cl = rule()
        cl.weights = np.array([3.0, 1.0])
        cl.gain = np.eye(2) * 10.0
        s = np.array([0.25])
        target = cl.predict(s)
        rls_update(cl, s, target, hp)
        np.testing.assert_allclose(cl.weights, [3.0, 1.0], atol=1e-12)

    def test_matches_normal_equations_oracle(self):
        # independent oracle: least squares on the visited samples
        rng = np.random.default_rng(5)
        d = 3
        hp = Hyperparameters(prediction_kind="linear", lambda_RLS=1.0,
                             delta_RLS=1e10)
        cl = rule()
        cl.weights = np.zeros(d + 1)
        cl.gain = np.eye(d + 1) * hp.delta_RLS
        xs, ys = [], []
        for k in range(d + 1):
            s = rng.uniform(0, 1, d)
            target = float(rng.uniform(-5, 5))
            xs.append(np.concatenate(([1.0], s)))
            ys.append(target)
            rls_update(cl, s, target, hp)
            X = np.array(xs)
            w_ls, *_ = np.linalg.lstsq(X, np.array(ys), rcond=None)
            np.testing.assert_allclose(cl.weights, w_ls, atol=1e-8)

    def test_non_finite_resets_gain(self):
        hp = Hyperparameters(prediction_kind="linear", delta_RLS=2.0)
        cl = rule()
        cl.weights = np.array([0.0, 0.0])
        cl.gain = np.full((2, 2), 1e308)
        reset = rls_update(cl, np.array([0.5]), 1.0, hp)
        assert reset
        np.testing.assert_array_equal(cl.gain, np.eye(2) * 2.0)
        assert np.all(np.isfinite(cl.weights))

    def test_population_update_matches_single_rule_updates(self):
        hp = Hyperparameters(prediction_kind="linear", beta=0.2,
                             epsilon0=1.0, delta_RLS=5.0)
        pop = Population(2, hp)
        mirror = []
        rng = np.random.default_rng(8)
        for _ in range(3):
            cl = rule()
            cl.condition = Condition(np.zeros(2), np.ones(2))
            cl.weights = rng.uniform(-1, 1, 3)
            cl.gain = np.eye(3) * 5.0
            mirror.append(Classifier(condition=cl.condition, action=0,
                                     prediction=0.0, error=0.0, fitness=0.01,
                                     weights=cl.weights.copy(),
                                     gain=cl.gain.copy()))
            pop.insert(cl)
        s = rng.uniform(0, 1, 2)
        update_action_set(pop, np.arange(3), 7.5, s, hp)
        for i, m in enumerate(mirror):
            rls_update(m, s, 7.5, hp)
            np.testing.assert_allclose(pop.W[i], m.weights, atol=1e-10)
            np.testing.assert_allclose(pop.V[i], m.gain, atol=1e-10)
