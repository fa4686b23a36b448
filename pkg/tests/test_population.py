import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcser import Condition, Hyperparameters, Population
from xcser.classifier import Classifier
from xcser.population import EmptyPopulationError


def rule(lo, hi, action=0, num=1, fit=0.5, asz=1.0, exp=0, eps=0.0, pred=10.0):
    return Classifier(condition=Condition(np.atleast_1d(np.asarray(lo, float)),
                                          np.atleast_1d(np.asarray(hi, float))),
                      action=action, prediction=pred, error=eps, fitness=fit,
                      experience=exp, action_set_size=asz, numerosity=num)


def test_insert_extract_roundtrip():
    pop = Population(2, Hyperparameters())
    cl = rule([0.1, 0.2], [0.9, 0.8], action=1, num=3, fit=0.25, exp=7)
    rid = pop.insert(cl)
    got = pop.extract(pop.rows_for_ids([rid])[0])
    assert got.action == 1
    assert got.numerosity == 3
    assert got.fitness == 0.25
    assert got.experience == 7
    np.testing.assert_array_equal(got.condition.lower, [0.1, 0.2])
    assert pop.num_sum == 3
    assert len(pop) == 1


def test_ids_survive_swap_remove():
    hp = Hyperparameters(N_max=100)
    pop = Population(1, hp)
    ids = [pop.insert(rule([i / 10], [i / 10 + 0.05], action=i % 2))
           for i in range(5)]
    # force-remove the middle rule; remaining ids must still resolve correctly
    row = int(pop.rows_for_ids([ids[2]])[0])
    pop.num_sum -= int(pop.num[row])
    pop._remove_row(row)
    alive = pop.rows_for_ids(ids)
    assert alive.size == 4
    for rid in (ids[0], ids[1], ids[3], ids[4]):
        r = pop.rows_for_ids([rid])[0]
        assert int(pop.ids[r]) == rid


def test_match_rows_against_bruteforce():
    hp = Hyperparameters()
    pop = Population(3, hp)
    rng = np.random.default_rng(3)
    rules = []
    for _ in range(60):
        a = rng.uniform(0, 1, 3)
        b = rng.uniform(0, 1, 3)
        cl = rule(np.minimum(a, b), np.maximum(a, b), action=int(rng.integers(2)))
        rules.append(cl)
        pop.insert(cl)
    for _ in range(200):
        s = rng.uniform(0, 1, 3)
        got = set(pop.match_rows(s).tolist())
        expect = {i for i, cl in enumerate(rules) if cl.condition.matches(s)}
        # rows equal indices here because nothing was ever removed
        assert got == expect


def test_find_identical():
    pop = Population(1, Hyperparameters())
    pop.insert(rule([0.1], [0.9], action=0))
    assert pop.find_identical(rule([0.1], [0.9], action=0)) == 0
    assert pop.find_identical(rule([0.1], [0.9], action=1)) == -1
    assert pop.find_identical(rule([0.1], [0.8], action=0)) == -1


def test_generality_weighted_mean():
    pop = Population(1, Hyperparameters())
    pop.insert(rule([0.0], [0.2], num=1))
    pop.insert(rule([0.0], [0.4], num=3))
    assert pop.generality() == pytest.approx((0.2 + 3 * 0.4) / 4)


def test_delete_one_decrements_numerosity():
    pop = Population(1, Hyperparameters())
    pop.insert(rule([0.0], [1.0], num=2))
    pop.delete_one(np.random.default_rng(0))
    assert len(pop) == 1
    assert pop.num[0] == 1
    assert pop.num_sum == 1
    pop.delete_one(np.random.default_rng(0))
    assert len(pop) == 0
    with pytest.raises(EmptyPopulationError):
        pop.delete_one(np.random.default_rng(0))


def test_capacity_enforced():
    hp = Hyperparameters(N_max=10)
    pop = Population(1, hp)
    rng = np.random.default_rng(5)
    for i in range(25):
        pop.insert(rule([0.0], [1.0], action=i % 2, num=1))
        pop.enforce_capacity(rng)
        assert pop.num_sum <= hp.N_max


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=30), st.integers(0, 2**31))
def test_capacity_invariant_random_sequences(nums, seed):
    hp = Hyperparameters(N_max=12)
    pop = Population(1, hp)
    rng = np.random.default_rng(seed)
    for k, num in enumerate(nums):
        pop.insert(rule([0.0], [k / len(nums)], action=k % 2, num=num))
        pop.enforce_capacity(rng)
        assert pop.num_sum <= hp.N_max
        assert pop.num_sum == pop.num[:pop.n].sum()
        assert all(pop.num[:pop.n] >= 1)
