from itertools import permutations

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from src.association.hungarian import assignment_cost, hungarian
from src.core.errors import AssignmentError


def brute_force_min(cost):
    n = cost.shape[0]
    return min(sum(cost[i, p[i]] for i in range(n)) for p in permutations(range(n)))


def test_diagonal_dominant():
    perm = hungarian([[1, 2], [2, 1]])
    assert perm.tolist() == [0, 1]
    assert assignment_cost([[1, 2], [2, 1]], perm) == 2.0


def test_all_ties_give_identity():
    assert hungarian(np.zeros((2, 2))).tolist() == [0, 1]
    assert hungarian(np.zeros((4, 4))).tolist() == [0, 1, 2, 3]


def test_three_by_three_example():
    cost = [[4, 1, 3], [2, 0, 5], [3, 2, 2]]
    perm = hungarian(cost)
    assert assignment_cost(cost, perm) == 5.0
    assert perm.tolist() == [1, 0, 2]


def test_empty_matrix():
    assert hungarian(np.zeros((0, 0))).size == 0


def test_matches_brute_force_on_random_5x5():
    rng = np.random.default_rng(0)
    for _ in range(100):
        cost = rng.uniform(0, 100, (5, 5))
        perm = hungarian(cost)
        assert sorted(perm.tolist()) == list(range(5))
        assert assignment_cost(cost, perm) == pytest.approx(brute_force_min(cost), abs=1e-9)


def test_matches_brute_force_on_integer_costs_up_to_7():
    rng = np.random.default_rng(1)
    for n in range(1, 8):
        for _ in range(5):
            cost = rng.integers(0, 10, (n, n)).astype(float)
            assert assignment_cost(cost, hungarian(cost)) == brute_force_min(cost)


def test_agrees_with_scipy_on_larger_matrices():
    rng = np.random.default_rng(2)
    for n in (12, 36, 60):
        cost = rng.uniform(0, 1e4, (n, n))
        rows, cols = linear_sum_assignment(cost)
        assert assignment_cost(cost, hungarian(cost)) == pytest.approx(cost[rows, cols].sum(), rel=1e-12)


@pytest.mark.parametrize("cost", [
    np.zeros((2, 3)),
    np.zeros(4),
    np.array([[0.0, np.inf], [1.0, 0.0]]),
    np.array([[0.0, np.nan], [1.0, 0.0]]),
])
def test_bad_input(cost):
    with pytest.raises(AssignmentError):
        hungarian(cost)


def brute_force_lexicographic(cost):
    """Smallest perm tuple among all minimum-cost perms."""
    n = cost.shape[0]
    best = brute_force_min(cost)
    return min(p for p in permutations(range(n)) if sum(cost[i, p[i]] for i in range(n)) == best)


def test_ties_resolve_to_lexicographic_minimum():
    rng = np.random.default_rng(3)
    for n in range(2, 6):
        for _ in range(40):
            cost = rng.integers(0, 4, (n, n)).astype(float)
            assert tuple(hungarian(cost).tolist()) == brute_force_lexicographic(cost)


def test_duplicated_columns_pick_lowest_copy():
    # two UAVs, each column repeated twice, as in balanced clustering
    dist = np.array([[1.0, 5.0], [1.0, 5.0], [5.0, 1.0], [5.0, 1.0]])
    cost = np.repeat(dist, 2, axis=1)
    assert hungarian(cost).tolist() == [0, 1, 2, 3]
    assert hungarian(cost[::-1]).tolist() == [2, 3, 0, 1]


def test_reversed_identity_ties():
    cost = np.ones((4, 4)) - np.fliplr(np.eye(4))
    assert hungarian(cost).tolist() == [3, 2, 1, 0]
    assert hungarian(np.ones((3, 3))).tolist() == [0, 1, 2]
