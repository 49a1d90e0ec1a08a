import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmssc.errors import GmsscError
from gmssc.exact import exact_opt, greedy_mssc, random_schedule, schedule_cost
from gmssc.instance import Edge, GeneratorParams, Instance, generate


def brute_force(inst):
    return min(schedule_cost(inst, p) for p in itertools.permutations(range(inst.n)))


def test_singletons():
    inst = Instance(3, [Edge([v], 1) for v in range(3)])
    assert exact_opt(inst)[0] == 6


def test_small_cases():
    inst = Instance(2, [Edge([0], 1), Edge([0, 1], 2)])
    assert exact_opt(inst) == (3, [0, 1])
    assert exact_opt(Instance(2, [Edge([0, 1], 2)]))[0] == 2


def test_too_large():
    with pytest.raises(GmsscError) as exc:
        exact_opt(Instance(21, [Edge([0], 1)]))
    assert exc.value.code == "too-large"


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 7), m=st.integers(1, 6))
def test_dp_matches_brute_force(seed, n, m):
    inst = generate(GeneratorParams(n=n, m=m, s_min=1, s_max=min(4, n), seed=seed))
    cost, order = exact_opt(inst)
    assert sorted(order) == list(range(n))
    assert schedule_cost(inst, order) == cost == brute_force(inst)


def test_greedy_examples():
    inst = Instance(2, [Edge([0], 1), Edge([0], 1), Edge([1], 1)])
    order = greedy_mssc(inst)
    assert order == [0, 1] and schedule_cost(inst, order) == 4 == exact_opt(inst)[0]
    disjoint = Instance(4, [Edge([v], 1) for v in range(4)])
    assert greedy_mssc(disjoint) == [0, 1, 2, 3]
    assert schedule_cost(disjoint, [0, 1, 2, 3]) == 10
    with pytest.raises(GmsscError) as exc:
        greedy_mssc(Instance(2, [Edge([0, 1], 2)]))
    assert exc.value.code == "not-mssc"


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 8), m=st.integers(1, 8))
def test_greedy_within_factor_four(seed, n, m):
    inst = generate(GeneratorParams(n=n, m=m, s_min=1, s_max=min(3, n), rule="all-ones", seed=seed))
    assert schedule_cost(inst, greedy_mssc(inst)) <= 4 * exact_opt(inst)[0]


def test_random_schedule():
    inst1 = Instance(1, [Edge([0], 1)])
    assert random_schedule(inst1, 99) == [0]
    inst = Instance(5, [Edge([0], 1)])
    assert random_schedule(inst, 3) == random_schedule(inst, 3)
    assert sorted(random_schedule(inst, 3)) == list(range(5))


def test_random_schedule_two_permutations_balanced():
    inst = Instance(2, [Edge([0], 1)])
    N = 10_000
    hits = sum(random_schedule(inst, s)[0] == 0 for s in range(N))
    assert abs(hits / N - 0.5) <= 3 * np.sqrt(0.25 / N)


@pytest.mark.parametrize("seed", range(5))
def test_dp_below_sampled_permutations(seed):
    inst = generate(GeneratorParams(n=12, m=10, s_min=1, s_max=4, seed=seed))
    opt = exact_opt(inst)[0]
    for r in range(1000):
        assert opt <= schedule_cost(inst, random_schedule(inst, seed * 10_000 + r))
