import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmssc.errors import GmsscError
from gmssc.instance import Edge, GeneratorParams, Instance, generate
from gmssc.kernel import apply_kernel, gmssc_kernel
from gmssc.lp import solve_gmssc_lp
from gmssc.rounding import alpha_point_round, cover_times, estimate_cost, simulate, trial_seed


def _z(inst, beta=2.043):
    fs = solve_gmssc_lp(inst)
    return apply_kernel(gmssc_kernel(beta, inst.n), fs.x, fs.edge_x)


def test_single_vertex():
    inst = Instance(1, [Edge([0], 1)])
    z = _z(inst)
    for s in range(5):
        assert list(alpha_point_round(z, s).sigma) == [0]
    rep = estimate_cost(z, inst, 100, 0)
    assert rep.total == 1.0 and rep.stderr == 0.0


def test_cover_examples():
    inst = Instance(2, [Edge([0, 1], 2)])
    assert cover_times(inst, [0, 1]).total == 2
    inst = Instance(2, [Edge([1], 1)])
    assert cover_times(inst, [0, 1]).total == 2
    inst = Instance(3, [Edge([v], 1) for v in range(3)])
    assert cover_times(inst, [2, 0, 1]).total == 6


@pytest.mark.parametrize("sigma", [[0, 0, 1], [0, 1], [0, 1, 3]])
def test_not_a_permutation(sigma):
    with pytest.raises(GmsscError) as exc:
        cover_times(Instance(3, [Edge([0], 1)]), sigma)
    assert exc.value.code == "not-a-permutation"


def test_deterministic_and_seed_scheme():
    inst = generate(GeneratorParams(n=7, m=5, seed=4))
    z = _z(inst)
    a, b = alpha_point_round(z, 42), alpha_point_round(z, 42)
    assert np.array_equal(a.sigma, b.sigma) and np.array_equal(a.tau, b.tau)
    _, sigma, _, seeds = simulate(z, inst, 5, 42)
    assert [int(s) for s in seeds] == [trial_seed(42, r) for r in range(5)] == [42, 43, 40, 41, 46]
    for r in range(5):
        assert np.array_equal(sigma[r], alpha_point_round(z, trial_seed(42, r)).sigma)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 7), m=st.integers(1, 5), rs=st.integers(0, 2**40))
def test_tau_definition_and_sort_order(seed, n, m, rs):
    inst = generate(GeneratorParams(n=n, m=m, s_min=1, s_max=min(3, n), seed=seed))
    z = _z(inst)
    trial = alpha_point_round(z, rs)
    zb = z.z_before
    for v in range(n):
        hit = np.nonzero(zb[v] >= trial.alpha[v])[0]
        expect = hit[0] + 1 if hit.size else np.inf
        assert trial.tau[v] == expect
        if zb[v, 1] >= 1:
            assert trial.tau[v] <= 2
    assert sorted(trial.sigma.tolist()) == list(range(n))
    ordered = trial.tau[trial.sigma]
    assert np.all(ordered[:-1] <= ordered[1:])


def test_symmetric_pair_mean():
    # identical z rows: both orders equally likely, edge {0} k=1 covers at 1.5 on average
    inst = Instance(2, [Edge([0, 1], 2), Edge([0], 1)])
    z = _z(inst)
    assert np.allclose(z.z_before[0], z.z_before[1])
    rep = estimate_cost(z, inst, 10_000, 7)
    assert abs(rep.edge_cover[1] - 1.5) <= 3 * rep.edge_stderr[1]


def test_stderr_scales():
    inst = generate(GeneratorParams(n=8, m=6, seed=9))
    z = _z(inst)
    a = estimate_cost(z, inst, 2000, 1).stderr
    b = estimate_cost(z, inst, 8000, 1).stderr
    assert 0.4 < b / a < 0.6


def test_trial_csv(tmp_path):
    inst = generate(GeneratorParams(n=5, m=4, seed=2))
    rep = estimate_cost(_z(inst), inst, 10, 3)
    lines = rep.csv_lines()
    assert lines[0] == "trial,seed,total_cost" and len(lines) == 11
    assert sum(float(l.split(",")[2]) for l in lines[1:]) / 10 == pytest.approx(rep.total)
    rep.save_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines() == lines


def test_bad_trials():
    inst = Instance(1, [Edge([0], 1)])
    with pytest.raises(GmsscError):
        simulate(_z(inst), inst, 0, 0)


def test_many_trials_are_permutations_with_inf_last():
    inst = generate(GeneratorParams(n=6, m=3, s_min=1, s_max=2, seed=11))
    fs = solve_gmssc_lp(inst)
    z = apply_kernel(gmssc_kernel(1.05, inst.n), fs.x)  # small beta leaves some tau infinite
    tau, sigma, _, _ = simulate(z, inst, 10_000, 5)
    assert np.all(np.sort(sigma, axis=1) == np.arange(inst.n))
    ordered = np.take_along_axis(tau, sigma, axis=1)
    assert np.all(ordered[:, :-1] <= ordered[:, 1:])
    assert (tau > z.z_before.shape[1]).any()


def test_threshold_frequencies():
    # Pr[tau_v <= t] = min(1, z_{v,<t}) for uniform thresholds
    x = np.array([[0.3, 0.2, 0.0], [0.0, 0.4, 0.3], [0.1, 0.0, 0.2]])
    inst = Instance(3, [Edge([0, 1, 2], 2)])
    z = apply_kernel(gmssc_kernel(1.5, 3), x)
    R = 100_000
    tau, _, _, _ = simulate(z, inst, R, 17)
    L = z.z_before.shape[1]
    for v in range(3):
        for t in range(1, L + 1):
            p = min(1.0, z.z_before[v, t - 1])
            freq = np.mean(tau[:, v] <= t)
            assert abs(freq - p) <= 3 * np.sqrt(p * (1 - p) / R) + 1e-12
