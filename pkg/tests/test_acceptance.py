"""Acceptance criteria, one test per criterion; see the summary section of the run."""

import itertools
import math
import time

import numpy as np
import pytest

from gmssc.analysis import (check_capacity, check_cz_bound, check_jump_claim, edge_diagnostics, gmssc_ratio,
                            minimize_ratio, mlc_check, mlc_ratio)
from gmssc.exact import exact_opt
from gmssc.instance import GeneratorParams, generate
from gmssc.kernel import apply_kernel, gmssc_kernel, mlc_kernel
from gmssc.lp import max_kc_violation, solve_gmssc_lp
from gmssc.rounding import estimate_cost
from gmssc.tail_bounds import stirling_bound, verify_dominance, verify_tail_quantities

BETA = 2.043
ALPHA = 2.0
HEADLINE = 4.509
TRIALS = 2000
N_INSTANCES = 100


def _params(seed: int, rule: str = "uniform") -> GeneratorParams:
    n = 4 + seed % 7
    return GeneratorParams(n=n, m=3 + seed % 6, s_min=1, s_max=min(4, n), rule=rule, seed=seed)


def _solve_all(rule: str):
    start = time.perf_counter()
    out = []
    for seed in range(N_INSTANCES):
        inst = generate(_params(seed, rule))
        out.append((seed, inst, solve_gmssc_lp(inst), exact_opt(inst)[0]))
    return out, time.perf_counter() - start


@pytest.fixture(scope="session")
def corpus():
    return _solve_all("uniform")


@pytest.fixture(scope="session")
def mlc_corpus():
    return _solve_all("full-size")


@pytest.fixture(scope="session")
def rounded(corpus):
    start = time.perf_counter()
    out = []
    for seed, inst, fs, opt in corpus[0]:
        z = apply_kernel(gmssc_kernel(BETA, inst.n), fs.x, fs.edge_x)
        out.append((edge_diagnostics(inst, fs, z), estimate_cost(z, inst, TRIALS, seed)))
    return out, time.perf_counter() - start


def test_criterion_1_ratio_constants(record):
    start = time.perf_counter()
    r = gmssc_ratio(BETA)
    g = minimize_ratio("gmssc", 1.5, 3.0, 0.001)
    m = minimize_ratio("mlc", 2.0, 4.0, 0.001)
    secs = time.perf_counter() - start
    ok = (4.5080 <= r <= 4.5095 and f"{g.min:.3f}" == "4.509" and 2.03 <= g.argmin <= 2.06
          and mlc_ratio(2) == 2 and m.min == 2 and m.argmin == 2.0 and secs < 1)
    record(1, ok, f"gmssc_ratio(2.043)={r:.6f}, sweep min {g.min:.3f} at beta={g.argmin:.3f}, "
                  f"mlc min {m.min:g} at alpha={m.argmin:g}", secs)
    assert ok


def test_criterion_2_tail_dominance(record):
    start = time.perf_counter()
    rep = verify_dominance(k_max=8, n_max=12, queries=10_000, seed=0, tol=1e-12)
    secs = time.perf_counter() - start
    ok = rep.ok and len(rep.rows) == 10_000 and secs < 30
    record(2, ok, f"{len(rep.violations)} violations over {len(rep.rows)} queries, "
                  f"worst margin {rep.worst_margin:.3e}", secs)
    assert ok


def test_criterion_3_tail_quantities(record):
    start = time.perf_counter()
    failures = []
    worst_r = 0.0
    for k in range(2, 17):
        rep = verify_tail_quantities(k)
        worst_r = max(worst_r, rep.r_grid_max, rep.r_at_eta)
        if not (rep.r_at_eta <= 1 and rep.r_grid_max <= 1 + 1e-12):
            failures.append(f"R k={k}")
        if k <= 8 and not rep.s_t0 < 1:
            failures.append(f"S k={k}")
    worst_st = max(stirling_bound(k) for k in range(9, 65))
    if not worst_st < 1:
        failures.append("stirling")
    secs = time.perf_counter() - start
    ok = not failures and secs < 10
    record(3, ok, f"max R={worst_r:.6f}, max Stirling(9..64)={worst_st:.6f} {failures or ''}", secs)
    assert ok


def test_criterion_4_lp_soundness(corpus, record):
    items, solve_secs = corpus
    start = time.perf_counter()
    gap = max(fs.objective - opt for _, _, fs, opt in items)
    kc = max(max_kc_violation(inst, fs.x, fs.u) for _, inst, fs, _ in items)
    secs = solve_secs + time.perf_counter() - start
    ok = gap <= 1e-6 and kc <= 1e-6 and secs < 300
    record(4, ok, f"max(LP - OPT)={gap:.3e}, max KC violation={kc:.3e}, {len(items)} instances", secs)
    assert ok


def test_criterion_5_edge_envelope(corpus, rounded, record):
    start = time.perf_counter()
    worst_cz, worst_cap, edges = -math.inf, -math.inf, 0
    for diags, cost in rounded[0]:
        rep = check_cz_bound(diags, BETA)
        worst_cz = max(worst_cz, max(r.c_z - r.bound for r in rep.rows))
        caps = check_capacity(diags, cost, BETA)
        worst_cap = max(worst_cap, max(c.mean_cover - c.limit - 3 * c.stderr for c in caps))
        edges += len(diags)
    secs = rounded[1] + time.perf_counter() - start
    ok = worst_cz <= 1e-6 and worst_cap <= 0 and secs < 600
    record(5, ok, f"{edges} edges; max c_z - bound={worst_cz:.4f}, "
                  f"max Cov - (beta c_z + 3 se)={worst_cap:.4f}", secs)
    assert ok


def test_criterion_6_end_to_end(corpus, rounded, mlc_corpus, record):
    start = time.perf_counter()
    worst_lp = worst_opt = worst_mlc = -math.inf
    for (seed, inst, fs, opt), (_, cost) in zip(corpus[0], rounded[0]):
        worst_lp = max(worst_lp, cost.total / fs.objective - (HEADLINE + 3 * cost.stderr / fs.objective))
        worst_opt = max(worst_opt, cost.total / opt - (HEADLINE + 3 * cost.stderr / opt))
    for seed, inst, fs, opt in mlc_corpus[0]:
        z = apply_kernel(mlc_kernel(ALPHA, inst.n), fs.x, fs.edge_x)
        cost = estimate_cost(z, inst, TRIALS, seed)
        worst_mlc = max(worst_mlc, cost.total / fs.objective - (2 + 3 * cost.stderr / fs.objective))
    secs = rounded[1] + mlc_corpus[1] + time.perf_counter() - start
    ok = worst_lp <= 0 and worst_opt <= 0 and worst_mlc <= 0 and secs < 600
    record(6, ok, f"max (ratio - limit): vs LP {worst_lp:.4f}, vs OPT {worst_opt:.4f}, "
                  f"MLC vs LP {worst_mlc:.4f} (all must be <= 0)", secs)
    assert ok


def test_mlc_edge_checks(mlc_corpus):
    # per-edge latency checks on the same MLC corpus (not a numbered criterion)
    for seed, inst, fs, _ in mlc_corpus[0]:
        assert mlc_check(inst, ALPHA, 500, seed, fractional=fs).ok, seed


def test_criterion_7_jump_claim(record):
    start = time.perf_counter()
    grid = [0.0, 0.25, 0.5, 1.0, 2.0]
    results = [check_jump_claim(i, a, b, d, BETA)
               for i in range(2, 6) for a in grid for b in grid if b >= a for d in grid]
    secs = time.perf_counter() - start
    worst = max(r.lhs - r.rhs for r in results)
    ok = all(r.ok for r in results) and secs < 60
    record(7, ok, f"{len(results)} grid points, max lhs - rhs={worst:.3e}", secs)
    assert ok


def _brute_force(inst) -> int:
    perms = np.array(list(itertools.permutations(range(inst.n))), dtype=np.int64)
    pos = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    pos[rows, perms] = np.arange(1, inst.n + 1)
    total = np.zeros(perms.shape[0], dtype=np.int64)
    for e in inst.edges:
        total += np.sort(pos[:, list(e.vertices)], axis=1)[:, e.k - 1]
    return int(total.min())


def test_criterion_8_oracle_equivalence(record):
    start = time.perf_counter()
    mismatches = []
    for seed in range(20):
        n = 3 + seed % 6
        inst = generate(GeneratorParams(n=n, m=2 + seed % 7, s_min=1, s_max=min(4, n), seed=1000 + seed))
        if exact_opt(inst)[0] != _brute_force(inst):
            mismatches.append(seed)
    secs = time.perf_counter() - start
    ok = not mismatches and secs < 60
    record(8, ok, f"20 instances with n <= 8, mismatches: {mismatches or 'none'}", secs)
    assert ok
