"""Kernel alpha-point rounding and Monte Carlo cost estimation.

Each vertex draws a threshold alpha_v ~ U[0, 1) and gets the tentative time
tau_v = min{t : z_{v,<t} >= alpha_v} (infinite if never reached within the
kernel horizon).  The permutation sorts by tau and breaks ties, including
the infinite class, with an independent uniform key per vertex.

Randomness: trial ``r`` of a run with master seed ``s`` uses a Philox
generator keyed by ``s ^ r``; it draws the n thresholds and then the n tie
keys, as 53-bit uniform doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import GmsscError
from .instance import Instance
from .kernel import TransformedSchedule

MASK64 = 2**64 - 1


def trial_seed(seed: int, trial: int) -> int:
    return (int(seed) ^ int(trial)) & MASK64


def _draws(seed: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.Philox(key=int(seed) & MASK64))
    return rng.random(n), rng.random(n)


@dataclass
class RoundingTrial:
    seed: int
    alpha: np.ndarray
    tau: np.ndarray    # float, np.inf when the threshold is never reached
    sigma: np.ndarray  # vertex ids in schedule order


@dataclass
class CostReport:
    edge_cover: np.ndarray        # mean Cov_sigma(e) (a single trial: the cover times)
    total: float                  # mean total cost
    stderr: float = 0.0
    edge_stderr: np.ndarray | None = None
    trials: int = 1
    trial_seeds: np.ndarray | None = None
    trial_totals: np.ndarray | None = None

    def csv_lines(self) -> list[str]:
        if self.trial_totals is None:
            raise ValueError("no per-trial data")
        out = ["trial,seed,total_cost"]
        for i, (s, c) in enumerate(zip(self.trial_seeds, self.trial_totals)):
            out.append(f"{i},{s},{c:.12g}")
        return out

    def save_csv(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.csv_lines()) + "\n", encoding="utf-8")


def _finalize_tau(tau_int: np.ndarray, L: int) -> np.ndarray:
    tau = tau_int.astype(np.float64)
    tau[tau_int > L] = np.inf
    return tau


def alpha_point_round(z: TransformedSchedule, seed: int) -> RoundingTrial:
    n, L = z.z_before.shape
    alpha, keys = _draws(seed, n)
    tau, sigma = _kernels.round_batch(z.z_before, alpha[None, :], keys[None, :])
    return RoundingTrial(int(seed), alpha, _finalize_tau(tau[0], L), sigma[0])


def _check_permutation(sigma: np.ndarray, n: int) -> None:
    s = np.asarray(sigma)
    if s.ndim != 1 or s.size != n or not np.array_equal(np.sort(s), np.arange(n)):
        raise GmsscError("not-a-permutation", f"expected a permutation of 0..{n - 1}")


def cover_times(instance: Instance, sigma) -> CostReport:
    sigma = np.asarray(sigma, dtype=np.int64)
    _check_permutation(sigma, instance.n)
    ptr, idx = instance.csr()
    cov = _kernels.cover_batch(sigma[None, :], ptr, idx, instance.ks)[0]
    return CostReport(cov.astype(np.float64), float(cov.sum()))


def simulate(z: TransformedSchedule, instance: Instance, trials: int, seed: int):
    """Run ``trials`` rounding trials; returns (tau, sigma, cover) batches and seeds."""
    if trials < 1:
        raise GmsscError("bad-trials", "need at least one trial")
    n = instance.n
    seeds = np.array([trial_seed(seed, r) for r in range(trials)], dtype=np.uint64)
    alpha = np.empty((trials, n))
    keys = np.empty((trials, n))
    for r, s in enumerate(seeds):
        alpha[r], keys[r] = _draws(int(s), n)
    tau, sigma = _kernels.round_batch(z.z_before, alpha, keys)
    ptr, idx = instance.csr()
    cov = _kernels.cover_batch(sigma, ptr, idx, instance.ks)
    return tau, sigma, cov, seeds


def estimate_cost(z: TransformedSchedule, instance: Instance, trials: int, seed: int) -> CostReport:
    """Monte Carlo mean cost with standard error sample-std / sqrt(trials)."""
    _, _, cov, seeds = simulate(z, instance, trials, seed)
    totals = cov.sum(axis=1)
    denom = math.sqrt(trials)
    if trials > 1:
        stderr = float(totals.std(ddof=1)) / denom
        edge_se = cov.std(axis=0, ddof=1) / denom
    else:
        stderr, edge_se = 0.0, np.zeros(instance.m)
    return CostReport(
        edge_cover=cov.mean(axis=0),
        total=float(totals.mean()),
        stderr=stderr,
        edge_stderr=edge_se,
        trials=trials,
        trial_seeds=seeds,
        trial_totals=totals,
    )
