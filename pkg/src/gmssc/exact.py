"""Reference schedulers: exact subset DP, classical greedy, uniform random."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import GmsscError
from .instance import Instance

MAX_EXACT_N = 20


def exact_opt(instance: Instance) -> tuple[int, list[int]]:
    """Minimum total cover time over all orders, with one optimal order.

    Uses cost = sum_{j<n} N(first j vertices), N(P) = #edges not yet covered
    by P, minimised over prefixes by a DP on subsets.  Backtracking picks the
    lowest-id last vertex among ties.
    """
    n = instance.n
    if n > MAX_EXACT_N:
        raise GmsscError("too-large", f"exact DP is capped at n={MAX_EXACT_N}, got n={n}")
    masks = np.array([e.mask for e in instance.edges], dtype=np.int64)
    best, uncovered = _kernels.subset_dp(masks, instance.ks, n)
    full = (1 << n) - 1
    order = []
    S = full
    while S:
        for v in range(n):
            bit = 1 << v
            if S & bit and best[S ^ bit] + uncovered[S ^ bit] == best[S]:
                order.append(v)
                S ^= bit
                break
    order.reverse()
    return int(best[full]), order


def schedule_cost(instance: Instance, order) -> int:
    """Total cover time of one order (plain-Python reference)."""
    pos = {v: i + 1 for i, v in enumerate(order)}
    return sum(sorted(pos[v] for v in e.vertices)[e.k - 1] for e in instance.edges)


def greedy_mssc(instance: Instance) -> list[int]:
    """Repeatedly schedule the vertex hitting the most uncovered edges (lowest id on ties)."""
    if not instance.is_mssc():
        raise GmsscError("not-mssc", "greedy needs every k_e = 1")
    member = np.zeros((instance.m, instance.n), dtype=bool)
    for i, e in enumerate(instance.edges):
        member[i, list(e.vertices)] = True
    alive = np.ones(instance.m, dtype=bool)
    left = np.ones(instance.n, dtype=bool)
    order = []
    for _ in range(instance.n):
        score = np.where(left, member[alive].sum(axis=0), -1)
        v = int(np.argmax(score))
        order.append(v)
        left[v] = False
        alive &= ~member[:, v]
    return order


def random_schedule(instance: Instance, seed: int) -> list[int]:
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    return rng.permutation(instance.n).tolist()
