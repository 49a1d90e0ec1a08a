"""Time-indexed LP relaxation with Knapsack-Cover (KC) inequalities.

Variables ``x[v, t]`` (vertex v scheduled at time t) and ``u[e, t]`` (edge e
still uncovered at the start of t) for t = 1..T.  The model holds

* capacity rows       sum_v x[v, t] <= 1
* KC rows             (k_e - |S|) u[e, t] + sum_{v in e - S} x[v, <t] >= k_e - |S|
* coverage rows       sum_{v in e - S} x[v, <T+1] >= k_e - |S|   (u[e, T+1] = 0)

Only S = {} is present initially.  ``solve_gmssc_lp`` adds violated KC rows
found by :func:`separate_kc` until none remain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GmsscError
from .instance import Edge, Instance
from .simplex import LpModel, solve_lp

SEPARATION_TOL = 1e-7
MAX_ROUNDS = 200


@dataclass(frozen=True)
class KcCut:
    edge: int
    t: int
    subset: tuple[int, ...]
    violation: float


@dataclass
class GmsscModel:
    """An :class:`LpModel` plus the bookkeeping to map columns back to (v, t)."""

    instance: Instance
    horizon: int
    lp: LpModel
    cuts: set = field(default_factory=set)

    def x_col(self, v: int, t: int) -> int:
        return v * self.horizon + (t - 1)

    def u_col(self, e: int, t: int) -> int:
        return self.instance.n * self.horizon + e * self.horizon + (t - 1)

    def add_kc_row(self, e: int, t: int, subset: tuple[int, ...]) -> None:
        edge = self.instance.edges[e]
        rest = [v for v in edge.vertices if v not in subset]
        need = edge.k - len(subset)
        terms = [(self.x_col(v, s), 1.0) for v in rest for s in range(1, t)]
        if t <= self.horizon:
            terms.append((self.u_col(e, t), float(need)))
        self.lp.add_row(terms, ">=", float(need), name=f"kc[{e},{t},{subset}]")
        self.cuts.add((e, t, tuple(subset)))


@dataclass
class FractionalSchedule:
    """Normalised LP optimum.

    ``u`` has ``T + 1`` columns; column ``t - 1`` holds ``u[e, t]`` and the
    last column is ``u[e, T+1]``, which the coverage rows force to 0.
    ``u_lp`` keeps the solver's raw values.
    """

    instance: Instance
    horizon: int
    x: np.ndarray
    u: np.ndarray
    u_lp: np.ndarray
    lp_objective: float
    rounds: int = 0
    n_cuts: int = 0

    @property
    def objective(self) -> float:
        return float(self.u[:, : self.horizon].sum())

    @property
    def edge_x(self) -> np.ndarray:
        """x[e, t] = u[e, t] - u[e, t+1] for t = 1..T."""
        return self.u[:, :-1] - self.u[:, 1:]

    @property
    def edge_costs(self) -> np.ndarray:
        return self.u[:, : self.horizon].sum(axis=1)


def build_base_lp(instance: Instance, T: int | None = None) -> GmsscModel:
    T = instance.n if T is None else int(T)
    kmax = max(e.k for e in instance.edges)
    if T < kmax or T < 1:
        raise GmsscError("horizon-too-small", f"T={T} but max k_e={kmax}")
    lp = LpModel()
    for v in range(instance.n):
        for t in range(1, T + 1):
            lp.add_var(f"x[{v},{t}]")
    for e in range(instance.m):
        for t in range(1, T + 1):
            lp.add_var(f"u[{e},{t}]", cost=1.0)
    model = GmsscModel(instance, T, lp)
    for t in range(1, T + 1):
        lp.add_row([(model.x_col(v, t), 1.0) for v in range(instance.n)], "<=", 1.0, name=f"cap[{t}]")
    for e in range(instance.m):
        for t in range(1, T + 2):
            model.add_kc_row(e, t, ())
    return model


def separate_kc(
    x_prefix: np.ndarray,
    u_value: float,
    edge: Edge,
    tol: float = SEPARATION_TOL,
    edge_id: int = -1,
    t: int = 0,
) -> list[KcCut]:
    """Greedy KC separation for one (edge, time).

    ``x_prefix[i]`` is x[v, <t] for the i-th vertex of ``edge``.  For each size
    s < k the most violated subset of that size drops the s largest prefixes
    (ties to the lowest id); a cut is emitted when it is violated by more
    than ``tol``.
    """
    xp = np.asarray(x_prefix, dtype=np.float64)
    order = np.argsort(-xp, kind="stable")
    ranked = xp[order]
    rest = ranked.sum() - np.concatenate(([0.0], np.cumsum(ranked)))
    cuts = []
    for s in range(edge.k):
        need = edge.k - s
        violation = need - (need * u_value + rest[s])
        if violation > tol:
            subset = tuple(sorted(edge.vertices[i] for i in order[:s]))
            cuts.append(KcCut(edge_id, t, subset, float(violation)))
    return cuts


def most_violated_kc(cuts: list[KcCut]) -> KcCut | None:
    """Largest violation; on ties the larger subset wins."""
    if not cuts:
        return None
    return max(cuts, key=lambda c: (c.violation, len(c.subset)))


def prefix_sums(x: np.ndarray) -> np.ndarray:
    """(n, T+1) array whose column t-1 is x[v, <t] for t = 1..T+1."""
    out = np.zeros((x.shape[0], x.shape[1] + 1))
    np.cumsum(x, axis=1, out=out[:, 1:])
    return out


def minimal_u(instance: Instance, x: np.ndarray) -> np.ndarray:
    """Smallest u satisfying every KC inequality for the given x.

    Returns shape (m, T+1).  Non-increasing in t because x[v, <t] is.
    """
    xb = prefix_sums(x)
    T1 = xb.shape[1]
    u = np.zeros((instance.m, T1))
    for e, edge in enumerate(instance.edges):
        xp = xb[list(edge.vertices)]  # (|e|, T+1)
        ranked = -np.sort(-xp, axis=0)
        rest = ranked.sum(axis=0)[None, :] - np.vstack([np.zeros(T1), np.cumsum(ranked, axis=0)])
        need = (edge.k - np.arange(edge.k))[:, None].astype(float)
        req = (need - rest[: edge.k]) / need
        u[e] = np.clip(req.max(axis=0), 0.0, 1.0)
    return u


def max_kc_violation(instance: Instance, x: np.ndarray, u: np.ndarray, max_size: int = 12) -> float:
    """Exhaustive check over every S with |S| < k_e, every t in 1..T+1.

    ``u`` has T+1 columns; the last is treated as 0 (hard coverage).  Edges
    larger than ``max_size`` are skipped.  Returns the largest violation.
    """
    xb = prefix_sums(x)
    T = x.shape[1]
    uu = u.copy()
    uu[:, T] = 0.0
    worst = 0.0
    for e, edge in enumerate(instance.edges):
        size = len(edge)
        if size > max_size:
            continue
        xp = xb[list(edge.vertices)]
        members = np.array(list(itertools.product((0, 1), repeat=size)), dtype=float)
        sizes = members.sum(axis=1)
        members = members[sizes < edge.k]
        need = edge.k - members.sum(axis=1)
        rest = (1.0 - members) @ xp  # (subsets, T+1)
        lhs = need[:, None] * uu[e][None, :] + rest
        worst = max(worst, float((need[:, None] - lhs).max()))
    return worst


def solve_gmssc_lp(
    instance: Instance,
    tol: float = SEPARATION_TOL,
    T: int | None = None,
    max_rounds: int = MAX_ROUNDS,
    backend: str = "simplex",
) -> FractionalSchedule:
    """Cutting-plane solve of the KC-strengthened LP; returns a normalised schedule."""
    model = build_base_lp(instance, T)
    T = model.horizon
    n, m = instance.n, instance.m
    for rnd in range(1, max_rounds + 1):
        res = solve_lp(model.lp, backend=backend)
        x = res.values[: n * T].reshape(n, T)
        u = res.values[n * T:].reshape(m, T)
        xb = prefix_sums(x)
        new = []
        for e, edge in enumerate(instance.edges):
            cols = list(edge.vertices)
            for t in range(1, T + 2):
                uval = u[e, t - 1] if t <= T else 0.0
                found = separate_kc(xb[cols, t - 1], uval, edge, tol, e, t)
                fresh = [c for c in found if (e, t, c.subset) not in model.cuts]
                if fresh:
                    new.append(most_violated_kc(fresh))
        if not new:
            break
        for cut in new:
            model.add_kc_row(cut.edge, cut.t, cut.subset)
    else:
        raise GmsscError(
            "iteration-limit", f"cutting planes did not converge in {max_rounds} rounds",
            rounds=max_rounds, cuts=len(model.cuts),
        )
    u_norm = minimal_u(instance, x)
    if u_norm[:, T].max() > 1e-6:
        raise GmsscError("kc-violated", "coverage rows left an edge uncovered at T+1")
    u_norm[:, T] = 0.0
    u_lp = np.hstack([u, np.zeros((m, 1))])
    return FractionalSchedule(instance, T, x, u_norm, u_lp, res.objective, rnd, len(model.cuts))


def edge_cost(schedule: FractionalSchedule, edge: int) -> float:
    """c_x(e) = sum_t u[e, t]."""
    return float(schedule.u[edge, : schedule.horizon].sum())


def edge_cost_by_times(schedule: FractionalSchedule, edge: int) -> float:
    """sum_t t * x[e, t]; equals :func:`edge_cost` when u[e, T+1] = 0."""
    xe = schedule.edge_x[edge]
    return float(np.arange(1, xe.size + 1) @ xe)


def dump_solution(schedule: FractionalSchedule) -> str:
    lines = ["lp v1", f"objective {schedule.objective:.17g}"]
    for v, t in zip(*np.nonzero(schedule.x)):
        lines.append(f"x {v} {t + 1} {schedule.x[v, t]:.17g}")
    u = schedule.u[:, : schedule.horizon]
    for e, t in zip(*np.nonzero(u)):
        lines.append(f"u {e} {t + 1} {u[e, t]:.17g}")
    return "\n".join(lines) + "\n"


def read_solution(text: str, n: int, m: int, T: int) -> tuple[float, np.ndarray, np.ndarray]:
    """Parse an ``lp v1`` dump back into (objective, x, u)."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != "lp v1":
        raise GmsscError("parse-error", "line 1: expected 'lp v1'", line=1)
    x = np.zeros((n, T))
    u = np.zeros((m, T))
    objective = float("nan")
    for lineno, line in enumerate(lines[1:], start=2):
        tok = line.split()
        if not tok:
            continue
        try:
            if tok[0] == "objective":
                objective = float(tok[1])
            elif tok[0] in ("x", "u"):
                arr = x if tok[0] == "x" else u
                arr[int(tok[1]), int(tok[2]) - 1] = float(tok[3])
            else:
                raise ValueError(tok[0])
        except (ValueError, IndexError):
            raise GmsscError("parse-error", f"line {lineno}: bad record", line=lineno) from None
    return objective, x, u


def save_solution(schedule: FractionalSchedule, path: str | Path) -> None:
    Path(path).write_text(dump_solution(schedule), encoding="utf-8")
