"""Sparse LP model container and a dense two-phase primal simplex solver.

The solver uses Bland's rule (lowest-index entering column, lowest-index
leaving variable among ratio-test ties), which cannot cycle.  After phase 2
the basic solution is recomputed from the original matrix with one dense
solve, which removes the drift accumulated by tableau pivoting.

``backend="highs"`` routes the same model through ``scipy.optimize.linprog``;
it exists so the two solvers can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import _kernels
from .errors import GmsscError

SENSES = ("<=", ">=", "==")


class Row(NamedTuple):
    cols: tuple[int, ...]
    vals: tuple[float, ...]
    sense: str
    rhs: float
    name: str = ""


@dataclass
class LpModel:
    """Minimise ``objective @ x`` subject to ``rows`` and ``x >= 0``."""

    names: list[str] = field(default_factory=list)
    index: dict[str, int] = field(default_factory=dict)
    costs: list[float] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def objective(self) -> np.ndarray:
        return np.asarray(self.costs, dtype=np.float64)

    def add_var(self, name: str, cost: float = 0.0) -> int:
        if name in self.index:
            raise ValueError(f"duplicate variable {name!r}")
        self.index[name] = len(self.names)
        self.names.append(name)
        self.costs.append(float(cost))
        return self.index[name]

    def add_row(self, terms: Iterable[tuple[int, float]], sense: str, rhs: float, name: str = "") -> int:
        if sense not in SENSES:
            raise ValueError(f"bad sense {sense!r}")
        acc: dict[int, float] = {}
        for j, a in terms:
            if not 0 <= j < self.n_vars:
                raise ValueError(f"row {name!r} references undeclared column {j}")
            acc[j] = acc.get(j, 0.0) + float(a)
        if not np.isfinite(rhs):
            raise ValueError(f"row {name!r} has non-finite rhs")
        cols = tuple(sorted(acc))
        self.rows.append(Row(cols, tuple(acc[j] for j in cols), sense, float(rhs), name))
        return len(self.rows) - 1

    def dense(self) -> tuple[np.ndarray, np.ndarray, list[str]]:
        A = np.zeros((len(self.rows), self.n_vars))
        b = np.empty(len(self.rows))
        for i, r in enumerate(self.rows):
            A[i, list(r.cols)] = r.vals
            b[i] = r.rhs
        return A, b, [r.sense for r in self.rows]

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation of ``x`` (0 when feasible)."""
        A, b, senses = self.dense()
        lhs = A @ x if len(self.rows) else np.zeros(0)
        worst = float(max(0.0, -x.min())) if x.size else 0.0
        for v, rhs, s in zip(lhs, b, senses):
            if s == "<=":
                worst = max(worst, v - rhs)
            elif s == ">=":
                worst = max(worst, rhs - v)
            else:
                worst = max(worst, abs(v - rhs))
        return worst


@dataclass
class LpResult:
    values: np.ndarray
    objective: float
    iterations: int
    backend: str


def solve_lp(
    model: LpModel,
    tol: float = 1e-9,
    max_iter: int = 10**6,
    backend: str = "simplex",
) -> LpResult:
    """Solve ``model``; raise ``GmsscError`` on infeasible/unbounded/iteration-limit."""
    if backend == "highs":
        return _solve_highs(model, tol)
    if backend != "simplex":
        raise ValueError(f"unknown LP backend {backend!r}")

    A, b, senses = model.dense()
    c = model.objective
    nr, nv = A.shape
    if nr == 0:
        if (c < -tol).any():
            raise GmsscError("unbounded", "negative cost on a free-growing variable")
        return LpResult(np.zeros(nv), 0.0, 0, "simplex")

    flip = b < 0
    A[flip] *= -1.0
    b = np.where(flip, -b, b)
    senses = [
        {"<=": ">=", ">=": "<="}.get(s, s) if f else s for s, f in zip(senses, flip)
    ]
    slack_rows = [i for i, s in enumerate(senses) if s != "=="]
    art_rows = [i for i, s in enumerate(senses) if s != "<="]
    n_slack, n_art = len(slack_rows), len(art_rows)
    art0 = nv + n_slack
    ncol = art0 + n_art

    tab = np.zeros((nr + 1, ncol + 1))
    tab[:nr, :nv] = A
    tab[:nr, -1] = b
    basis = np.empty(nr, dtype=np.int64)
    for j, i in enumerate(slack_rows):
        tab[i, nv + j] = 1.0 if senses[i] == "<=" else -1.0
        if senses[i] == "<=":
            basis[i] = nv + j
    for j, i in enumerate(art_rows):
        tab[i, art0 + j] = 1.0
        basis[i] = art0 + j
    std = tab[:nr, :art0].copy()

    total_iter = 0
    if n_art:
        tab[nr, art0:ncol] = 1.0
        tab[nr] -= tab[art_rows].sum(axis=0)
        status, it = _kernels.simplex_iterate(tab, basis, ncol, tol, max_iter)
        total_iter += it
        if status == _kernels.ITERATION_LIMIT:
            raise GmsscError("iteration-limit", "phase 1 hit the iteration cap", iterations=total_iter)
        infeas = -tab[nr, -1]
        if infeas > 1e-7 * max(1.0, float(np.abs(b).max())):
            raise GmsscError("infeasible", f"phase 1 residual {infeas:.3g}")
        keep = np.ones(nr, dtype=bool)
        for i in range(nr):
            if basis[i] >= art0:
                cand = np.flatnonzero(np.abs(tab[i, :art0]) > 1e-9)
                if cand.size == 0:
                    keep[i] = False
                    continue
                j = cand[0]
                tab[i] /= tab[i, j]
                f = tab[:, j].copy()
                f[i] = 0.0
                tab -= np.outer(f, tab[i])
                basis[i] = j
        rows = np.flatnonzero(keep)
        tab = np.vstack([tab[rows][:, list(range(art0)) + [ncol]], np.zeros((1, art0 + 1))])
        basis = basis[rows].copy()
        std = std[rows]
        b = b[rows]
        nr = rows.size

    cfull = np.zeros(art0)
    cfull[:nv] = c
    tab[nr, :art0] = cfull - cfull[basis] @ tab[:nr, :art0]
    tab[nr, -1] = -cfull[basis] @ tab[:nr, -1]
    status, it = _kernels.simplex_iterate(tab, basis, art0, tol, max_iter - total_iter)
    total_iter += it
    if status == _kernels.UNBOUNDED:
        raise GmsscError("unbounded", "phase 2 found an improving ray")
    if status == _kernels.ITERATION_LIMIT:
        raise GmsscError("iteration-limit", "phase 2 hit the iteration cap", iterations=total_iter)

    sol = np.zeros(art0)
    sol[basis] = tab[:nr, -1]
    try:
        xb = np.linalg.solve(std[:, basis], b)
        if np.all(np.isfinite(xb)) and xb.min() > -1e-7:
            sol[basis] = xb
    except np.linalg.LinAlgError:
        pass
    x = np.maximum(sol[:nv], 0.0)
    return LpResult(x, float(c @ x), total_iter, "simplex")


def _solve_highs(model: LpModel, tol: float) -> LpResult:
    from scipy.optimize import linprog

    A, b, senses = model.dense()
    ub = [i for i, s in enumerate(senses) if s != "=="]
    eq = [i for i, s in enumerate(senses) if s == "=="]
    sign = np.array([1.0 if senses[i] == "<=" else -1.0 for i in ub])
    res = linprog(
        model.objective,
        A_ub=A[ub] * sign[:, None] if ub else None,
        b_ub=b[ub] * sign if ub else None,
        A_eq=A[eq] if eq else None,
        b_eq=b[eq] if eq else None,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": max(tol, 1e-10)},
    )
    if res.status == 2:
        raise GmsscError("infeasible", res.message)
    if res.status == 3:
        raise GmsscError("unbounded", res.message)
    if res.status != 0:
        raise GmsscError("iteration-limit", res.message)
    return LpResult(np.maximum(res.x, 0.0), float(res.fun), int(res.nit), "highs")
