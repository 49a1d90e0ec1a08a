"""Approximation-ratio formulas and numeric checks of the per-edge lemmas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import GmsscError
from .instance import Instance
from .kernel import GMSSC_BETA, ONE_TOL, TransformedSchedule, apply_kernel, cumulative_at, mlc_kernel
from .lp import FractionalSchedule, solve_gmssc_lp
from .rounding import CostReport, estimate_cost
from .tail_bounds import p_k_bound

LEMMA_SLACK = 1e-6
TAIL_RATIO = 1.02
TAIL_END = 1e12


# ---------------------------------------------------------------------------
# Ratio formulas
# ---------------------------------------------------------------------------


def cz_constant(beta: float) -> float:
    """e^{1/beta} (1 + e^{-1} / (beta - 1)): the c_z / c_x factor."""
    if not beta > 1:
        raise GmsscError("bad-beta", f"beta must exceed 1, got {beta}")
    return math.exp(1 / beta) * (1 + math.exp(-1) / (beta - 1))


def gmssc_ratio(beta: float) -> float:
    return beta * cz_constant(beta)


def mlc_ratio(alpha: float) -> float:
    if not alpha >= 2:
        raise GmsscError("bad-alpha", f"alpha must be at least 2, got {alpha}")
    return alpha * alpha / (2 * (alpha - 1))


@dataclass
class RatioCurve:
    grid: np.ndarray
    values: np.ndarray

    @property
    def argmin(self) -> float:
        return float(self.grid[int(np.argmin(self.values))])

    @property
    def min(self) -> float:
        return float(self.values.min())


def minimize_ratio(which: str, lo: float, hi: float, step: float) -> RatioCurve:
    if step <= 0 or hi < lo:
        raise ValueError("need lo <= hi and step > 0")
    fn = {"gmssc": gmssc_ratio, "mlc": mlc_ratio}[which]
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    grid = lo + step * np.arange(count)
    return RatioCurve(grid, np.array([fn(float(g)) for g in grid]))


# ---------------------------------------------------------------------------
# Per-edge diagnostics
# ---------------------------------------------------------------------------


@dataclass
class EdgeDiagnostics:
    """Quantities for one edge over t = 1..T_k+1 (array index t-1)."""

    edge: int
    k: int
    t_e: int                 # 0 when z_{e,<=t} never reaches 1 in the horizon
    c_x: float
    a_size: np.ndarray       # |A_e(t)|
    k_t: np.ndarray          # k_e(t) = max(0, k_e - |A_e(t)|)
    p: np.ndarray            # exact p_t(e)
    mass_b: np.ndarray       # sum_{v in B_e(t)} y_{v,t}
    cz_truncated: float
    tail: float              # certified upper bound on sum_{t > T_k+1} p_t(e)

    @property
    def has_t_e(self) -> bool:
        return self.t_e > 0

    @property
    def c_z(self) -> float:
        return self.cz_truncated + self.tail

    def p_k_envelope(self) -> np.ndarray:
        """P^{k_e(t)}(mass_b / k_e(t)) where k_e(t) >= 1, else 0."""
        out = np.zeros_like(self.p)
        for i, (kt, mb) in enumerate(zip(self.k_t, self.mass_b)):
            if kt >= 1:
                out[i] = p_k_bound(int(kt), mb / kt)
        return out


def _snap(y: np.ndarray) -> np.ndarray:
    return np.where(y >= 1.0 - ONE_TOL, 1.0, y)


def _tail_bound(z: TransformedSchedule, verts: list[int], k: int, horizon_x: int) -> float:
    """Upper bound on sum_{t > L} p_t(e), L = T_k + 1.

    p_t(e) is non-increasing in t, so on a geometric grid g_0 = L < g_1 < ...
    the block (g_j, g_{j+1}] contributes at most (g_{j+1} - g_j) p_{g_j + 1}.
    Past TAIL_END the beta kernel gives z_{e,<t} >= beta ln(t / T) and
    p_t <= e^{1 - z_{e,<t}}, whose sum is bounded in closed form.
    """
    L = z.z_before.shape[1]
    grid = [L]
    while grid[-1] < TAIL_END:
        grid.append(max(grid[-1] + 1, int(math.ceil(grid[-1] * TAIL_RATIO))))
    g = np.array(grid, dtype=np.float64)
    y = _snap(np.minimum(1.0, cumulative_at(z.spec, z.x[verts], g + 1.0)))
    p = _kernels.pb_cdf_batch(y.T, k - 1)
    widths = np.diff(g)
    total = float(widths @ p[:-1])
    if p[-1] > 0.0:
        if z.spec.kind == GMSSC_BETA:
            beta = z.spec.parameter
            total += math.e * horizon_x**beta * g[-1] ** (1 - beta) / (beta - 1)
        else:
            total = math.inf
    return total


def edge_diagnostics(
    instance: Instance, fractional: FractionalSchedule, z: TransformedSchedule, with_tail: bool = True
) -> list[EdgeDiagnostics]:
    if z.t_edge is None:
        raise ValueError("transformed schedule lacks edge series; pass edge_x to apply_kernel")
    y = z.y
    reached = z.reached()
    out = []
    c_x = fractional.edge_costs
    for e, edge in enumerate(instance.edges):
        verts = list(edge.vertices)
        ye = y[verts]
        a_size = reached[verts].sum(axis=0)
        k_t = np.maximum(0, edge.k - a_size)
        mass_b = np.where(reached[verts], 0.0, ye).sum(axis=0)
        p = _kernels.pb_cdf_batch(ye.T, edge.k - 1)
        t_e = int(z.t_edge[e])
        if t_e > 0:
            cz = t_e + float(p[t_e:].sum())
            tail = _tail_bound(z, verts, edge.k, fractional.horizon) if with_tail else 0.0
        else:
            cz, tail = math.inf, math.inf
        out.append(EdgeDiagnostics(e, edge.k, t_e, float(c_x[e]), a_size, k_t, p, mass_b, cz, tail))
    return out


def transformed_kc_gap(instance: Instance, z: TransformedSchedule) -> float:
    """min over e, t of sum_{B_e(t)} z_{v,<t} - k_e(t) z_{e,<t} (t = 1..T_k+1)."""
    reached = z.reached()
    worst = math.inf
    for e, edge in enumerate(instance.edges):
        verts = list(edge.vertices)
        zb = np.where(reached[verts], 0.0, z.z_before[verts]).sum(axis=0)
        k_t = np.maximum(0, edge.k - reached[verts].sum(axis=0))
        worst = min(worst, float((zb - k_t * z.z_edge_before[e]).min()))
    return worst


# ---------------------------------------------------------------------------
# Lemma checks
# ---------------------------------------------------------------------------


@dataclass
class EdgeCheck:
    edge: int
    t_e: int
    c_x: float
    c_z: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.c_z / self.c_x if self.c_x > 0 else math.inf

    @property
    def ok(self) -> bool:
        return self.c_z <= self.bound + LEMMA_SLACK


@dataclass
class CzBoundReport:
    beta: float
    rows: list[EdgeCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def tightest(self) -> EdgeCheck:
        return max(self.rows, key=lambda r: r.c_z - r.bound)

    def csv_lines(self) -> list[str]:
        out = ["edge,t_e,c_x,c_z,bound,ratio"]
        for r in self.rows:
            out.append(f"{r.edge},{r.t_e},{r.c_x:.12g},{r.c_z:.12g},{r.bound:.12g},{r.ratio:.12g}")
        return out


def check_cz_bound(diagnostics: list[EdgeDiagnostics], beta: float, strict: bool = False) -> CzBoundReport:
    """c_z(e) (truncated sum plus tail certificate) <= cz_constant(beta) c_x(e) + 1e-6."""
    const = cz_constant(beta)
    report = CzBoundReport(beta)
    for d in diagnostics:
        report.rows.append(EdgeCheck(d.edge, d.t_e, d.c_x, d.c_z, const * d.c_x))
    if strict and not report.ok:
        w = report.tightest
        raise GmsscError("lemma-violated", f"edge {w.edge}: c_z={w.c_z:.6g} > {w.bound:.6g}", witness=w)
    return report


@dataclass
class CapacityCheck:
    edge: int
    mean_cover: float
    stderr: float
    limit: float

    @property
    def ok(self) -> bool:
        return self.mean_cover <= self.limit + 3 * self.stderr


def check_capacity(diagnostics: list[EdgeDiagnostics], cost: CostReport, factor: float) -> list[CapacityCheck]:
    """Mean Cov_sigma(e) <= factor * c_z(e) + 3 stderr, per edge."""
    se = cost.edge_stderr if cost.edge_stderr is not None else np.zeros(len(diagnostics))
    return [
        CapacityCheck(d.edge, float(cost.edge_cover[d.edge]), float(se[d.edge]), factor * d.c_z)
        for d in diagnostics
    ]


# ---------------------------------------------------------------------------
# Integral inequality for switching between tail curves
# ---------------------------------------------------------------------------

QUAD_TOL = 1e-11
QUAD_CUTOFF = 60.0
QUAD_MAX_EVALS = 10**6


class _Budget:
    def __init__(self, cap: int):
        self.left = cap

    def take(self, count: int) -> None:
        self.left -= count
        if self.left < 0:
            raise GmsscError("quadrature-failure", "evaluation cap reached")


def adaptive_simpson(f, a: float, b: float, tol: float = QUAD_TOL, max_evals: int = QUAD_MAX_EVALS) -> float:
    if b <= a:
        return 0.0
    budget = _Budget(max_evals)
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    budget.take(3)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    return _simpson_step(f, a, b, fa, fm, fb, whole, tol, budget, 60)


def _simpson_step(f, a, b, fa, fm, fb, whole, tol, budget, depth):
    m = (a + b) / 2
    lm, rm = (a + m) / 2, (m + b) / 2
    flm, frm = f(lm), f(rm)
    budget.take(2)
    left = (m - a) / 6 * (fa + 4 * flm + fm)
    right = (b - m) / 6 * (fm + 4 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15 * tol:
        return left + right + delta / 15
    if depth <= 0:
        raise GmsscError("quadrature-failure", f"no convergence on [{a}, {b}]")
    return (_simpson_step(f, a, m, fa, flm, fm, left, tol / 2, budget, depth - 1)
            + _simpson_step(f, m, b, fm, frm, fb, right, tol / 2, budget, depth - 1))


def _exp_branch(k: int, shift: float, beta: float):
    """x -> P^k(x + shift) e^{x / beta} on the region x + shift >= 1."""
    rk = math.sqrt(k)
    eta = (k - 1) / k
    return lambda x: math.exp(-rk * (x + shift - eta) + x / beta)


def _exp_integral(k: int, shift: float, beta: float, lo: float, hi: float) -> float:
    """Closed form of the integral of _exp_branch over [lo, hi] (hi may be inf)."""
    rate = math.sqrt(k) - 1 / beta
    c = math.sqrt(k) * ((k - 1) / k - shift)
    upper = 0.0 if math.isinf(hi) else math.exp(c - rate * hi)
    return (math.exp(c - rate * lo) - upper) / rate


def _integral(k: int, shift: float, beta: float, lo: float, hi: float, tol: float) -> float:
    """Quadrature up to QUAD_CUTOFF, closed form beyond it."""
    if hi <= lo:
        return 0.0
    f = _exp_branch(k, shift, beta)
    mid = min(hi, max(lo, QUAD_CUTOFF))
    total = adaptive_simpson(f, lo, mid, tol) if mid > lo else 0.0
    if hi > mid:
        total += _exp_integral(k, shift, beta, mid, hi)
    return total


@dataclass
class JumpClaimResult:
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + 1e-7


def jump_claim_sides(i: int, a: float, b: float, delta: float, beta: float, closed_form: bool = False):
    """(lhs, rhs) of the switching inequality.

    lhs = int_{1+a}^{1+b} P^i(x + (a+D)/i) e^{x/beta} dx
          + int_{1+b}^inf P^1(x + b + (a+D)/(i-1)) e^{x/beta} dx
    rhs = int_{1+a}^inf P^1(x + a + D/i) e^{x/beta} dx
    Every argument of P is >= 1 on these domains, so only the exponential
    branch matters (the two branches differ at a single point).
    """
    if i < 2 or a < 0 or b < a or delta < 0 or beta <= 1:
        raise ValueError("need i >= 2, b >= a >= 0, delta >= 0, beta > 1")
    if closed_form:
        part = lambda k, s, lo, hi: _exp_integral(k, s, beta, lo, hi)
    else:
        part = lambda k, s, lo, hi: _integral(k, s, beta, lo, hi, QUAD_TOL)
    lhs = part(i, (a + delta) / i, 1 + a, 1 + b) + part(1, b + (a + delta) / (i - 1), 1 + b, math.inf)
    rhs = part(1, a + delta / i, 1 + a, math.inf)
    return lhs, rhs


def check_jump_claim(i: int, a: float, b: float, delta: float, beta: float) -> JumpClaimResult:
    return JumpClaimResult(*jump_claim_sides(i, a, b, delta, beta))


# ---------------------------------------------------------------------------
# Min latency special case
# ---------------------------------------------------------------------------


@dataclass
class MlcEdgeCheck:
    edge: int
    t_e: int
    c_x: float
    mean_cover: float
    stderr: float
    alpha: float

    @property
    def te_ok(self) -> bool:
        return self.t_e > 0 and self.t_e <= self.alpha / (self.alpha - 1) * self.c_x + LEMMA_SLACK

    @property
    def cover_ok(self) -> bool:
        return self.t_e > 0 and self.mean_cover <= self.alpha / 2 * self.t_e + 3 * self.stderr


@dataclass
class MlcReport:
    alpha: float
    lp_objective: float
    mean_total: float
    stderr: float
    rows: list[MlcEdgeCheck]

    @property
    def ok(self) -> bool:
        return all(r.te_ok and r.cover_ok for r in self.rows)


def mlc_check(
    instance: Instance,
    alpha: float = 2.0,
    trials: int = 2000,
    seed: int = 0,
    fractional: FractionalSchedule | None = None,
    strict: bool = False,
) -> MlcReport:
    """t_e <= alpha/(alpha-1) c_x(e) and mean Cov_sigma(e) <= (alpha/2) t_e per edge."""
    if not instance.is_mlc():
        raise GmsscError("not-mlc", "every edge needs k_e = |e|")
    fs = fractional or solve_gmssc_lp(instance)
    z = apply_kernel(mlc_kernel(alpha, instance.n), fs.x, fs.edge_x)
    cost = estimate_cost(z, instance, trials, seed)
    rows = [
        MlcEdgeCheck(e, int(z.t_edge[e]), float(fs.edge_costs[e]), float(cost.edge_cover[e]),
                     float(cost.edge_stderr[e]), alpha)
        for e in range(instance.m)
    ]
    report = MlcReport(alpha, fs.objective, cost.total, cost.stderr, rows)
    if strict and not report.ok:
        bad = next(r for r in rows if not (r.te_ok and r.cover_ok))
        raise GmsscError("lemma-violated", f"edge {bad.edge} fails the latency checks", witness=bad)
    return report
