"""Lower-tail bounds for sums of independent Bernoulli variables.

``p_k_bound(k, x)`` bounds Pr[S <= k-1] when E[S] = k x.  It is checked here
against the exact Poisson-binomial CDF, the i.i.d. binomial bound, and the
Poisson bound e^{-lam} sum_{i<k} lam^i / i!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from . import _kernels
from .errors import GmsscError


def p_k_bound(k: int, x):
    """1 on [0, 1]; exp(-sqrt(k) (x - (k-1)/k)) for x > 1.  Vectorised in x."""
    if k < 1:
        raise GmsscError("bad-k", f"k must be >= 1, got {k}")
    xa = np.asarray(x, dtype=np.float64)
    val = np.where(xa > 1.0, np.exp(-math.sqrt(k) * (xa - (k - 1) / k)), 1.0)
    return float(val) if val.ndim == 0 else val


def _log_binom_cdf(n: int, p: float, c: int) -> float:
    """log Pr[Bin(n, p) <= c], summed in log space."""
    if c < 0:
        return -math.inf
    if c >= n or p <= 0.0:
        return 0.0
    if p >= 1.0:
        return -math.inf
    i = np.arange(c + 1)
    terms = gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1) + i * math.log(p) + (n - i) * math.log1p(-p)
    return min(0.0, float(logsumexp(terms)))


def binomial_cdf(n: int, p: float, c: int) -> float:
    return math.exp(_log_binom_cdf(n, p, c))


def binomial_tail(n: int, p: float, c: int) -> float:
    """Three-branch bound on Pr[S <= c] for S a Bernoulli sum of mean n p.

    * c <= np - 1: the Bin(n, p) CDF at c
    * np <= c:     1
    * otherwise:   max over s = 0..c of the Bin(n-s, (np-s)/(n-s)) CDF at c-s
    """
    if not 0.0 <= p <= 1.0:
        raise GmsscError("domain", f"p must lie in [0, 1], got {p}")
    if not (0 <= c <= n) or int(c) != c:
        raise GmsscError("domain", f"need integer 0 <= c <= n, got c={c}, n={n}")
    mean = n * p
    if c <= mean - 1:
        return binomial_cdf(n, p, c)
    if mean <= c:
        return 1.0
    best = 0.0
    for s in range(c + 1):
        q = min(1.0, max(0.0, (mean - s) / (n - s)))
        best = max(best, binomial_cdf(n - s, q, c - s))
    return best


def poisson_tail(lam: float, k: int) -> float:
    """e^{-lam} sum_{i<k} lam^i / i!."""
    if lam < 0 or k < 1:
        raise GmsscError("domain", f"need lam >= 0 and k >= 1, got lam={lam}, k={k}")
    if lam == 0.0:
        return 1.0
    i = np.arange(k)
    terms = -lam + i * math.log(lam) - gammaln(i + 1)
    return min(1.0, math.exp(float(logsumexp(terms))))


def poisson_binomial_cdf(p, c: int) -> float:
    """Exact Pr[sum_i Bernoulli(p_i) <= c] by dynamic programming."""
    p = np.asarray(p, dtype=np.float64).reshape(1, -1)
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise GmsscError("domain", "probabilities must lie in [0, 1]")
    return float(_kernels.pb_cdf_batch(p, int(c))[0])


def poisson_binomial_cdf_batch(P: np.ndarray, c: int) -> np.ndarray:
    return _kernels.pb_cdf_batch(P, int(c))


# ---------------------------------------------------------------------------
# Randomised dominance check
# ---------------------------------------------------------------------------


@dataclass
class DominanceRow:
    k: int
    n: int
    seed: int
    exact: float
    p_k: float
    binomial: float
    poisson: float

    @property
    def margin(self) -> float:
        return min(self.p_k, self.binomial) - self.exact


@dataclass
class DominanceReport:
    rows: list[DominanceRow] = field(default_factory=list)
    violations: list[tuple[str, DominanceRow]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def worst_margin(self) -> float:
        return min(r.margin for r in self.rows)

    def csv_lines(self) -> list[str]:
        out = ["k,n,seed,exact,p_k,binomial,poisson,margin"]
        for r in self.rows:
            out.append(
                f"{r.k},{r.n},{r.seed},{r.exact:.12g},{r.p_k:.12g},{r.binomial:.12g},"
                f"{r.poisson:.12g},{r.margin:.12g}"
            )
        return out


def _draw_probabilities(rng: np.random.Generator, n: int) -> np.ndarray:
    style = rng.integers(4)
    if style == 0:
        p = rng.random(n)
    elif style == 1:
        p = rng.beta(0.4, 0.4, n)
    elif style == 2:
        p = np.full(n, rng.random())
    else:
        p = rng.random(n)
        snap = rng.random(n)
        p[snap < 0.2] = 0.0
        p[snap > 0.8] = 1.0
    return p


def verify_dominance(
    k_max: int = 8,
    n_max: int = 12,
    queries: int = 10_000,
    seed: int = 0,
    tol: float = 1e-12,
    strict: bool = False,
) -> DominanceReport:
    """Check exact <= binomial bound and exact <= P^k on seeded random queries.

    In the branch c <= np - 1 the chain binomial <= Poisson <= P^k is checked
    too.  Query ``i`` uses seed ``seed + i``.
    """
    if k_max < 1:
        raise GmsscError("bad-k", "k_max must be >= 1")
    report = DominanceReport()
    for i in range(queries):
        qseed = seed + i
        rng = np.random.Generator(np.random.Philox(key=qseed))
        k = int(rng.integers(1, k_max + 1))
        n = int(rng.integers(1, n_max + 1))
        p = _draw_probabilities(rng, n)
        mean = float(p.sum())
        pbar = min(1.0, mean / n)
        exact = poisson_binomial_cdf(p, k - 1)
        pk = p_k_bound(k, mean / k)
        binom = binomial_tail(n, pbar, k - 1) if k - 1 <= n else 1.0
        pois = poisson_tail(mean, k)
        row = DominanceRow(k, n, qseed, exact, pk, binom, pois)
        report.rows.append(row)
        if exact > pk + tol:
            report.violations.append(("exact>p_k", row))
        if exact > binom + tol:
            report.violations.append(("exact>binomial", row))
        if k - 1 <= mean - 1:
            if binom > pois + tol:
                report.violations.append(("binomial>poisson", row))
            if pois > pk + tol:
                report.violations.append(("poisson>p_k", row))
    if strict and report.violations:
        kind, row = report.violations[0]
        raise GmsscError("dominance-violated", f"{kind} at k={row.k}, n={row.n}, seed={row.seed}", witness=row)
    return report


# ---------------------------------------------------------------------------
# Quantities behind the closed-form bound
# ---------------------------------------------------------------------------


def eta(k: int) -> float:
    return (k - 1) / k


def t_zero(k: int) -> float:
    """(k - 1) / (k - sqrt(k)): the maximiser of s_value."""
    return (k - 1) / (k - math.sqrt(k))


def r_value(k: int, x):
    """Poisson tail at mean k x divided by exp(-sqrt(k) (x - (k-1)/k)), in log space."""
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    i = np.arange(k)[:, None]
    with np.errstate(divide="ignore"):
        logs = i * np.log(k * xa)[None, :] - gammaln(i + 1)
    logs = np.where((i == 0) & (xa[None, :] == 0), 0.0, logs)
    out = np.exp(-k * xa + math.sqrt(k) * (xa - eta(k)) + logsumexp(logs, axis=0))
    return float(out[0]) if np.ndim(x) == 0 else out


def s_value(k: int, t: float) -> float:
    """sqrt(k) (k t)^{k-1} / (k-1)! * exp((sqrt(k) - k) t - (k-1)/sqrt(k))."""
    rk = math.sqrt(k)
    log = 0.5 * math.log(k) + (k - 1) * math.log(k * t) - math.lgamma(k) + (rk - k) * t - (k - 1) / rk
    return math.exp(log)


def s_at_t_zero(k: int) -> float:
    """Closed form of s_value(k, t_zero(k))."""
    rk = math.sqrt(k)
    log = (k / 2) * math.log(k) + (k - 1) * math.log(rk + 1) - math.lgamma(k) - (k - 1) / rk - k + 1
    return math.exp(log)


def stirling_bound(k: int) -> float:
    """exp(1/2 + 1/sqrt(k)) sqrt(k / (2 pi (k - 1))), an upper bound on s_at_t_zero."""
    return math.exp(0.5 + 1 / math.sqrt(k)) * math.sqrt(k / (2 * math.pi * (k - 1)))


@dataclass
class TailQuantitiesReport:
    k: int
    r_at_eta: float
    r_grid_max: float
    r_argmax: float
    s_t0: float
    stirling: float
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def verify_tail_quantities(k: int, grid_points: int = 2048, x_max: float = 50.0,
                           tol: float = 1e-12, strict: bool = False) -> TailQuantitiesReport:
    """Numerically confirm R(x) <= 1 on [eta, x_max] and the S(t0) < 1 bounds for ``k``."""
    if k < 2:
        raise GmsscError("bad-k", "needs k >= 2")
    e = eta(k)
    grid = np.concatenate([np.geomspace(e, x_max, grid_points), [e, t_zero(k)]])
    r = r_value(k, grid)
    i = int(np.argmax(r))
    s0 = s_at_t_zero(k)
    st = stirling_bound(k)
    r_eta = r_value(k, e)
    checks = {
        "R(eta)<=1": r_eta <= 1.0 + tol,
        "max R<=1": float(r[i]) <= 1.0 + tol,
        "R<=S(t0)": float(r[i]) <= s0 + 1e-9,
    }
    if k <= 8:
        checks["S(t0)<1"] = s0 < 1.0
    else:
        checks["stirling<1"] = st < 1.0
        checks["S(t0)<=stirling"] = s0 <= st + tol
    report = TailQuantitiesReport(k, r_eta, float(r[i]), float(grid[i]), s0, st, checks)
    if strict and not report.ok:
        bad = [name for name, good in checks.items() if not good]
        raise GmsscError("claim-violated", f"k={k}: {bad}", report=report)
    return report


verify_theorem3_quantities = verify_tail_quantities
