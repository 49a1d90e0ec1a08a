"""Hot numeric kernels with two interchangeable backends.

Every kernel exists twice: a loop version (compiled with ``numba.njit`` when
numba is importable) and a vectorised pure-numpy version.  Set the
environment variable ``GMSSC_DISABLE_NUMBA=1`` before import to force the
numpy path.  Both paths consume identical inputs and return identical
outputs up to floating-point summation order; ``tests/test_kernels.py``
checks that, and ``benchmarks/bench_kernels.py`` times them.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    flag = os.environ.get("GMSSC_DISABLE_NUMBA", "").strip().lower()
    return flag in ("1", "true", "yes", "on")


try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA and not _numba_disabled() else "numpy"

# Simplex exit codes.
OPTIMAL, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2

# Ratio-test ties closer than this (relative) are treated as exact ties.
_RATIO_TIE = 1e-12


# ---------------------------------------------------------------------------
# Poisson-binomial CDF, batched: out[b] = Pr[sum_i Bernoulli(P[b, i]) <= c]
# ---------------------------------------------------------------------------


def _pb_cdf_loops(P, c):
    B, n = P.shape
    out = np.zeros(B)
    if c < 0:
        return out
    if c >= n:
        out[:] = 1.0
        return out
    dist = np.zeros(c + 1)
    for b in range(B):
        dist[:] = 0.0
        dist[0] = 1.0
        for i in range(n):
            p = P[b, i]
            q = 1.0 - p
            top = i + 1 if i + 1 < c else c
            for j in range(top, 0, -1):
                dist[j] = dist[j] * q + dist[j - 1] * p
            dist[0] *= q
        s = 0.0
        for j in range(c + 1):
            s += dist[j]
        out[b] = s
    return out


def _pb_cdf_numpy(P, c):
    B, n = P.shape
    if c < 0:
        return np.zeros(B)
    if c >= n:
        return np.ones(B)
    dist = np.zeros((B, c + 1))
    dist[:, 0] = 1.0
    for i in range(n):
        p = P[:, i:i + 1]
        q = 1.0 - p
        nxt = dist * q
        nxt[:, 1:] += dist[:, :-1] * p
        dist = nxt
    return dist.sum(axis=1)


# ---------------------------------------------------------------------------
# Compensated (Neumaier) prefix sums along axis 1 with a leading zero column.
# ---------------------------------------------------------------------------


def _cumsum_loops(a):
    rows, cols = a.shape
    out = np.zeros((rows, cols + 1))
    for r in range(rows):
        s = 0.0
        comp = 0.0
        for j in range(cols):
            v = a[r, j]
            t = s + v
            if abs(s) >= abs(v):
                comp += (s - t) + v
            else:
                comp += (v - t) + s
            s = t
            out[r, j + 1] = s + comp
    return out


def _cumsum_numpy(a):
    rows, cols = a.shape
    out = np.zeros((rows, cols + 1))
    s = np.zeros(rows)
    comp = np.zeros(rows)
    for j in range(cols):
        v = a[:, j]
        t = s + v
        big = np.abs(s) >= np.abs(v)
        comp += np.where(big, (s - t) + v, (v - t) + s)
        s = t
        out[:, j + 1] = s + comp
    return out


# ---------------------------------------------------------------------------
# Subset DP for the exact optimum.
#   uncovered[S] = #edges e with |e & S| < k_e
#   best[S] = min_{v in S} best[S - v] + uncovered[S - v],   best[0] = 0
# ---------------------------------------------------------------------------


def _popcount64(x):
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    return (x * 0x0101010101010101) >> 56 & 0xFF


def _subset_dp_loops(masks, ks, n):
    size = 1 << n
    m = masks.shape[0]
    uncovered = np.zeros(size, dtype=np.int64)
    best = np.zeros(size, dtype=np.int64)
    for S in range(size):
        cnt = 0
        for e in range(m):
            if _popcount64(S & masks[e]) < ks[e]:
                cnt += 1
        uncovered[S] = cnt
    for S in range(1, size):
        b = 2**62
        for v in range(n):
            bit = 1 << v
            if S & bit:
                prev = S ^ bit
                val = best[prev] + uncovered[prev]
                if val < b:
                    b = val
        best[S] = b
    return best, uncovered


def _subset_dp_numpy(masks, ks, n):
    size = 1 << n
    all_sets = np.arange(size, dtype=np.int64)
    uncovered = np.zeros(size, dtype=np.int64)
    for mask, k in zip(masks, ks):
        uncovered += np.bitwise_count(all_sets & mask) < k
    layer = np.bitwise_count(all_sets)
    order = np.argsort(layer, kind="stable")
    bounds = np.searchsorted(layer[order], np.arange(n + 2))
    best = np.zeros(size, dtype=np.int64)
    big = 2**62
    for j in range(1, n + 1):
        S = order[bounds[j]:bounds[j + 1]]
        b = np.full(S.shape, big, dtype=np.int64)
        for v in range(n):
            has = (S >> v) & 1
            prev = S ^ (1 << v)
            cand = np.where(has == 1, best[prev] + uncovered[prev], big)
            np.minimum(b, cand, out=b)
        best[S] = b
    return best, uncovered


# ---------------------------------------------------------------------------
# Alpha-point rounding, batched over trials.
#   zb[v, i] = z_{v,<i+1} (non-decreasing).  tau = first i+1 with zb >= alpha,
#   or L + 1 when never reached.  sigma sorts by (tau, tie key, vertex id).
# ---------------------------------------------------------------------------

_KEY_BITS = 40


def _round_loops(zb, alpha, keys):
    n, L = zb.shape
    R = alpha.shape[0]
    tau = np.empty((R, n), dtype=np.int64)
    sigma = np.empty((R, n), dtype=np.int64)
    scale = float(1 << _KEY_BITS)
    sort_key = np.empty(n, dtype=np.int64)
    for r in range(R):
        for v in range(n):
            a = alpha[r, v]
            lo = 0
            hi = L
            while lo < hi:
                mid = (lo + hi) // 2
                if zb[v, mid] >= a:
                    hi = mid
                else:
                    lo = mid + 1
            tau[r, v] = lo + 1
            sort_key[v] = (lo + 1) * (1 << _KEY_BITS) + np.int64(keys[r, v] * scale)
        sigma[r, :] = np.argsort(sort_key, kind="mergesort")
    return tau, sigma


def _round_numpy(zb, alpha, keys):
    n, L = zb.shape
    R = alpha.shape[0]
    tau = np.empty((R, n), dtype=np.int64)
    for v in range(n):
        tau[:, v] = np.searchsorted(zb[v], alpha[:, v], side="left") + 1
    scale = float(1 << _KEY_BITS)
    sort_key = tau * (1 << _KEY_BITS) + (keys * scale).astype(np.int64)
    sigma = np.argsort(sort_key, axis=1, kind="stable")
    return tau, sigma


# ---------------------------------------------------------------------------
# Cover times, batched: cov[r, e] = 1-based position of the k_e-th vertex of
# edge e in sigma[r].  Edges are given in CSR form (ptr, idx).
# ---------------------------------------------------------------------------


def _cover_loops(sigma, ptr, idx, ks):
    R, n = sigma.shape
    m = ks.shape[0]
    cov = np.empty((R, m), dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    width = 1
    for e in range(m):
        width = max(width, ptr[e + 1] - ptr[e])
    buf = np.empty(width, dtype=np.int64)
    for r in range(R):
        for i in range(n):
            pos[sigma[r, i]] = i + 1
        for e in range(m):
            size = 0
            for j in range(ptr[e], ptr[e + 1]):
                p = pos[idx[j]]
                h = size
                while h > 0 and buf[h - 1] > p:  # insertion sort
                    buf[h] = buf[h - 1]
                    h -= 1
                buf[h] = p
                size += 1
            cov[r, e] = buf[ks[e] - 1]
    return cov


def _cover_numpy(sigma, ptr, idx, ks):
    R, n = sigma.shape
    pos = np.empty_like(sigma)
    np.put_along_axis(pos, sigma, np.arange(1, n + 1)[None, :].repeat(R, 0), axis=1)
    cov = np.empty((R, ks.shape[0]), dtype=np.int64)
    for e in range(ks.shape[0]):
        vals = pos[:, idx[ptr[e]:ptr[e + 1]]]
        k = ks[e]
        cov[:, e] = np.partition(vals, k - 1, axis=1)[:, k - 1]
    return cov


# ---------------------------------------------------------------------------
# Primal simplex iterations on a dense tableau with Bland's rule.
#   tab: (m + 1, C + 1); rows 0..m-1 constraints, row m reduced costs, last
#   column right-hand side.  basis[i] is the column basic in row i.  Only
#   columns < n_enter may enter.  Mutates tab and basis in place.
# ---------------------------------------------------------------------------


def _simplex_loops(tab, basis, n_enter, tol, max_iter):
    m = tab.shape[0] - 1
    ncol = tab.shape[1]
    rhs = ncol - 1
    it = 0
    while True:
        j = -1
        for c in range(n_enter):
            if tab[m, c] < -tol:
                j = c
                break
        if j < 0:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it
        best = np.inf
        for i in range(m):
            a = tab[i, j]
            if a > tol:
                r = max(tab[i, rhs], 0.0) / a
                if r < best:
                    best = r
        if best == np.inf:
            return UNBOUNDED, it
        lim = best + _RATIO_TIE * (1.0 + abs(best))
        piv = -1
        low = 2**62
        for i in range(m):
            a = tab[i, j]
            if a > tol:
                r = max(tab[i, rhs], 0.0) / a
                if r <= lim and basis[i] < low:
                    low = basis[i]
                    piv = i
        p = tab[piv, j]
        for c in range(ncol):
            tab[piv, c] /= p
        for i in range(m + 1):
            if i != piv:
                f = tab[i, j]
                if f != 0.0:
                    for c in range(ncol):
                        tab[i, c] -= f * tab[piv, c]
                    tab[i, j] = 0.0
        tab[piv, j] = 1.0
        basis[piv] = j
        it += 1


def _simplex_numpy(tab, basis, n_enter, tol, max_iter):
    m = tab.shape[0] - 1
    it = 0
    while True:
        neg = np.flatnonzero(tab[m, :n_enter] < -tol)
        if neg.size == 0:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it
        j = neg[0]
        col = tab[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = np.maximum(tab[rows, -1], 0.0) / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + _RATIO_TIE * (1.0 + abs(best))]
        piv = tied[np.argmin(basis[tied])]
        tab[piv] /= tab[piv, j]
        f = tab[:, j].copy()
        f[piv] = 0.0
        tab -= np.outer(f, tab[piv])
        tab[:, j] = 0.0
        tab[piv, j] = 1.0
        basis[piv] = j
        it += 1


_LOOP_KERNELS = {
    "pb_cdf": _pb_cdf_loops,
    "cumsum": _cumsum_loops,
    "subset_dp": _subset_dp_loops,
    "round": _round_loops,
    "cover": _cover_loops,
    "simplex": _simplex_loops,
}
_NUMPY_KERNELS = {
    "pb_cdf": _pb_cdf_numpy,
    "cumsum": _cumsum_numpy,
    "subset_dp": _subset_dp_numpy,
    "round": _round_numpy,
    "cover": _cover_numpy,
    "simplex": _simplex_numpy,
}
_JITTED: dict = {}


def _jit_all():
    if _JITTED or not HAVE_NUMBA:
        return
    pop = _njit(cache=True)(_popcount64)
    globals()["_popcount64"] = pop
    for name, fn in _LOOP_KERNELS.items():
        _JITTED[name] = _njit(cache=True)(fn)


def get_kernel(name: str, backend: str | None = None):
    """Return kernel ``name`` for ``backend`` ("numba" or "numpy")."""
    backend = backend or BACKEND
    if backend == "numpy":
        return _NUMPY_KERNELS[name]
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        _jit_all()
        return _JITTED[name]
    raise ValueError(f"unknown backend {backend!r}")


def pb_cdf_batch(P: np.ndarray, c: int) -> np.ndarray:
    return get_kernel("pb_cdf")(np.ascontiguousarray(P, dtype=np.float64), int(c))


def compensated_cumsum(a: np.ndarray) -> np.ndarray:
    return get_kernel("cumsum")(np.ascontiguousarray(a, dtype=np.float64))


def subset_dp(masks: np.ndarray, ks: np.ndarray, n: int):
    return get_kernel("subset_dp")(
        np.asarray(masks, dtype=np.int64), np.asarray(ks, dtype=np.int64), int(n)
    )


def round_batch(zb: np.ndarray, alpha: np.ndarray, keys: np.ndarray):
    return get_kernel("round")(
        np.ascontiguousarray(zb, dtype=np.float64),
        np.ascontiguousarray(alpha, dtype=np.float64),
        np.ascontiguousarray(keys, dtype=np.float64),
    )


def cover_batch(sigma, ptr, idx, ks):
    return get_kernel("cover")(
        np.ascontiguousarray(sigma, dtype=np.int64),
        np.asarray(ptr, dtype=np.int64),
        np.asarray(idx, dtype=np.int64),
        np.asarray(ks, dtype=np.int64),
    )


def simplex_iterate(tab, basis, n_enter, tol, max_iter):
    status, it = get_kernel("simplex")(tab, basis, int(n_enter), float(tol), int(max_iter))
    return int(status), int(it)
