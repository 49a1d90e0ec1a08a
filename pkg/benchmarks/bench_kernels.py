"""Time the numba kernels against the pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from gmssc import _kernels
from gmssc.instance import GeneratorParams, generate
from gmssc.kernel import apply_kernel, gmssc_kernel
from gmssc.lp import build_base_lp, solve_gmssc_lp


def _cases():
    rng = np.random.default_rng(0)
    P = rng.random((4000, 12))
    inst = generate(GeneratorParams(n=16, m=12, s_min=1, s_max=4, seed=1))
    masks = np.array([e.mask for e in inst.edges], dtype=np.int64)
    small = generate(GeneratorParams(n=10, m=8, s_min=1, s_max=4, seed=2))
    fs = solve_gmssc_lp(small)
    zb = apply_kernel(gmssc_kernel(2.043, small.n), fs.x).z_before
    alpha, keys = rng.random((5000, small.n)), rng.random((5000, small.n))
    sigma = _kernels.get_kernel("round", "numpy")(zb, alpha, keys)[1]
    ptr, idx = small.csr()
    A, b, _ = build_base_lp(small).lp.dense()
    return {
        "pb_cdf": lambda k: k(P, 3),
        "cumsum": lambda k: k(P),
        "subset_dp": lambda k: k(masks, inst.ks, inst.n),
        "round": lambda k: k(zb, alpha, keys),
        "cover": lambda k: k(sigma, ptr, idx, small.ks),
        "simplex": lambda k: _simplex_case(k, A, b),
    }


def _simplex_case(kernel, A, b):
    # phase-one style tableau: [A | I | b] with the artificial basis
    m, n = A.shape
    A = np.where(b[:, None] < 0, -A, A)
    b = np.abs(b)
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n], tab[:m, n:n + m], tab[:m, -1] = A, np.eye(m), b
    tab[m] = -tab[:m].sum(axis=0)
    tab[m, n:n + m] = 0.0
    basis = np.arange(n, n + m, dtype=np.int64)
    return kernel(tab, basis, n, 1e-9, 10**6)


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    print(f"{'kernel':<10} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for name, case in _cases().items():
        fast, slow = _kernels.get_kernel(name, "numba"), _kernels.get_kernel(name, "numpy")
        case(fast)  # compile
        t_fast, t_slow = _time(lambda: case(fast), args.repeat), _time(lambda: case(slow), args.repeat)
        print(f"{name:<10} {t_slow * 1e3:>11.2f} {t_fast * 1e3:>11.2f} {t_slow / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
