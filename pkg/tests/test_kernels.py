"""The numba and pure-numpy backends must agree on every kernel."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmssc import _kernels
from gmssc.instance import GeneratorParams, generate
from gmssc.kernel import apply_kernel, gmssc_kernel
from gmssc.lp import solve_gmssc_lp

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def both(name):
    return _kernels.get_kernel(name, "numba"), _kernels.get_kernel(name, "numpy")


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), B=st.integers(1, 5), n=st.integers(0, 12), c=st.integers(-1, 13))
def test_pb_cdf(seed, B, n, c):
    rng = np.random.default_rng(seed)
    P = rng.random((B, n))
    P[rng.random((B, n)) < 0.2] = 1.0
    jit, ref = both("pb_cdf")
    np.testing.assert_allclose(jit(P, c), ref(P, c), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), rows=st.integers(1, 4), cols=st.integers(0, 30))
def test_cumsum(seed, rows, cols):
    a = np.random.default_rng(seed).random((rows, cols))
    jit, ref = both("cumsum")
    out = jit(a)
    np.testing.assert_array_equal(out, ref(a))
    assert out.shape == (rows, cols + 1) and np.all(out[:, 0] == 0)
    np.testing.assert_allclose(out[:, 1:], np.cumsum(a, axis=1), rtol=1e-13)


def test_cumsum_compensation():
    a = np.array([[1.0, 1e-16, 1e-16, 1e-16, 1e-16] * 20])
    assert _kernels.compensated_cumsum(a)[0, -1] == pytest.approx(20 + 80e-16, abs=1e-16)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 10), m=st.integers(1, 8))
def test_subset_dp(seed, n, m):
    inst = generate(GeneratorParams(n=n, m=m, s_min=1, s_max=min(4, n), seed=seed))
    masks = np.array([e.mask for e in inst.edges], dtype=np.int64)
    jit, ref = both("subset_dp")
    a, b = jit(masks, inst.ks, n), ref(masks, inst.ks, n)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 8), m=st.integers(1, 6), trials=st.integers(1, 40))
def test_round_and_cover(seed, n, m, trials):
    inst = generate(GeneratorParams(n=n, m=m, s_min=1, s_max=min(3, n), seed=seed))
    fs = solve_gmssc_lp(inst)
    z = apply_kernel(gmssc_kernel(2.043, n), fs.x)
    rng = np.random.default_rng(seed)
    alpha, keys = rng.random((trials, n)), rng.random((trials, n))
    keys[:, 0] = keys[:, -1]  # force tie keys
    jit, ref = both("round")
    (t1, s1), (t2, s2) = jit(z.z_before, alpha, keys), ref(z.z_before, alpha, keys)
    np.testing.assert_array_equal(t1, t2)
    np.testing.assert_array_equal(s1, s2)
    ptr, idx = inst.csr()
    jit, ref = both("cover")
    np.testing.assert_array_equal(jit(s1, ptr, idx, inst.ks), ref(s1, ptr, idx, inst.ks))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6), m=st.integers(1, 5))
def test_simplex_backends_agree(seed, n, m):
    inst = generate(GeneratorParams(n=n, m=m, s_min=1, s_max=min(3, n), seed=seed))
    saved = _kernels.BACKEND
    try:
        _kernels.BACKEND = "numba"
        a = solve_gmssc_lp(inst)
        _kernels.BACKEND = "numpy"
        b = solve_gmssc_lp(inst)
    finally:
        _kernels.BACKEND = saved
    assert a.objective == pytest.approx(b.objective, abs=1e-9)
    np.testing.assert_allclose(a.x, b.x, atol=1e-9)


def test_env_flag_selects_numpy():
    env = dict(os.environ, GMSSC_DISABLE_NUMBA="1")
    code = "from gmssc import _kernels; print(_kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.get_kernel("pb_cdf", "cuda")
