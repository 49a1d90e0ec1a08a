"""Kernel transforms z = K x.

Two lower-triangular kernels are supported:

* ``gmssc-beta``: K(t, t') = beta / t            for t' <= t   (row sums beta)
* ``mlc-alpha``:  K(t, t') = alpha t' / (t(t+1)) for t' <= t   (row sums alpha/2)

Time indices are 1-based in the maths and 0-based in arrays: ``z[:, t-1]`` is
z_{v,t} and ``z_before[:, t-1]`` is z_{v,<t} for t = 1..T_k+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import digamma

from . import _kernels
from .errors import GmsscError

GMSSC_BETA = "gmssc-beta"
MLC_ALPHA = "mlc-alpha"
KINDS = (GMSSC_BETA, MLC_ALPHA)

# Cumulative mass within this of 1 counts as having reached 1.
ONE_TOL = 1e-9


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    parameter: float
    horizon: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GmsscError("bad-kernel", f"unknown kernel kind {self.kind!r}")
        if self.kind == GMSSC_BETA and not self.parameter > 1:
            raise GmsscError("bad-beta", f"beta must exceed 1, got {self.parameter}")
        if self.kind == MLC_ALPHA and not self.parameter >= 2:
            raise GmsscError("bad-alpha", f"alpha must be at least 2, got {self.parameter}")
        if self.horizon < 1:
            raise GmsscError("bad-kernel", "kernel horizon must be positive")

    @property
    def row_sum(self) -> float:
        return self.parameter if self.kind == GMSSC_BETA else self.parameter / 2


def default_horizon(kind: str, parameter: float, n: int) -> int:
    if kind == GMSSC_BETA:
        return math.ceil(n * math.exp(1.0 / parameter)) + n
    return 4 * n


def gmssc_kernel(beta: float, n: int, horizon: int | None = None) -> KernelSpec:
    return KernelSpec(GMSSC_BETA, beta, horizon or default_horizon(GMSSC_BETA, beta, n))


def mlc_kernel(alpha: float, n: int, horizon: int | None = None) -> KernelSpec:
    return KernelSpec(MLC_ALPHA, alpha, horizon or default_horizon(MLC_ALPHA, alpha, n))


def kernel_entry(spec: KernelSpec, t: int, tp: int) -> float:
    if tp > t:
        return 0.0
    if spec.kind == GMSSC_BETA:
        return spec.parameter / t
    return spec.parameter * tp / (t * (t + 1))


def kernel_entry_exact(spec: KernelSpec, t: int, tp: int) -> Fraction:
    """Rational K(t, t'), for exact row-sum checks."""
    p = Fraction(spec.parameter)
    if tp > t:
        return Fraction(0)
    if spec.kind == GMSSC_BETA:
        return p / t
    return p * tp / (t * (t + 1))


def kernel_matrix(spec: KernelSpec, T: int) -> np.ndarray:
    """Dense (T_k, T) block of K; columns beyond T are never needed."""
    t = np.arange(1, spec.horizon + 1, dtype=float)[:, None]
    tp = np.arange(1, T + 1, dtype=float)[None, :]
    if spec.kind == GMSSC_BETA:
        K = np.broadcast_to(spec.parameter / t, (spec.horizon, T)).copy()
    else:
        K = spec.parameter * tp / (t * (t + 1))
    K[tp > t] = 0.0
    return K


@dataclass
class TransformedSchedule:
    spec: KernelSpec
    x: np.ndarray          # (n, T) source schedule
    z: np.ndarray          # (n, T_k)
    z_before: np.ndarray   # (n, T_k + 1); column t-1 = z_{v,<t}
    edge_x: np.ndarray | None = None
    z_edge: np.ndarray | None = None
    z_edge_before: np.ndarray | None = None
    t_edge: np.ndarray | None = None  # t_e per edge, 0 when not reached

    @property
    def y(self) -> np.ndarray:
        """y_{v,t} = min(1, z_{v,<t}), snapped to 1 within ONE_TOL."""
        return np.where(self.z_before >= 1.0 - ONE_TOL, 1.0, self.z_before)

    def reached(self) -> np.ndarray:
        """Boolean (n, T_k+1): z_{v,<t} >= 1."""
        return self.z_before >= 1.0 - ONE_TOL

    def cumulative_at(self, t: np.ndarray) -> np.ndarray:
        return cumulative_at(self.spec, self.x, t)


def _transform(spec: KernelSpec, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be a 2-d (rows, T) array")
    if x.shape[1] > spec.horizon:
        raise GmsscError("horizon-mismatch", f"schedule horizon {x.shape[1]} > kernel horizon {spec.horizon}")
    K = kernel_matrix(spec, x.shape[1])
    z = x @ K.T
    return z, _kernels.compensated_cumsum(z)


def apply_kernel(spec: KernelSpec, x: np.ndarray, edge_x: np.ndarray | None = None) -> TransformedSchedule:
    """Transform vertex series ``x`` and optionally edge series ``edge_x``.

    ``edge_x[e, t-1]`` is x_{e,t} = u_{e,t} - u_{e,t+1}; pass
    ``FractionalSchedule.edge_x`` to get t_e.
    """
    z, zb = _transform(spec, x)
    out = TransformedSchedule(spec, np.asarray(x, dtype=np.float64), z, zb)
    if edge_x is not None:
        ze, zeb = _transform(spec, edge_x)
        hit = zeb[:, 1:] >= 1.0 - ONE_TOL  # column t-1 <-> z_{e,<=t}
        first = np.argmax(hit, axis=1) + 1
        out.edge_x = np.asarray(edge_x, dtype=np.float64)
        out.z_edge = ze
        out.z_edge_before = zeb
        out.t_edge = np.where(hit.any(axis=1), first, 0)
    return out


def cumulative_at(spec: KernelSpec, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """z_{v,<t} for arbitrary integer t >= 1 in closed form.

    z_{v,<t} = sum_{t'} x_{v,t'} sum_{q=t'}^{t-1} K(q, t'), where the inner sum
    is beta (H_{t-1} - H_{t'-1}) or alpha (1 - t'/t).  Used to extend the
    transformed schedule past the kernel horizon.
    """
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    tp = np.arange(1, x.shape[1] + 1, dtype=np.float64)
    if spec.kind == GMSSC_BETA:
        # H_{t-1} - H_{t'-1} = digamma(t) - digamma(t')
        w = spec.parameter * (digamma(t)[None, :] - digamma(tp)[:, None])
    else:
        w = spec.parameter * (1.0 - tp[:, None] / t[None, :])
    w = np.where(tp[:, None] < t[None, :], w, 0.0)
    return x @ w


def mlc_prefix_identity(x_e: np.ndarray, t: int, alpha: float) -> float:
    """alpha * sum_{t' <= t} ((t - t') / t) x_{e,t'}: closed form of z_{e,<t}."""
    x_e = np.asarray(x_e, dtype=np.float64)
    tp = np.arange(1, min(t, x_e.size) + 1)
    return float(alpha * np.sum((t - tp) / t * x_e[: tp.size]))


def log_lower_bound(x: np.ndarray, t: int, beta: float) -> np.ndarray:
    """beta * sum_{t' <= t} x_{v,t'} ln(t / t'), a lower bound on z_{v,<t}."""
    x = np.asarray(x, dtype=np.float64)
    tp = np.arange(1, min(t, x.shape[1]) + 1)
    return beta * (x[:, : tp.size] @ np.log(t / tp))
