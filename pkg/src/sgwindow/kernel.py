"""Savitzky-Golay smoothing kernels, zero-phase filtering and differencing.

Two independent constructions of the same coefficients are provided:

* :func:`kernel_cheb` samples ``alpha_{n+1} q_{n+1}(x) / x`` on the grid,
  using the Gram polynomials from :mod:`sgwindow.gram`;
* :func:`kernel_ls` takes the first row of the least-squares projector
  ``(A^T A)^{-1} A^T`` of a degree-``n`` polynomial fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from .errors import DomainError, LengthError, NumericError
from .gram import GramContext, eval_q, q_prime_zero

__all__ = [
    "MAX_ORDER",
    "EDGE_POLICIES",
    "FilterSpec",
    "Kernel",
    "Signal",
    "alpha",
    "kernel_cheb",
    "kernel_ls",
    "convolve_same",
    "smooth",
    "diff_m",
]

MAX_ORDER = 10
EDGE_POLICIES = ("reflect", "truncate", "hold")


@dataclass(frozen=True)
class FilterSpec:
    """Even filter order ``n`` and odd window length ``N = 2M + 1``."""

    n: int
    N: int

    def __post_init__(self):
        n, N = self.n, self.N
        if int(n) != n or n < 0 or n % 2:
            raise DomainError(f"order must be even and >= 0, got {n}")
        if n > MAX_ORDER:
            raise DomainError(f"order must be <= {MAX_ORDER}, got {n}")
        if int(N) != N or N % 2 == 0:
            raise DomainError(f"window must be odd, got {N}")
        if N < n + 3:
            raise DomainError(f"window must be >= order + 3 = {n + 3}, got {N}")

    @property
    def M(self) -> int:
        return (self.N - 1) // 2


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Kernel:
    """Symmetric coefficients ``w_{-M} .. w_M`` of one SG filter."""

    spec: FilterSpec
    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.shape != (self.spec.N,):
            raise DomainError(f"expected {self.spec.N} weights, got shape {w.shape}")
        object.__setattr__(self, "weights", w)

    @property
    def M(self) -> int:
        return self.spec.M

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def __getitem__(self, i: int) -> float:
        if abs(i) > self.M:
            raise IndexError(i)
        return float(self.weights[i + self.M])

    def moment(self, p: int) -> float:
        """``sum_i w_i i^p``."""
        return float(np.dot(self.weights, self.offsets.astype(float) ** p))


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled real sequence.

    ``t0``, ``dt`` and ``times`` are metadata carried through filtering
    untouched; the math only ever sees sample indices.
    """

    samples: np.ndarray
    t0: Optional[float] = None
    dt: Optional[float] = None
    times: Optional[np.ndarray] = None

    def __post_init__(self):
        x = _frozen(self.samples)
        if x.ndim != 1 or x.size < 1:
            raise LengthError("a signal needs at least one sample")
        object.__setattr__(self, "samples", x)
        if self.times is not None:
            t = _frozen(self.times)
            if t.shape != x.shape:
                raise LengthError("time column length differs from sample count")
            object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return self.samples.size

    def with_samples(self, samples) -> "Signal":
        """New signal carrying this one's metadata."""
        times = self.times if self.times is not None and len(samples) == len(self) else None
        return Signal(samples, t0=self.t0, dt=self.dt, times=times)


SignalLike = Union[Signal, np.ndarray, list]


def _samples(x: SignalLike) -> np.ndarray:
    if isinstance(x, Signal):
        return x.samples
    return np.asarray(x, dtype=float)


def _wrap(template: SignalLike, out: np.ndarray):
    if isinstance(template, Signal):
        return template.with_samples(out)
    return out


def alpha(spec: FilterSpec) -> float:
    """Scale factor ``alpha_{n+1}`` of the Chebyshev kernel polynomial."""
    n, N = spec.n, spec.N
    half = n // 2
    denom = N * math.prod(float(N * N - k * k) for k in range(2, n + 1, 2))
    return (n + 1) / 2 ** (n + 1) * math.comb(n, half) * (-1) ** half / denom


def _mirror(half: np.ndarray) -> np.ndarray:
    # half holds w_0 .. w_M
    return np.concatenate([half[:0:-1], half])


@lru_cache(maxsize=512)
def _cheb_weights(n: int, N: int) -> np.ndarray:
    spec = FilterSpec(n, N)
    a = alpha(spec)
    i = np.arange(1, spec.M + 1)
    half = np.empty(spec.M + 1)
    half[0] = a * q_prime_zero(n + 1, N)
    half[1:] = a * eval_q(GramContext(n + 1, N), i) / i
    return _frozen(_mirror(half))


def kernel_cheb(spec: FilterSpec) -> Kernel:
    """SG kernel from the Gram polynomial ``q_{n+1}``.

    ``w_i = alpha q_{n+1}(i) / i`` away from the centre and
    ``w_0 = alpha q'_{n+1}(0)``.

    >>> kernel_cheb(FilterSpec(2, 5)).weights * 35
    array([-3., 12., 17., 12., -3.])
    """
    return Kernel(spec, _cheb_weights(spec.n, spec.N))


@lru_cache(maxsize=128)
def _ls_weights(n: int, N: int) -> np.ndarray:
    spec = FilterSpec(n, N)
    M = spec.M
    # abscissae scaled to [-1, 1]; the intercept row of the projector is scale-free
    u = np.arange(-M, M + 1) / M
    A = np.vander(u, n + 1, increasing=True)
    gram = A.T @ A
    e0 = np.zeros(n + 1)
    e0[0] = 1.0
    try:
        c = np.linalg.solve(gram, e0)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"normal equations singular for n={n}, N={N}") from exc
    w = A @ c
    if not np.all(np.isfinite(w)):
        raise NumericError(f"non-finite least-squares weights for n={n}, N={N}")
    half = 0.5 * (w[M:] + w[M::-1])
    return _frozen(_mirror(half))


def kernel_ls(spec: FilterSpec) -> Kernel:
    """SG kernel from the normal equations of the local polynomial fit."""
    return Kernel(spec, _ls_weights(spec.n, spec.N))


def _truncated_edges(x: np.ndarray, out: np.ndarray, n: int, M: int) -> None:
    L = x.size
    for k in range(min(M, L)):
        for pos in {k, L - 1 - k}:
            m = min(pos, L - 1 - pos, M)
            if m == 0:
                out[pos] = x[pos]
                continue
            order = min(n, 2 * m - 2)
            w = _cheb_weights(order, 2 * m + 1)
            out[pos] = np.dot(w, x[pos - m:pos + m + 1])


def convolve_same(signal: SignalLike, kernel: Kernel, edge: str = "reflect"):
    """Zero-phase filtering ``y(k) = sum_i w_i x(k - i)``, same length as input.

    Interior samples (``M <= k <= L-1-M``) are the plain symmetric
    convolution for every edge policy. Near the ends:

    * ``reflect`` mirrors the signal about its first/last sample without
      repeating it;
    * ``hold`` repeats the boundary value;
    * ``truncate`` shrinks the window symmetrically and refits with the
      largest admissible even order.

    Accepts a :class:`Signal` (returned as a Signal with the same metadata)
    or a plain array (returned as an array).
    """
    x = _samples(signal)
    N, M = kernel.spec.N, kernel.M
    if x.size < N:
        raise LengthError(f"signal length {x.size} is shorter than the window {N}")
    if edge == "reflect":
        out = ndimage.convolve1d(x, kernel.weights, mode="mirror")
    elif edge == "hold":
        out = ndimage.convolve1d(x, kernel.weights, mode="nearest")
    elif edge == "truncate":
        out = ndimage.convolve1d(x, kernel.weights, mode="mirror")
        _truncated_edges(x, out, kernel.spec.n, M)
    else:
        raise DomainError(f"unknown edge policy {edge!r}; choose from {EDGE_POLICIES}")
    return _wrap(signal, out)


def smooth(signal: SignalLike, N: int, n: int, edge: str = "reflect"):
    """Shorthand for ``convolve_same(signal, kernel_cheb(FilterSpec(n, N)), edge)``."""
    return convolve_same(signal, kernel_cheb(FilterSpec(n, N)), edge)


def diff_m(signal: SignalLike, m: int):
    """``m``-th forward difference in sample-index units (length ``L - m``)."""
    x = _samples(signal)
    if int(m) != m or m < 0:
        raise DomainError(f"difference order must be a non-negative integer, got {m}")
    if x.size <= m:
        raise LengthError(f"need more than {m} samples, got {x.size}")
    out = np.diff(x, n=m)
    if isinstance(signal, Signal):
        return Signal(out, t0=signal.t0, dt=signal.dt)
    return out
