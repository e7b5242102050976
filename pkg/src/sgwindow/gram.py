"""Discrete Chebyshev (Gram) polynomials on the symmetric integer grid.

The polynomials ``q_n`` are orthogonal under summation over
``x = -M, ..., M`` with ``N = 2M + 1`` points and use the integer-valued
normalisation

    q_0(x) = 1
    q_1(x) = 2x
    q_2(x) = 6x^2 - 2M(M+1)
    q_3(x) = 20x^3 - 4x(3M^2 + 3M - 1)

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, IllPosedContextError

__all__ = [
    "GramContext",
    "eval_q",
    "eval_q_fd",
    "q_table",
    "q_zero",
    "q_prime_zero",
    "q_norm_sq",
    "u_moment",
]

ArrayLike = Union[int, np.ndarray, list]


def _check_window(N: int) -> None:
    if int(N) != N or N < 3 or N % 2 == 0:
        raise DomainError(f"window length must be an odd integer >= 3, got {N}")


@dataclass(frozen=True)
class GramContext:
    """Order ``n`` and window length ``N`` of one Gram polynomial."""

    n: int
    N: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"order must be a non-negative integer, got {self.n}")
        _check_window(self.N)
        if self.N <= self.n:
            raise IllPosedContextError(
                f"window length {self.N} must exceed the order {self.n}"
            )

    @property
    def M(self) -> int:
        return (self.N - 1) // 2


def _abscissae(ctx: GramContext, x: ArrayLike) -> np.ndarray:
    xa = np.asarray(x)
    if xa.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(xa, 1), 0)):
            raise DomainError("abscissae must be integers")
        xa = xa.astype(np.int64)
    if np.any(np.abs(xa) > ctx.M):
        raise DomainError(f"abscissae must satisfy |x| <= M = {ctx.M}")
    return xa


def _recurse(n: int, N: int, x: np.ndarray) -> np.ndarray:
    # (k+1) q_{k+1} = 2(2k+1) x q_k - k (N^2 - k^2) q_{k-1}
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 2.0 * x
    N2 = float(N) ** 2
    for k in range(1, n):
        prev, cur = cur, (2 * (2 * k + 1) * x * cur - k * (N2 - k * k) * prev) / (k + 1)
    return cur


def eval_q(ctx: GramContext, x: ArrayLike):
    """Evaluate ``q_n(x)`` with the three-term recursion.

    ``x`` may be a single integer or an array of integers in ``[-M, M]``.
    Returns a float for scalar input and an array otherwise.
    """
    xa = _abscissae(ctx, x)
    out = _recurse(ctx.n, ctx.N, xa)
    return float(out) if out.ndim == 0 else out


def q_table(nmax: int, N: int) -> np.ndarray:
    """Rows ``q_0 .. q_nmax`` sampled on ``x = -M..M``, shape ``(nmax+1, N)``."""
    _check_window(N)
    M = (N - 1) // 2
    x = np.arange(-M, M + 1, dtype=float)
    out = np.empty((nmax + 1, N))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * x
    N2 = float(N) ** 2
    for k in range(1, nmax):
        out[k + 1] = (2 * (2 * k + 1) * x * out[k] - k * (N2 - k * k) * out[k - 1]) / (k + 1)
    return out


def _binom_falling(a: int, b: int) -> int:
    # C(a, b) = a (a-1) ... (a-b+1) / b!, valid for negative a
    num = 1
    for j in range(b):
        num *= a - j
    return num // math.factorial(b)


def eval_q_fd(ctx: GramContext, x: ArrayLike):
    """Evaluate ``q_n(x)`` as ``n! * Delta^n [C(x+M, n) C(x-M-1, n)]``.

    Uses exact integer arithmetic. Slow; intended for cross-checking
    :func:`eval_q`.
    """
    xa = _abscissae(ctx, x)
    n, M = ctx.n, ctx.M

    def g(y: int) -> int:
        return _binom_falling(y + M, n) * _binom_falling(y - M - 1, n)

    def one(x0: int) -> float:
        acc = 0
        for k in range(n + 1):
            acc += (-1) ** (n - k) * math.comb(n, k) * g(x0 + k)
        return float(math.factorial(n) * acc)

    if xa.ndim == 0:
        return one(int(xa))
    return np.array([one(int(v)) for v in xa.ravel()]).reshape(xa.shape)


def _q_zero(n: int, N: int) -> float:
    half = n // 2
    prod = math.prod(N * N - (2 * k - 1) ** 2 for k in range(1, half + 1))
    return (-1) ** half * math.comb(n, half) * prod / 2**n


def q_zero(ctx: GramContext) -> float:
    """Closed-form ``q_n(0)`` for even ``n``."""
    if ctx.n % 2:
        raise DomainError("q_zero closed form requires an even order")
    return _q_zero(ctx.n, ctx.N)


def q_prime_zero(m: int, N: int) -> float:
    """Derivative ``q'_m(0)`` for odd ``m``.

    Obtained from the derivative of the three-term recursion at zero,
    seeded with ``q'_1(0) = 2``. For ``m = n + 1`` this is the limit of
    ``q_{n+1}(x) / x`` as ``x -> 0``.
    """
    if int(m) != m or m < 1 or m % 2 == 0:
        raise DomainError(f"q_prime_zero requires an odd order >= 1, got {m}")
    _check_window(N)
    dq = 2.0
    for k in range(3, m + 1, 2):
        j = k - 1
        dq = (2 * (2 * j + 1) * _q_zero(j, N) - j * (N * N - j * j) * dq) / k
    return dq


def q_norm_sq(ctx: GramContext) -> float:
    """Closed-form squared norm ``sum_x q_n(x)^2``."""
    n, N = ctx.n, ctx.N
    prod = math.prod(float(N * N - k * k) for k in range(1, n + 1))
    return N * prod / (2 * n + 1)


def u_moment(ctx: GramContext) -> float:
    """Closed-form leading moment ``u_n = sum_x q_n(x) x^n``."""
    n, N = ctx.n, ctx.N
    prod = math.prod(float(N * N - k * k) for k in range(1, n + 1))
    return N * math.factorial(n) ** 2 / math.factorial(2 * n + 1) * prod
