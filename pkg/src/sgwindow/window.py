"""MSE-optimal window length for even-order Savitzky-Golay smoothing.

The predicted mean squared error of an order-``n`` filter of length ``N``
applied to ``f + noise`` is

    cost(N) = v_n * mu(N)^2 + sigma^2 * sum_i w_i^2

where ``mu`` is the first surviving kernel moment
``sum_i w_i i^(n+2) / (n+2)!`` and ``v_n`` is the mean squared
``(n+2)``-th derivative of ``f`` in per-sample units. For ``N >> n``,
``mu ~ h_n N^(n+2)`` and ``sum w^2 ~ beta_n / N``, which gives a
closed-form minimiser.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError, LengthError, UndefinedMinimumError
from .gram import q_prime_zero
from .kernel import MAX_ORDER, FilterSpec, Signal, SignalLike, _samples, alpha, diff_m, smooth

__all__ = [
    "beta",
    "h_coef",
    "mu_exact",
    "mu_asymptotic",
    "w0_exact",
    "odd_round",
    "CostModel",
    "WindowBounds",
    "cost",
    "nopt_closed",
    "mmse_closed",
    "r_coef",
    "vn_from_clean",
    "estimate_sigma",
    "Iteration",
    "SelectionTrace",
    "select_window_iterative",
    "STATUSES",
]

log = logging.getLogger(__name__)

MAX_ITER = 50
DEFAULT_MAX_WINDOW = 10001
STATUSES = ("converged", "cycle-resolved", "iteration-capped", "saturated-at-bound")


def _check_order(n: int) -> None:
    if int(n) != n or n < 0 or n % 2 or n > MAX_ORDER:
        raise DomainError(f"order must be even with 0 <= n <= {MAX_ORDER}, got {n}")


def beta(n: int) -> float:
    """Large-``N`` limit of ``N * w_0``."""
    _check_order(n)
    return ((n + 1) / 2**n * math.comb(n, n // 2)) ** 2


def h_coef(n: int) -> float:
    """Leading coefficient of the moment ``mu`` as a polynomial in ``N``."""
    _check_order(n)
    num = (-1) ** (n // 2) * (n + 1) * math.factorial(n + 1) * math.comb(n, n // 2)
    return num / (2 ** (n + 1) * (n + 2) * math.factorial(2 * n + 3))


def mu_exact(spec: FilterSpec) -> float:
    """``mu = h_n (N^2 - 1)(N^2 - 9) ... (N^2 - (n+1)^2)``."""
    N = spec.N
    prod = math.prod(float(N * N - k * k) for k in range(1, spec.n + 2, 2))
    return h_coef(spec.n) * prod


def mu_asymptotic(n: int, N: float) -> float:
    if N <= 0:
        raise DomainError(f"window length must be positive, got {N}")
    return h_coef(n) * float(N) ** (n + 2)


def w0_exact(spec: FilterSpec) -> float:
    """Centre weight ``w_0``, which also equals ``sum_i w_i^2``."""
    return alpha(spec) * q_prime_zero(spec.n + 1, spec.N)


def odd_round(x: float) -> int:
    """Nearest odd integer; exact ties go to the smaller one."""
    k = (x - 1.0) / 2.0
    lo = math.floor(k)
    return 2 * (lo if k - lo <= 0.5 else lo + 1) + 1


@dataclass(frozen=True)
class CostModel:
    """Noise variance ``sigma2`` and roughness ``vn`` for an order-``n`` filter."""

    n: int
    sigma2: float
    vn: float

    def __post_init__(self):
        _check_order(self.n)
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")
        if not self.vn >= 0 or not math.isfinite(self.vn):
            raise DomainError(f"vn must be finite and non-negative, got {self.vn}")

    @property
    def beta(self) -> float:
        return beta(self.n)

    @property
    def h(self) -> float:
        return h_coef(self.n)


@dataclass(frozen=True)
class WindowBounds:
    n_min: int
    n_max: int

    def __post_init__(self):
        for v in (self.n_min, self.n_max):
            if int(v) != v or v % 2 == 0:
                raise DomainError(f"window bounds must be odd integers, got {v}")
        if self.n_min < 3 or self.n_min > self.n_max:
            raise DomainError(f"invalid window bounds [{self.n_min}, {self.n_max}]")

    @classmethod
    def for_order(cls, n: int, length: Optional[int] = None,
                  n_max: Optional[int] = None) -> "WindowBounds":
        """Default bounds: ``[n + 3, largest odd <= L - 1]`` (or 10001)."""
        _check_order(n)
        if n_max is None:
            if length is None:
                n_max = DEFAULT_MAX_WINDOW
            else:
                n_max = length - 1 if (length - 1) % 2 else length - 2
        elif n_max % 2 == 0:
            n_max -= 1
        return cls(n + 3, n_max)

    def clamp(self, N: int) -> int:
        return min(max(N, self.n_min), self.n_max)

    def __contains__(self, N: int) -> bool:
        return self.n_min <= N <= self.n_max and N % 2 == 1


def cost(model: CostModel, N: int, mode: str = "exact") -> float:
    """Predicted MSE of an order-``n``, length-``N`` filter.

    ``exact`` uses the finite-``N`` moment and ``sum w^2 = w_0``;
    ``asymptotic`` uses ``h_n^2 N^(2n+4)`` and ``beta_n / N``.
    """
    if mode == "exact":
        spec = FilterSpec(model.n, N)
        return model.vn * mu_exact(spec) ** 2 + model.sigma2 * w0_exact(spec)
    if mode == "asymptotic":
        if int(N) != N or N < 1 or N % 2 == 0:
            raise DomainError(f"window must be a positive odd integer, got {N}")
        return _cost_asym(model, float(N))
    raise DomainError(f"unknown cost mode {mode!r}")


def _cost_asym(model: CostModel, N: float) -> float:
    n = model.n
    return model.vn * model.h**2 * N ** (2 * n + 4) + model.sigma2 * model.beta / N


def _nstar(n: int, sigma2: float, vn: float) -> float:
    if vn == 0:
        return math.inf
    ratio = 2 * (n + 2) * math.factorial(2 * n + 3) ** 2 / math.factorial(n + 1) ** 2
    return (ratio * sigma2 / vn) ** (1.0 / (2 * n + 5))


def nopt_closed(model: CostModel, bounds: Optional[WindowBounds] = None
                ) -> Tuple[float, int, bool]:
    """Closed-form optimum ``(N*, N_opt, saturated)``.

    ``N*`` is the real stationary point of the asymptotic cost,
    ``N_opt`` the nearest odd integer clamped to ``bounds``, and
    ``saturated`` tells whether clamping was needed. Zero roughness
    gives ``N* = inf`` and saturates at the upper bound.
    """
    if bounds is None:
        bounds = WindowBounds.for_order(model.n)
    nstar = _nstar(model.n, model.sigma2, model.vn)
    if math.isinf(nstar):
        return nstar, bounds.n_max, True
    rounded = odd_round(nstar)
    clamped = bounds.clamp(rounded)
    return nstar, clamped, clamped != rounded


def mmse_closed(model: CostModel) -> float:
    """Minimum of the asymptotic cost, evaluated at the unrounded ``N*``."""
    if model.vn == 0:
        raise UndefinedMinimumError("vn = 0: the cost decreases without bound in N")
    return _cost_asym(model, _nstar(model.n, model.sigma2, model.vn))


def r_coef(n: int) -> float:
    """Prefactor of ``MMSE = r_n sigma^(2(2n+4)/(2n+5)) v_n^(1/(2n+5))``."""
    return mmse_closed(CostModel(n, 1.0, 1.0))


def vn_from_clean(clean: SignalLike, n: int) -> float:
    """Mean squared ``(n+2)``-th forward difference of a clean signal."""
    _check_order(n)
    x = _samples(clean)
    if x.size <= n + 2:
        raise LengthError(f"need more than {n + 2} samples, got {x.size}")
    return float(np.mean(np.diff(x, n=n + 2) ** 2))


def estimate_sigma(noisy: SignalLike) -> float:
    """Robust noise standard deviation from first differences (MAD rule).

    Not part of the window-selection theory, which assumes the noise
    power is known; offered as a convenience.
    """
    x = _samples(noisy)
    if x.size < 2:
        raise LengthError("need at least two samples to estimate the noise level")
    return float(np.median(np.abs(np.diff(x))) / (0.6745 * math.sqrt(2.0)))


@dataclass(frozen=True)
class Iteration:
    window: int
    v_hat: float
    n_star: float


@dataclass
class SelectionTrace:
    """History of :func:`select_window_iterative`."""

    iterations: List[Iteration]
    final_window: int
    status: str
    bounds: WindowBounds
    filter_calls: int = 0
    cycle: List[int] = field(default_factory=list)

    def summary(self) -> str:
        return (f"final N={self.final_window} status={self.status} "
                f"iterations={len(self.iterations)} filter_calls={self.filter_calls}")


def _estimate_vn(x: np.ndarray, N1: int, n: int) -> float:
    y = smooth(x, N1, n)
    dy = smooth(diff_m(y, 1), N1, n)
    Y = diff_m(dy, n + 1)
    return float(np.mean(Y**2))


def select_window_iterative(noisy: SignalLike, n: int, sigma2: float,
                            bounds: Optional[WindowBounds] = None,
                            max_iter: int = MAX_ITER) -> SelectionTrace:
    """Data-driven window selection by fixed-point iteration.

    Starting from ``N_opt = 3``, each pass smooths the noisy data with the
    current odd window ``N1``, smooths its first difference again, takes
    ``n + 1`` further differences and uses the mean square of the result
    as the roughness estimate ``v_hat``. The closed-form optimum for
    ``(n, sigma2, v_hat)`` becomes the next window. Iteration stops when a
    window repeats; if the repeat closes a longer cycle, the member with
    the lowest exact-mode cost (under the cycle-average ``v_hat``) wins.
    """
    _check_order(n)
    x = _samples(noisy)
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    if x.size - 1 < n + 3:
        raise LengthError(f"signal of length {x.size} is too short for order {n}")
    if bounds is None:
        bounds = WindowBounds.for_order(n, length=x.size)
    if x.size - 1 < bounds.n_min:
        raise LengthError(f"signal of length {x.size} is too short for window {bounds.n_min}")
    # the difference of the first smoothing pass must still fit the window
    bounds = WindowBounds(bounds.n_min, min(bounds.n_max, _largest_odd(x.size - 1)))

    iterations: List[Iteration] = []
    seen = {}
    n_opt = 3.0
    status = "iteration-capped"
    cycle: List[int] = []
    final = None
    for k in range(max_iter + 1):
        N1 = bounds.clamp(odd_round(n_opt)) if math.isfinite(n_opt) else bounds.n_max
        if iterations and N1 == iterations[-1].window:
            status, final = "converged", N1
            break
        if N1 in seen:
            cycle = [it.window for it in iterations[seen[N1]:]]
            final = _best_of_cycle(iterations[seen[N1]:], n, sigma2)
            status = "cycle-resolved"
            break
        if k == max_iter:
            break
        seen[N1] = k
        v_hat = _estimate_vn(x, N1, n)
        n_opt = _nstar(n, sigma2, v_hat)
        iterations.append(Iteration(N1, v_hat, n_opt))
        log.debug("iteration %d: N1=%d v_hat=%.6g N*=%.6g", k, N1, v_hat, n_opt)
    if final is None:
        final = iterations[-1].window
    if status != "cycle-resolved" and final in (bounds.n_min, bounds.n_max):
        status = "saturated-at-bound"
    return SelectionTrace(iterations, final, status, bounds,
                          filter_calls=2 * len(iterations), cycle=cycle)


def _largest_odd(k: int) -> int:
    return k if k % 2 else k - 1


def _best_of_cycle(members: List[Iteration], n: int, sigma2: float) -> int:
    v = float(np.mean([it.v_hat for it in members]))
    model = CostModel(n, sigma2, v)
    return min((cost(model, it.window), it.window) for it in members)[1]
