"""Benchmark harness: test waveforms, seeded noise and Monte Carlo window search.

Three waveforms on ``0 <= t <= T``:

    X1 = 2 sin(2 pi t^2 / 100) + cos(3 pi t / 100)
    X2 = 2 sin(2 pi t / 5)
    X3 = exp(t / 3) + sqrt(t)

sampled at ``t_l = l T / (L - 1)``, ``l = 0..L-1``.

Trial ``k`` of a run with seed ``s`` draws its standard-normal noise from
``numpy.random.default_rng(mix_seed(s, k))`` where ``mix_seed`` hashes
``(s, k)`` through :class:`numpy.random.SeedSequence`. Noise at level
``sigma`` is ``sigma`` times that draw, so every selector and every noise
level in one run sees the same underlying realisations.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.signal import fftconvolve

from .errors import DomainError, LengthError
from .kernel import FilterSpec, Signal, SignalLike, _samples, kernel_cheb
from .window import (
    CostModel,
    WindowBounds,
    mmse_closed,
    nopt_closed,
    select_window_iterative,
)

__all__ = [
    "WAVEFORMS",
    "TABLE1_SIGMAS",
    "TABLE1_ORDERS",
    "BenchCase",
    "BenchRow",
    "OracleResult",
    "SweepRow",
    "gen_waveform",
    "waveform_derivative",
    "analytic_vn",
    "mix_seed",
    "add_noise",
    "noise_matrix",
    "empirical_mse",
    "smooth_batch",
    "oracle_window",
    "default_grid",
    "run_case",
    "run_table1",
    "run_noise_sweep",
    "run_bias_variance_demo",
    "demo_interior_mse",
]

WAVEFORMS = ("X1", "X2", "X3")
TABLE1_SIGMAS = (0.05, 1.0)
TABLE1_ORDERS = (0, 2, 4, 6)
DEFAULT_TRIALS = 100


def _check_waveform(wid: str) -> None:
    if wid not in WAVEFORMS:
        raise DomainError(f"unknown waveform {wid!r}; choose from {WAVEFORMS}")


def time_grid(L: int, T: float) -> np.ndarray:
    if L < 2 or not T > 0:
        raise DomainError(f"need L >= 2 and T > 0, got L={L}, T={T}")
    return np.linspace(0.0, T, L)


def _eval(wid: str, t: np.ndarray) -> np.ndarray:
    if wid == "X1":
        return 2 * np.sin(2 * np.pi * t**2 / 100) + np.cos(3 * np.pi * t / 100)
    if wid == "X2":
        return 2 * np.sin(2 * np.pi * t / 5)
    return np.exp(t / 3) + np.sqrt(t)


def gen_waveform(wid: str, L: int = 1000, T: float = 15.0) -> Signal:
    """Clean samples of a benchmark waveform."""
    _check_waveform(wid)
    t = time_grid(L, T)
    return Signal(_eval(wid, t), t0=0.0, dt=T / (L - 1), times=t)


def _chirp_poly(k: int, a: float) -> Polynomial:
    # d^k/dt^k exp(i a t^2) = exp(i a t^2) P_k(t), P_{k+1} = P_k' + 2 i a t P_k
    p = Polynomial([1.0 + 0j])
    step = Polynomial([0, 2j * a])
    for _ in range(k):
        p = p.deriv() + step * p
    return p


def waveform_derivative(wid: str, k: int, t) -> np.ndarray:
    """Exact ``k``-th derivative with respect to ``t`` (not sample index)."""
    _check_waveform(wid)
    t = np.asarray(t, dtype=float)
    if wid == "X1":
        a = 2 * np.pi / 100
        chirp = 2 * np.imag(np.exp(1j * a * t**2) * _chirp_poly(k, a)(t))
        w = 3 * np.pi / 100
        return chirp + w**k * np.cos(w * t + k * np.pi / 2)
    if wid == "X2":
        w = 2 * np.pi / 5
        return 2 * w**k * np.sin(w * t + k * np.pi / 2)
    # sqrt(t): coefficient (1/2)(-1/2)...(1/2 - k + 1)
    c = math.prod(0.5 - j for j in range(k))
    with np.errstate(divide="ignore"):
        return np.exp(t / 3) / 3.0**k + c * t ** (0.5 - k)


def analytic_vn(wid: str, n: int, L: int = 1000, T: float = 15.0) -> float:
    """Roughness ``v_n`` from the exact ``(n+2)``-th derivative, per-sample units.

    The derivative of X3 is unbounded at ``t = 0``, so its average skips
    the first sample; this makes X3's ``v_n`` depend strongly on ``dt``.
    """
    t = time_grid(L, T)
    if wid == "X3":
        t = t[1:]
    dt = T / (L - 1)
    d = waveform_derivative(wid, n + 2, t) * dt ** (n + 2)
    return float(np.mean(d**2))


def mix_seed(seed: int, k: int) -> int:
    """64-bit per-trial seed derived from a run seed and trial index."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(k)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def add_noise(clean: SignalLike, sigma: float, seed: int):
    """``clean + sigma * z`` with ``z`` standard normal from ``seed``."""
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    x = _samples(clean)
    if sigma == 0:
        out = x.copy()
    else:
        out = x + sigma * np.random.default_rng(seed).standard_normal(x.size)
    if isinstance(clean, Signal):
        return clean.with_samples(out)
    return out


def noise_matrix(L: int, trials: int, seed: int) -> np.ndarray:
    """Standard-normal draws, one row per trial, ordered by trial index."""
    return np.stack([
        np.random.default_rng(mix_seed(seed, k)).standard_normal(L)
        for k in range(trials)
    ])


def empirical_mse(a: SignalLike, b: SignalLike, window: Optional[int] = None) -> float:
    """Mean squared difference, restricted to the interior when a window is given.

    With ``window = 2M + 1`` only indices ``M .. L-1-M`` are compared,
    i.e. the samples no edge policy can touch.
    """
    x, y = _samples(a), _samples(b)
    if x.shape != y.shape:
        raise LengthError(f"length mismatch: {x.size} vs {y.size}")
    if window is not None:
        M = (window - 1) // 2
        if x.size <= 2 * M:
            raise LengthError(f"window {window} leaves no interior in {x.size} samples")
        x, y = x[M:x.size - M], y[M:y.size - M]
    return float(np.mean((x - y) ** 2))


def smooth_batch(X: np.ndarray, N: int, n: int) -> np.ndarray:
    """Reflect-padded SG smoothing of every row of ``X`` (FFT convolution)."""
    w = kernel_cheb(FilterSpec(n, N)).weights
    M = (N - 1) // 2
    padded = np.pad(X, [(0, 0)] * (X.ndim - 1) + [(M, M)], mode="reflect")
    return fftconvolve(padded, w[np.newaxis, :] if X.ndim == 2 else w,
                       mode="valid", axes=-1)


def _interior_mse_rows(Y: np.ndarray, f: np.ndarray, N: int) -> np.ndarray:
    M = (N - 1) // 2
    L = f.size
    return np.mean((Y[:, M:L - M] - f[M:L - M]) ** 2, axis=1)


@dataclass(frozen=True)
class BenchCase:
    waveform: str
    sigma: float
    n: int
    L: int = 1000
    T: float = 15.0
    trials: int = DEFAULT_TRIALS
    seed: int = 0

    def __post_init__(self):
        _check_waveform(self.waveform)
        if self.L < 2 or not self.T > 0 or self.sigma < 0 or self.trials < 1:
            raise DomainError(f"invalid bench case {self}")

    def clean(self) -> Signal:
        return gen_waveform(self.waveform, self.L, self.T)

    def noisy_batch(self) -> np.ndarray:
        return self.clean().samples + self.sigma * noise_matrix(self.L, self.trials, self.seed)

    def vn(self) -> float:
        return analytic_vn(self.waveform, self.n, self.L, self.T)

    def bounds(self) -> WindowBounds:
        return WindowBounds.for_order(self.n, length=self.L)


@dataclass
class OracleResult:
    window: int
    grid: List[int]
    mse: List[float]

    def curve(self) -> Dict[int, float]:
        return dict(zip(self.grid, self.mse))


def _validate_grid(grid: Sequence[int], n: int, L: int) -> List[int]:
    grid = sorted(set(int(g) for g in grid))
    if not grid:
        raise DomainError("oracle grid is empty")
    for N in grid:
        FilterSpec(n, N)
        if N >= L:
            raise DomainError(f"grid window {N} leaves no interior in {L} samples")
    return grid


def _mse_curve(X: np.ndarray, f: np.ndarray, grid: Sequence[int], n: int) -> List[float]:
    return [float(np.mean(_interior_mse_rows(smooth_batch(X, N, n), f, N))) for N in grid]


def default_grid(n: int, L: int, n_formula: int) -> Tuple[List[int], int]:
    """Coarse odd grid ``n+3 .. min(L-1, 2 n_formula + 101)`` and its step."""
    hi = min(L - 1 if (L - 1) % 2 else L - 2, 2 * n_formula + 101)
    lo = n + 3
    step = max(2, 2 * ((hi - lo) // 80))
    grid = list(range(lo, hi + 1, step))
    if grid[-1] != hi:
        grid.append(hi)
    return grid, step


def oracle_window(case: BenchCase, grid: Optional[Sequence[int]] = None,
                  X: Optional[np.ndarray] = None) -> OracleResult:
    """Window minimising the Monte Carlo mean interior MSE against the clean signal.

    With an explicit ``grid`` every listed window is evaluated. Without one
    a coarse grid is scanned and then refined with step 2 around its
    argmin. Ties go to the smaller window.
    """
    f = case.clean().samples
    if X is None:
        X = case.noisy_batch()
    if grid is not None:
        windows = _validate_grid(grid, case.n, case.L)
        mse = _mse_curve(X, f, windows, case.n)
    else:
        n_formula = _formula(case)[1]
        coarse, step = default_grid(case.n, case.L, n_formula)
        curve = dict(zip(coarse, _mse_curve(X, f, coarse, case.n)))
        best = min(curve, key=lambda N: (curve[N], N))
        fine = [N for N in range(best - step, best + step + 1, 2)
                if N not in curve and case.n + 3 <= N < case.L]
        curve.update(zip(fine, _mse_curve(X, f, fine, case.n)))
        windows = sorted(curve)
        mse = [curve[N] for N in windows]
    i = min(range(len(windows)), key=lambda j: (mse[j], windows[j]))
    return OracleResult(windows[i], list(windows), list(mse))


def _formula(case: BenchCase) -> Tuple[float, int, bool, float, float]:
    vn = case.vn()
    sigma2 = case.sigma**2
    if sigma2 == 0:
        b = case.bounds()
        return 0.0, b.n_min, True, 0.0, vn
    model = CostModel(case.n, sigma2, vn)
    nstar, nopt, sat = nopt_closed(model, case.bounds())
    mmse = mmse_closed(model) if vn > 0 else math.nan
    return nstar, nopt, sat, mmse, vn


def _alg_median(X: np.ndarray, case: BenchCase) -> Tuple[int, List[int]]:
    if case.sigma == 0:
        raise DomainError("the iterative selector needs sigma > 0")
    finals = [select_window_iterative(row, case.n, case.sigma**2, case.bounds()).final_window
              for row in X]
    return statistics.median_low(finals), finals


@dataclass
class BenchRow:
    case: BenchCase
    vn: float
    n_star: float
    n_formula: int
    mmse_pred: float
    n_alg: Optional[int] = None
    n_oracle: Optional[int] = None
    mse_emp_at_formula: Optional[float] = None
    mse_emp_at_oracle: Optional[float] = None
    flagged: bool = False
    oracle: Optional[OracleResult] = field(default=None, repr=False)
    alg_windows: List[int] = field(default_factory=list, repr=False)

    COLUMNS = ("waveform", "sigma", "n", "L", "T", "trials", "seed", "vn", "n_star",
               "n_formula", "mmse_pred", "n_alg", "n_oracle",
               "mse_emp_at_formula", "mse_emp_at_oracle", "flagged")

    def values(self) -> list:
        c = self.case
        return [c.waveform, c.sigma, c.n, c.L, c.T, c.trials, c.seed, self.vn, self.n_star,
                self.n_formula, self.mmse_pred, self.n_alg, self.n_oracle,
                self.mse_emp_at_formula, self.mse_emp_at_oracle, int(self.flagged)]


def run_case(case: BenchCase, empirical: bool = True) -> BenchRow:
    """Formula, iterative and oracle windows for one case on shared noise."""
    nstar, nopt, _, mmse, vn = _formula(case)
    row = BenchRow(case, vn, nstar, nopt, mmse, flagged=case.waveform == "X3")
    if not empirical:
        return row
    X = case.noisy_batch()
    f = case.clean().samples
    oracle = oracle_window(case, X=X)
    curve = oracle.curve()
    if nopt not in curve:
        curve[nopt] = _mse_curve(X, f, [nopt], case.n)[0]
    row.oracle = oracle
    row.n_oracle = oracle.window
    row.mse_emp_at_oracle = curve[oracle.window]
    row.mse_emp_at_formula = curve[nopt]
    if case.sigma > 0:
        row.n_alg, row.alg_windows = _alg_median(X, case)
    return row


def run_table1(L: int = 1000, T: float = 15.0, trials: int = DEFAULT_TRIALS,
               seed: int = 0, empirical: bool = True) -> List[BenchRow]:
    """All 24 cells: waveform x sigma in (0.05, 1) x order in (0, 2, 4, 6)."""
    return [run_case(BenchCase(w, s, n, L=L, T=T, trials=trials, seed=seed), empirical)
            for w in WAVEFORMS for s in TABLE1_SIGMAS for n in TABLE1_ORDERS]


@dataclass
class SweepRow:
    sigma: float
    n_formula: int
    n_alg: int
    n_oracle: int
    mse_emp_at_formula: float
    mse_emp_at_oracle: float

    COLUMNS = ("sigma", "n_formula", "n_alg", "n_oracle",
               "mse_emp_at_formula", "mse_emp_at_oracle")

    def values(self) -> list:
        return [self.sigma, self.n_formula, self.n_alg, self.n_oracle,
                self.mse_emp_at_formula, self.mse_emp_at_oracle]


def run_noise_sweep(waveform: str = "X1", n: int = 2,
                    sigmas: Sequence[float] = (0.25, 0.5, 1.0, 2.0),
                    trials: int = DEFAULT_TRIALS, seed: int = 0,
                    L: int = 1000, T: float = 15.0) -> List[SweepRow]:
    """One row per noise level; all selectors share the noise draws."""
    rows = []
    for s in sigmas:
        if not s > 0:
            raise DomainError(f"sweep noise levels must be positive, got {s}")
        r = run_case(BenchCase(waveform, s, n, L=L, T=T, trials=trials, seed=seed))
        rows.append(SweepRow(s, r.n_formula, r.n_alg, r.n_oracle,
                             r.mse_emp_at_formula, r.mse_emp_at_oracle))
    return rows


def run_bias_variance_demo(waveform: str = "X1", sigma: float = 1.0, n: int = 2,
                           windows: Sequence[int] = (19, 163, 501), seed: int = 0,
                           L: int = 1000, T: float = 15.0
                           ) -> Tuple[List[str], np.ndarray]:
    """Columns ``t, clean, noisy, y_N...`` for trial 0 of ``seed``."""
    case = BenchCase(waveform, sigma, n, L=L, T=T, trials=1, seed=seed)
    windows = [int(N) for N in windows]
    if len(set(windows)) != len(windows):
        raise DomainError("demo windows must be distinct")
    _validate_grid(windows, n, L)
    clean = case.clean()
    noisy = case.noisy_batch()[0]
    cols = [clean.times, clean.samples, noisy]
    cols += [smooth_batch(noisy[np.newaxis, :], N, n)[0] for N in windows]
    header = ["t", "clean", "noisy"] + [f"y_{N}" for N in windows]
    return header, np.column_stack(cols)


def demo_interior_mse(waveform: str = "X1", sigma: float = 1.0, n: int = 2,
                      windows: Sequence[int] = (19, 163, 501), trials: int = 20,
                      seed: int = 0, L: int = 1000, T: float = 15.0) -> Dict[int, float]:
    """Mean interior MSE per demo window over ``trials`` realisations."""
    case = BenchCase(waveform, sigma, n, L=L, T=T, trials=trials, seed=seed)
    grid = _validate_grid(windows, n, L)
    mse = _mse_curve(case.noisy_batch(), case.clean().samples, grid, n)
    return dict(zip(grid, mse))
