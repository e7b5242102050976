"""Savitzky-Golay smoothing built on discrete Chebyshev polynomials, with
closed-form and data-driven selection of the MSE-optimal window length."""

from .errors import (
    DomainError,
    IllPosedContextError,
    LengthError,
    NumericError,
    ParseError,
    SGError,
    UndefinedMinimumError,
)
from .gram import GramContext, eval_q, eval_q_fd, q_norm_sq, q_prime_zero, q_zero, u_moment
from .kernel import (
    FilterSpec,
    Kernel,
    Signal,
    alpha,
    convolve_same,
    diff_m,
    kernel_cheb,
    kernel_ls,
    smooth,
)
from .window import (
    CostModel,
    SelectionTrace,
    WindowBounds,
    beta,
    cost,
    estimate_sigma,
    h_coef,
    mmse_closed,
    mu_asymptotic,
    mu_exact,
    nopt_closed,
    r_coef,
    select_window_iterative,
    vn_from_clean,
)

__version__ = "0.1.0"
