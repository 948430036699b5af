"""One entry point for every (penalty, selector, full/randomized) combination."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baselines import hardt_denoise, sure_denoise
from .discrepancy import estimate_noise_median, eta_bound, recover
from .errors import InfeasibleReductionError, ParameterError
from .matrix import as_matrix, range_finder, svd
from .reduced import lift, reduce, reduced_noise_level
from .shrinkage import Regularizer

__all__ = ["Denoised", "SELECTORS", "denoise"]

SELECTORS = ("dp", "sure", "hardt")


@dataclass
class Denoised:
    x_hat: np.ndarray = field(repr=False)
    lam: float
    selector: str
    reg: Regularizer
    tau: float | None
    eta: float | None


def _full(y, reg, selector, tau, eta, hardt_n=None):
    f = svd(y)
    if selector == "dp":
        sol = recover(y, reg, eta, factors=f, tau=tau)
        return sol.x_hat, sol.lam
    if selector == "sure":
        x, curve = sure_denoise(f, tau, reg)
        return x, curve.argmin_lambda
    x, thr = hardt_denoise(f, tau, hardt_n or max(y.shape))
    return x, thr


def denoise(
    y,
    reg=None,
    selector="dp",
    *,
    tau=None,
    eta=None,
    c=1.0,
    randomized=False,
    ell=None,
    power_iters=2,
    seed=0,
):
    """Denoise ``y`` with the requested penalty and parameter selector.

    ``selector`` is ``"dp"`` (closed-form discrepancy principle), ``"sure"``
    or ``"hardt"``. The noise level defaults to the median-rule estimate and
    the DP bound to ``c m n tau^2``. With ``randomized=True`` the problem is
    first reduced to ``Y Q`` with an ``ell``-column range basis; SURE and
    HardT then use the reduced noise level.
    """
    y = as_matrix(y)
    reg = reg or Regularizer.nn()
    selector = selector.lower()
    if selector not in SELECTORS:
        raise ParameterError(f"unknown selector {selector!r}; expected one of {SELECTORS}")
    if selector == "sure" and reg.kind == "rank":
        raise ParameterError("SURE needs a soft-threshold penalty (nn, tnn or gwnn)")
    m, n = y.shape
    if tau is None and (eta is None or selector != "dp"):
        tau = estimate_noise_median(y)
    if eta is None:
        eta = eta_bound(m, n, tau, c)

    if not randomized:
        x, lam = _full(y, reg, selector, tau, eta)
        return Denoised(x, float(lam), selector, reg, tau, eta)

    if ell is None:
        raise ParameterError("randomized path needs ell")
    basis = range_finder(y, ell, power_iters, seed)
    problem = reduce(y, basis, eta)
    if not problem.feasible:
        raise InfeasibleReductionError(eta, problem.a, ell)
    if selector == "dp":
        sol = recover(problem.y_proj, reg, problem.eta_hat)
        a_mat, lam = sol.x_hat, sol.lam
    else:
        tau_hat = reduced_noise_level(problem)
        # HardT keys on the full problem's dimension, not the sketch width
        a_mat, lam = _full(
            problem.y_proj, reg, selector, tau_hat, problem.eta_hat, hardt_n=max(m, n)
        )
    return Denoised(lift(a_mat, basis), float(lam), selector, reg, tau, eta)
