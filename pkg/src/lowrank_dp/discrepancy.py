"""Closed-form regularization parameter from a residual bound.

For the SVT estimate ``X(lam)`` the squared residual

    phi(lam) = ||Y - X(lam)||_F^2 = sum_i min(sigma_i^2, lam^2)

is continuous and strictly increasing on ``[0, sigma_1]``. It is
piecewise quadratic with knots at the singular values, so the equation
``phi(lam) = eta`` is solved exactly by locating ``eta`` among the knot
values ``b_j = phi(sigma_j)`` and inverting one quadratic. The weighted
case replaces ``k lam^2`` by ``(w_1^2 + ... + w_k^2) lam^2`` and the knots
by ``psi(sigma_j / w_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, TrivialSolutionError
from .matrix import SvdFactors, as_matrix, frobenius_sq, svd
from .shrinkage import (
    Regularizer,
    check_weights,
    hard_threshold,
    psvt,
    svt,
    weights_gwnn,
    wsvt,
)

__all__ = [
    "Breakpoints",
    "DpSolution",
    "phi",
    "psi",
    "breakpoints_nn",
    "breakpoints_wnn",
    "solve_lambda_nn",
    "solve_lambda_wnn",
    "solve_lambda_weighted",
    "recover",
    "eta_bound",
    "estimate_noise_median",
]

MEDIAN_RULE_CONST = 0.6745


def _spectrum(f):
    if isinstance(f, SvdFactors):
        return f.s
    s = np.asarray(f, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise ParameterError(f"spectrum must be a non-empty vector, got shape {s.shape}")
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise ParameterError("singular values must be finite and non-negative")
    if np.any(np.diff(s) > 0):
        raise ParameterError("singular values must be non-increasing")
    return s


def _tail_sums(s2):
    # tail[j] = sum(s2[j+1:]), accumulated from the small end
    c = np.cumsum(s2[::-1])[::-1]
    return np.append(c[1:], 0.0), float(c[0])


@dataclass(frozen=True)
class Breakpoints:
    """Knot values ``b_1 >= ... >= b_m >= b_{m+1} = 0`` of the residual curve.

    ``b`` is stored 0-based with length ``m + 1``. ``tail[j]`` is the energy
    ``sum_{i > j+1} sigma_i^2`` and ``coef[j]`` the quadratic coefficient
    (``j+1`` or ``w_1^2 + ... + w_{j+1}^2``) on the piece ending at ``b[j]``.
    """

    b: np.ndarray
    tail: np.ndarray
    coef: np.ndarray
    norm_sq: float
    weighted: bool = False

    def locate(self, eta):
        """Index ``k`` (1-based) with ``b_{k+1} < eta <= b_k``; 0 if ``eta > b_1``."""
        # b is non-increasing, so -b is sorted ascending
        return int(np.searchsorted(-self.b[:-1], -eta, side="right"))


@dataclass(frozen=True)
class DpSolution:
    """Outcome of a discrepancy-principle solve.

    ``k`` counts the leading components that survive thresholding,
    including any unpenalized ones (TNN prefix or zero weights).
    ``trivial`` marks the branch where the bound already admits the
    zero tail; there ``lam`` is any value large enough to zero it.
    """

    lam: float
    k: int
    eta: float
    residual_sq: float
    x_hat: np.ndarray | None = field(default=None, repr=False)
    trivial: bool = False


def phi(f, lam):
    """``||Y - SVT_lam(Y)||_F^2`` evaluated on the spectrum."""
    if lam < 0:
        raise ParameterError(f"lam must be >= 0, got {lam}")
    s = _spectrum(f)
    return float(np.sum(np.minimum(s * s, lam * lam)))


def psi(f, w, lam):
    """``||Y - WSVT_lam(Y)||_F^2`` evaluated on the spectrum."""
    if lam < 0:
        raise ParameterError(f"lam must be >= 0, got {lam}")
    s = _spectrum(f)
    w = check_weights(w, s.size)
    return float(np.sum(np.minimum(s * s, (lam * w) ** 2)))


def breakpoints_nn(f):
    s = _spectrum(f)
    s2 = s * s
    tail, norm_sq = _tail_sums(s2)
    coef = np.arange(1, s.size + 1, dtype=np.float64)
    b = coef * s2 + tail
    # exact ties can produce 1-ulp inversions
    b = np.append(np.minimum.accumulate(b), 0.0)
    return Breakpoints(b, tail, coef, norm_sq, weighted=False)


def breakpoints_wnn(f, w):
    """Weighted knots ``b_j = (sigma_j/w_j)^2 sum_{i<=j} w_i^2 + sum_{i>j} sigma_i^2``."""
    s = _spectrum(f)
    w = check_weights(w, s.size)
    if np.any(w <= 0):
        raise ParameterError("weights must be strictly positive; shift zero-weight prefixes first")
    s2 = s * s
    tail, norm_sq = _tail_sums(s2)
    coef = np.cumsum(w * w)
    b = (s / w) ** 2 * coef + tail
    b = np.append(np.minimum.accumulate(b), 0.0)
    return Breakpoints(b, tail, coef, norm_sq, weighted=True)


def _solve(bp, eta):
    if not eta > 0:
        raise ParameterError(f"eta must be > 0, got {eta}")
    if eta >= bp.norm_sq:
        raise TrivialSolutionError(eta, bp.norm_sq)
    k = bp.locate(eta)
    if k == 0:
        # eta is within roundoff of ||Y||^2 but the knot rounded below it
        k = 1
    lam = float(np.sqrt(max(eta - bp.tail[k - 1], 0.0) / bp.coef[k - 1]))
    return k, lam


def solve_lambda_nn(f, eta):
    """Unique ``lam > 0`` with ``phi(lam) = eta`` for ``0 < eta < ||Y||_F^2``.

    Raises
    ------
    TrivialSolutionError
        If ``eta >= ||Y||_F^2``; the zero matrix then satisfies the bound.
    ParameterError
        If ``eta <= 0``.
    """
    bp = breakpoints_nn(f)
    k, lam = _solve(bp, eta)
    return DpSolution(lam=lam, k=k, eta=float(eta), residual_sq=phi(f, lam))


def solve_lambda_wnn(f, w, eta):
    """Unique ``lam > 0`` with ``psi(lam) = eta`` for strictly positive, non-descending ``w``."""
    bp = breakpoints_wnn(f, w)
    k, lam = _solve(bp, eta)
    return DpSolution(lam=lam, k=k, eta=float(eta), residual_sq=psi(f, w, lam))


def solve_lambda_weighted(f, w, eta):
    """Like :func:`solve_lambda_wnn` but accepts a zero-weight prefix.

    Components with zero weight are never shrunk, so the problem reduces
    to a strictly positive weighted problem on the remaining tail.
    """
    s = _spectrum(f)
    w = check_weights(w, s.size)
    r = int(np.count_nonzero(w == 0))
    if r == s.size:
        raise ParameterError("all weights are zero; nothing is penalized")
    tail = s[r:]
    sol = solve_lambda_wnn(tail, w[r:], eta)
    return DpSolution(lam=sol.lam, k=sol.k + r, eta=sol.eta, residual_sq=sol.residual_sq)


def _zero_solution(y, eta, norm_sq):
    return DpSolution(
        lam=float(np.sqrt(norm_sq)),
        k=0,
        eta=float(eta),
        residual_sq=norm_sq,
        x_hat=np.zeros_like(y),
        trivial=True,
    )


def _with_matrix(sol, x_hat):
    return DpSolution(sol.lam, sol.k, sol.eta, sol.residual_sq, x_hat, sol.trivial)


def recover(y, reg=None, eta=None, *, factors=None, tau=None):
    """Low-rank estimate of ``Y`` whose residual energy equals ``eta``.

    Parameters
    ----------
    y : array_like
        Observed m x n matrix.
    reg : Regularizer, optional
        Penalty; defaults to the nuclear norm.
    eta : float
        Bound on ``||Y - X||_F^2``.
    factors : SvdFactors, optional
        Precomputed SVD of ``y``.
    tau : float, optional
        Noise level for the rank penalty, which uses the hard-threshold
        rule instead of the discrepancy equation. Defaults to
        ``sqrt(eta / (m n))``.

    Returns
    -------
    DpSolution
        With ``x_hat`` set. If ``||Y||_F^2 <= eta`` the estimate is zero.
    """
    from .baselines import hardt_select

    y = as_matrix(y)
    reg = reg or Regularizer.nn()
    if eta is None or not eta > 0:
        raise ParameterError(f"eta must be > 0, got {eta}")
    eta = float(eta)
    norm_sq = frobenius_sq(y)
    if norm_sq <= eta:
        return _zero_solution(y, eta, norm_sq)

    f = factors if factors is not None else svd(y)
    m, n = y.shape
    reg.check_dims(f.s.size)

    if reg.kind == "rank":
        tau = float(np.sqrt(eta / (m * n))) if tau is None else tau
        thr = hardt_select(f, tau, max(m, n))
        lam = 0.5 * thr * thr
        kept = f.s > thr
        resid = float(np.sum(f.s[~kept] ** 2))
        sol = DpSolution(lam, int(np.count_nonzero(kept)), eta, resid)
        return _with_matrix(sol, hard_threshold(f, lam))

    try:
        if reg.kind == "nn":
            sol = solve_lambda_nn(f, eta)
            x = svt(f, sol.lam)
        elif reg.kind == "tnn":
            r = reg.r
            sol = solve_lambda_nn(f.s[r:], eta)
            sol = DpSolution(sol.lam, sol.k + r, sol.eta, sol.residual_sq)
            x = psvt(f, r, sol.lam)
        else:
            w = weights_gwnn(f.s, reg.p, reg.eps)
            sol = solve_lambda_weighted(f, w, eta)
            x = wsvt(f, w, sol.lam)
    except TrivialSolutionError as exc:
        # the bound swallows everything that is penalized
        if reg.kind == "nn":
            return _zero_solution(y, eta, norm_sq)
        r = reg.r if reg.kind == "tnn" else 0
        sol = DpSolution(float(np.sqrt(exc.norm_sq)), r, eta, exc.norm_sq, trivial=True)
        return _with_matrix(sol, f.truncated(r))
    return _with_matrix(sol, x)


def eta_bound(m, n, tau, c=1.0):
    """Residual bound ``c m n tau^2`` (expected noise energy scaled by ``c``)."""
    if not tau > 0:
        raise ParameterError(f"tau must be > 0, got {tau}")
    if not c > 0:
        raise ParameterError(f"c must be > 0, got {c}")
    return float(c * m * n * tau * tau)


def haar_hh(y):
    """Finest-level diagonal (HH) Haar detail coefficients, edge-padding odd sizes."""
    y = as_matrix(y)
    if min(y.shape) < 2:
        raise ParameterError(f"need at least 2 rows and 2 columns, got shape {y.shape}")
    pad = ((0, y.shape[0] % 2), (0, y.shape[1] % 2))
    if any(p for _, p in pad):
        y = np.pad(y, pad, mode="edge")
    a = y[0::2, 0::2]
    b = y[0::2, 1::2]
    c = y[1::2, 0::2]
    d = y[1::2, 1::2]
    return 0.5 * (a - b - c + d)


def estimate_noise_median(y):
    """Median-rule noise level ``median(|HH|) / 0.6745`` from one Haar level."""
    return float(np.median(np.abs(haar_hh(y))) / MEDIAN_RULE_CONST)
