"""Reference threshold selectors: SURE grid search and the optimal hard threshold."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .matrix import SvdFactors
from .shrinkage import Regularizer, hard_threshold, psvt_values, soft_values, weights_gwnn

__all__ = [
    "SURE_GRID",
    "SureCurve",
    "shrink_spectrum",
    "svt_divergence",
    "sure_value",
    "sure_select",
    "sure_denoise",
    "hardt_select",
    "hardt_denoise",
]

#: 101 log-spaced candidate thresholds on [1e-1, 1e7]
SURE_GRID = np.logspace(-1.0, 7.0, 101)

HARDT_KNOWN = 4.0 / np.sqrt(3.0)
HARDT_UNKNOWN = 0.2858

_TIE_GAP = 1e-12
_TIE_SPREAD = 1e-10


@dataclass(frozen=True)
class SureCurve:
    lambdas: np.ndarray
    values: np.ndarray
    argmin_lambda: float

    @property
    def argmin_index(self):
        return int(np.argmin(self.values))


def _dims(f, m, n):
    if isinstance(f, SvdFactors):
        return f.s, (f.m if m is None else m), (f.n if n is None else n)
    if m is None or n is None:
        raise ParameterError("m and n are required when passing a bare spectrum")
    return np.asarray(f, dtype=np.float64), m, n


def _split_ties(s):
    """Spread clusters of (near-)equal singular values symmetrically about their mean."""
    if s.size < 2 or s[0] == 0:
        return s
    gap = _TIE_GAP * s[0]
    close = -np.diff(s) < gap
    if not close.any():
        return s
    out = s.copy()
    i = 0
    while i < s.size - 1:
        if not close[i]:
            i += 1
            continue
        j = i
        while j < s.size - 1 and close[j]:
            j += 1
        size = j - i + 1
        offsets = (np.arange(size)[::-1] - 0.5 * (size - 1)) * _TIE_SPREAD * s[0]
        out[i:j + 1] = np.maximum(s[i:j + 1].mean() + offsets, 0.0)
        i = j + 1
    return out


def shrink_spectrum(s, lam, reg=None, weights=None):
    """Shrunk singular values and their derivatives d f_i / d sigma_i."""
    reg = reg or Regularizer.nn()
    if reg.kind == "nn":
        return soft_values(s, lam), (s > lam).astype(np.float64)
    if reg.kind == "tnn":
        deriv = (s > lam).astype(np.float64)
        deriv[: reg.r] = 1.0
        return psvt_values(s, reg.r, lam), deriv
    if reg.kind == "gwnn":
        w = weights_gwnn(s, reg.p, reg.eps) if weights is None else weights
        return np.maximum(s - lam * w, 0.0), (s > lam * w).astype(np.float64)
    raise ParameterError(f"SURE is defined for soft-threshold penalties, not {reg.kind!r}")


def svt_divergence(s, shrunk, deriv, m, n):
    """Divergence of ``Y -> U diag(f(sigma)) V^T`` for a spectral shrinkage ``f``.

    ``sum_i [f_i' + |m-n| f_i / sigma_i] + 2 sum_{i != j} sigma_i f_i / (sigma_i^2 - sigma_j^2)``
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(s > 0, shrunk / s, 0.0)
    total = float(deriv.sum() + abs(m - n) * ratio.sum())
    num = s * shrunk
    active = np.flatnonzero(num)
    if active.size == 0:
        return total
    s2 = s * s
    denom = s2[active, None] - s2[None, :]
    denom[np.arange(active.size), active] = np.inf
    return total + 2.0 * float(np.sum(num[active, None] / denom))


def sure_value(f, lam, tau, m=None, n=None, *, reg=None, weights=None):
    """Stein's unbiased estimate of ``||X_true - X_hat(lam)||_F^2``.

    ``-m n tau^2 + ||Y - X_hat||_F^2 + 2 tau^2 div(X_hat)``, with the
    shrinkage given by ``reg`` (NN, TNN or GWNN with weights held fixed).
    """
    if not tau > 0:
        raise ParameterError(f"tau must be > 0, got {tau}")
    if lam < 0:
        raise ParameterError(f"lam must be >= 0, got {lam}")
    s, m, n = _dims(f, m, n)
    reg = reg or Regularizer.nn()
    if reg.kind == "gwnn" and weights is None:
        weights = weights_gwnn(s, reg.p, reg.eps)
    s_eval = _split_ties(s)
    shrunk, deriv = shrink_spectrum(s_eval, lam, reg, weights)
    resid = float(np.sum((s_eval - shrunk) ** 2))
    div = svt_divergence(s_eval, shrunk, deriv, m, n)
    return -m * n * tau * tau + resid + 2.0 * tau * tau * div


def sure_select(f, tau, reg=None, grid=None, m=None, n=None):
    """Evaluate SURE on each candidate threshold and pick the minimizer."""
    s, m, n = _dims(f, m, n)
    reg = reg or Regularizer.nn()
    grid = SURE_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    weights = weights_gwnn(s, reg.p, reg.eps) if reg.kind == "gwnn" else None
    values = np.array(
        [sure_value(s, lam, tau, m, n, reg=reg, weights=weights) for lam in grid]
    )
    return SureCurve(grid, values, float(grid[int(np.argmin(values))]))


def sure_denoise(f: SvdFactors, tau, reg=None, grid=None):
    """SURE-selected soft-threshold estimate; returns ``(x_hat, curve)``."""
    reg = reg or Regularizer.nn()
    curve = sure_select(f, tau, reg, grid)
    shrunk, _ = shrink_spectrum(f.s, curve.argmin_lambda, reg)
    return f.compose(shrunk), curve


def hardt_select(f, tau, n):
    """Hard threshold on singular values.

    ``(4/sqrt(3)) sqrt(n) tau`` for a known noise level, otherwise
    ``0.2858`` times the median singular value.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if tau is None:
        s = f.s if isinstance(f, SvdFactors) else np.asarray(f, dtype=np.float64)
        return float(HARDT_UNKNOWN * np.median(s))
    if tau < 0:
        raise ParameterError(f"tau must be >= 0, got {tau}")
    return float(HARDT_KNOWN * np.sqrt(n) * tau)


def hardt_denoise(f: SvdFactors, tau, n=None):
    """Keep components with ``sigma_i > threshold``; returns ``(x_hat, threshold)``."""
    thr = hardt_select(f, tau, max(f.shape) if n is None else n)
    return hard_threshold(f, 0.5 * thr * thr), thr
