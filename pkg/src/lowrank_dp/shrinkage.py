"""Singular value shrinkage estimators and regularizer descriptions.

Every operator takes precomputed :class:`~lowrank_dp.matrix.SvdFactors` so
a single factorization can serve many threshold trials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .matrix import SvdFactors

__all__ = [
    "Regularizer",
    "weights_gwnn",
    "check_weights",
    "hard_threshold",
    "svt",
    "psvt",
    "wsvt",
    "soft_values",
    "psvt_values",
    "wsvt_values",
]

_KINDS = ("rank", "nn", "tnn", "gwnn")


@dataclass(frozen=True)
class Regularizer:
    """Which penalty ``f(X)`` to use.

    ``kind`` is one of ``"rank"``, ``"nn"``, ``"tnn"`` (keeps the leading
    ``r`` singular values unpenalized) or ``"gwnn"`` (weights
    ``(sigma_i + eps)**(p - 1)`` taken from the observed spectrum).
    """

    kind: str = "nn"
    r: int = 0
    p: float = 0.7
    eps: float = 1e-6

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in _KINDS:
            raise ParameterError(f"unknown regularizer {self.kind!r}; expected one of {_KINDS}")
        if kind == "tnn" and self.r < 0:
            raise ParameterError(f"TNN requires r >= 0, got {self.r}")
        if kind == "gwnn":
            if not 0.0 <= self.p < 1.0:
                raise ParameterError(f"GWNN requires 0 <= p < 1, got {self.p}")
            if not self.eps > 0.0:
                raise ParameterError(f"GWNN requires eps > 0, got {self.eps}")

    @classmethod
    def rank(cls):
        return cls("rank")

    @classmethod
    def nn(cls):
        return cls("nn")

    @classmethod
    def tnn(cls, r=1):
        return cls("tnn", r=r)

    @classmethod
    def gwnn(cls, p=0.7, eps=1e-6):
        return cls("gwnn", p=p, eps=eps)

    @property
    def label(self):
        return {"rank": "Rank", "nn": "NN", "tnn": "TNN", "gwnn": "GWNN"}[self.kind]

    def check_dims(self, k):
        if self.kind == "tnn" and self.r >= k:
            raise ParameterError(f"TNN requires r < min(m, n) = {k}, got r={self.r}")

    def weights(self, s):
        """Weight vector for spectrum ``s`` (unit weights for NN)."""
        s = np.asarray(s, dtype=np.float64)
        if self.kind == "gwnn":
            return weights_gwnn(s, self.p, self.eps)
        if self.kind == "tnn":
            self.check_dims(s.size)
            w = np.ones_like(s)
            w[: self.r] = 0.0
            return w
        return np.ones_like(s)


def weights_gwnn(s, p=0.7, eps=1e-6):
    """Weights ``(s_i + eps)**(p - 1)``; non-descending for non-increasing ``s``."""
    s = np.asarray(s, dtype=np.float64)
    if not 0.0 <= p < 1.0:
        raise ParameterError(f"p must satisfy 0 <= p < 1, got {p}")
    if eps < 0.0:
        raise ParameterError(f"eps must be non-negative, got {eps}")
    if np.any(s < 0) or np.any(np.diff(s) > 0):
        raise ParameterError("singular values must be non-negative and non-increasing")
    base = s + eps
    if np.any(base == 0.0):
        raise ParameterError("zero singular value with eps=0 gives an infinite weight")
    return base ** (p - 1.0)


def check_weights(w, k=None):
    """Validate a non-negative, non-descending weight vector and return it as an array."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1:
        raise ParameterError(f"weights must be a vector, got shape {w.shape}")
    if k is not None and w.size != k:
        raise ParameterError(f"expected {k} weights, got {w.size}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ParameterError("weights must be finite and non-negative")
    if np.any(np.diff(w) < 0):
        raise ParameterError("weights must be non-descending (w_1 <= w_2 <= ...)")
    return w


def _check_lam(lam):
    if not lam >= 0:
        raise ParameterError(f"threshold must be >= 0, got {lam}")


def soft_values(s, lam):
    return np.maximum(s - lam, 0.0)


def psvt_values(s, r, lam):
    out = np.maximum(s - lam, 0.0)
    out[:r] = s[:r]
    return out


def wsvt_values(s, w, lam):
    return np.maximum(s - lam * w, 0.0)


def hard_threshold(f: SvdFactors, lam):
    """Minimizer of ``rank(X) + ||X - Y||_F^2 / (2 lam)``.

    Keeps components with ``sigma_i > sqrt(2 lam)``. A singular value that
    sits exactly on the threshold is dropped.
    """
    _check_lam(lam)
    cut = np.sqrt(2.0 * lam)
    return f.compose(np.where(f.s > cut, f.s, 0.0))


def svt(f: SvdFactors, lam):
    """Singular value soft thresholding, the prox of ``lam * ||X||_*``."""
    _check_lam(lam)
    return f.compose(soft_values(f.s, lam))


def psvt(f: SvdFactors, r, lam):
    """Partial SVT: leading ``r`` components kept, the rest soft-thresholded."""
    _check_lam(lam)
    if not 0 <= r < f.s.size:
        raise ParameterError(f"r must lie in [0, {f.s.size}), got {r}")
    return f.compose(psvt_values(f.s, r, lam))


def wsvt(f: SvdFactors, w, lam):
    """Weighted SVT ``sum_i (sigma_i - lam w_i)_+ u_i v_i^T`` for non-descending ``w``."""
    _check_lam(lam)
    w = check_weights(w, f.s.size)
    return f.compose(wsvt_values(f.s, w, lam))
