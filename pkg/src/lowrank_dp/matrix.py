"""Dense matrix primitives: validation, thin SVD and a randomized range finder.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Factor
containers freeze their arrays so they can be shared between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ParameterError, SvdConvergenceError

__all__ = [
    "SvdFactors",
    "RangeBasis",
    "as_matrix",
    "svd",
    "range_finder",
    "frobenius_sq",
]


def as_matrix(y, name="y"):
    """Return ``y`` as a finite, non-empty, 2-D float64 array."""
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 2:
        raise ParameterError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ParameterError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains NaN or Inf entries")
    return arr


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``Y = u @ diag(s) @ v.T``.

    ``u`` is m x k, ``s`` has length k = min(m, n) and is non-increasing,
    ``v`` is n x k. Note that ``v`` holds right singular vectors as columns,
    not the transposed ``vt`` returned by LAPACK.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", _freeze(self.u))
        object.__setattr__(self, "s", _freeze(self.s))
        object.__setattr__(self, "v", _freeze(self.v))
        k = self.s.shape[0]
        if self.u.shape[1] != k or self.v.shape[1] != k:
            raise ParameterError(
                f"inconsistent factor shapes u={self.u.shape}, s={self.s.shape}, v={self.v.shape}"
            )

    @property
    def shape(self):
        return (self.u.shape[0], self.v.shape[0])

    @property
    def m(self):
        return self.u.shape[0]

    @property
    def n(self):
        return self.v.shape[0]

    def compose(self, values):
        """Rebuild ``u @ diag(values) @ v.T``, skipping zero components."""
        values = np.asarray(values, dtype=np.float64)
        nz = np.flatnonzero(values)
        if nz.size == 0:
            return np.zeros(self.shape)
        if nz.size == values.size:
            return (self.u * values) @ self.v.T
        return (self.u[:, nz] * values[nz]) @ self.v[:, nz].T

    def reconstruct(self):
        return self.compose(self.s)

    def truncated(self, r):
        """The best rank-``r`` approximation ``Y_r``."""
        values = np.zeros_like(self.s)
        values[:r] = self.s[:r]
        return self.compose(values)


@dataclass(frozen=True)
class RangeBasis:
    """Orthonormal n x ell basis approximating the dominant right singular subspace."""

    q: np.ndarray
    ell: int
    power_iters: int

    def __post_init__(self):
        object.__setattr__(self, "q", _freeze(self.q))


def svd(y):
    """Thin SVD with non-increasing singular values.

    Uses LAPACK's divide-and-conquer driver and falls back to the slower
    QR-iteration driver if that fails to converge.

    Raises
    ------
    SvdConvergenceError
        If neither driver converges.
    """
    y = as_matrix(y)
    tried = []
    for driver in ("gesdd", "gesvd"):
        tried.append(driver)
        try:
            u, s, vt = scipy.linalg.svd(
                y, full_matrices=False, lapack_driver=driver, check_finite=False
            )
        except np.linalg.LinAlgError as exc:
            last = exc
            continue
        # LAPACK already sorts, but ties can come back with roundoff inversions
        order = np.argsort(-s, kind="stable")
        if np.any(order != np.arange(s.size)):
            u, s, vt = u[:, order], s[order], vt[order]
        return SvdFactors(u, s, vt.T)
    raise SvdConvergenceError(y.shape, tried, str(last))


def range_finder(y, ell, power_iters=2, seed=0):
    """Randomized orthonormal basis ``Q`` (n x ell) with ``Y Q Q^T ~= Y``.

    A Gaussian test matrix is pushed through ``Y^T`` and refined by
    ``power_iters`` rounds of subspace iteration, re-orthonormalising with
    QR after every product to keep the small singular directions from
    being lost to roundoff.
    """
    y = as_matrix(y)
    m, n = y.shape
    ell = int(ell)
    if not 1 <= ell <= min(m, n):
        raise ParameterError(f"ell must lie in [1, {min(m, n)}], got {ell}")
    if power_iters < 0:
        raise ParameterError(f"power_iters must be >= 0, got {power_iters}")
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((m, ell))
    q, _ = np.linalg.qr(y.T @ omega)
    for _ in range(power_iters):
        w, _ = np.linalg.qr(y @ q)
        q, _ = np.linalg.qr(y.T @ w)
    return RangeBasis(q, ell, int(power_iters))


def frobenius_sq(y):
    """Sum of squared entries."""
    y = np.asarray(y, dtype=np.float64)
    return float(np.vdot(y, y))
